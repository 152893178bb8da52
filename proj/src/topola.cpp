#include "topola/topola.hpp"

#include "topola/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace topola {

void TopoLaParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw_config("lambda must be positive and finite, got " + std::to_string(lambda));
}

double singular_transform(double sigma, double lambda) {
  return sigma * sigma * sigma / (sigma * sigma + lambda);
}

TopoLaDistanceMatrix topola_distance(const SvdFactors& svd, Index n, const TopoLaParams& params) {
  params.validate();
  if (svd.u.rows() != n) throw_config("topola_distance: left factor has wrong row count");
  Vector weights(svd.s.size());
  for (Index i = 0; i < svd.s.size(); ++i) {
    const double s2 = svd.s(i) * svd.s(i);
    weights(i) = s2 / (s2 + params.lambda);
  }
  Matrix d = svd.u * weights.asDiagonal() * svd.u.transpose();
  // Exact symmetry; the product above is symmetric only up to rounding.
  d = 0.5 * (d + d.transpose()).eval();
  return TopoLaDistanceMatrix{std::move(d), params.lambda};
}

TopoLaDistanceMatrix topola_distance(const Matrix& a, const TopoLaParams& params) {
  params.validate();
  return topola_distance(full_svd(a), a.rows(), params);
}

SeriesSum topola_series(const Matrix& a, const TopoLaParams& params, int terms) {
  params.validate();
  if (terms < 1) throw_config("topola_series: need at least one term");
  const Matrix g = (a * a.transpose()) / params.lambda;
  Matrix term = g;
  Matrix sum = g;
  for (int t = 2; t <= terms; ++t) {
    term = -(term * g);
    sum += term;
  }
  const double smax = spectral_norm(a);
  return SeriesSum{std::move(sum), smax * smax < params.lambda};
}

Matrix nr_enhance(const SvdFactors& svd, const TopoLaParams& params) {
  params.validate();
  Vector enhanced(svd.s.size());
  for (Index i = 0; i < svd.s.size(); ++i) enhanced(i) = singular_transform(svd.s(i), params.lambda);
  return svd.u * enhanced.asDiagonal() * svd.vt;
}

Matrix nr_enhance(const Matrix& a, const TopoLaParams& params) {
  params.validate();
  return nr_enhance(full_svd(a), params);
}

Matrix fastnr_enhance(const Matrix& a, const TopoLaParams& params, const QbTarget& target,
                      const QbOptions& options) {
  params.validate();
  const QbFactors qb = randqb_fp(a, target, options);
  Index k = std::min(qb.b.rows(), qb.b.cols());
  if (const auto* rank = std::get_if<RankTarget>(&target)) k = std::min(k, rank->k);
  return nr_enhance(truncate_to_svd(qb, k), params);
}

Matrix cn_matrix(const Matrix& a) { return a * a.transpose(); }

std::vector<double> lambda_grid(const Vector& singular_values) {
  std::vector<double> s(singular_values.data(), singular_values.data() + singular_values.size());
  std::sort(s.begin(), s.end());
  auto median_of = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  if (s.empty()) throw_config("lambda_grid: empty spectrum");
  double median = median_of(s);
  if (median <= 0.0) {
    // More than half the spectrum is zero; scale by the nonzero part instead.
    std::vector<double> positive;
    std::copy_if(s.begin(), s.end(), std::back_inserter(positive), [](double x) { return x > 0.0; });
    if (positive.empty()) throw_config("lambda_grid: matrix is all zeros");
    median = median_of(positive);
  }
  std::vector<double> grid;
  for (int g = -3; g <= 3; ++g) grid.push_back(std::pow(10.0, g) * median * median);
  return grid;
}

std::vector<double> lambda_grid(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) throw_numeric("lambda_grid: SVD did not converge");
  return lambda_grid(Vector(svd.singularValues()));
}

double distance_bound_violation(const Matrix& a, const TopoLaParams& params) {
  params.validate();
  const Matrix d = topola_distance(a, params).values;
  const Index n = a.rows();

  Matrix row_dist2(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) row_dist2(i, j) = row_dist2(j, i) = (a.row(i) - a.row(j)).squaredNorm();
  const Vector row_norm2 = a.rowwise().squaredNorm();

  double worst = -std::numeric_limits<double>::infinity();
  for (Index r = 0; r < n; ++r) {
    const double scale = row_norm2(r) / params.lambda;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double diff = d(r, i) - d(r, j);
        worst = std::max(worst, diff * diff - scale * row_dist2(i, j));
      }
  }
  // A single node has no pairs; the bound holds vacuously.
  return n < 2 ? 0.0 : worst;
}

}  // namespace topola
