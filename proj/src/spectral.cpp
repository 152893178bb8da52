#include "topola/spectral.hpp"

#include "topola/error.hpp"
#include "topola/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace topola {

namespace {

constexpr double kOrthonormalTolerance = 1e-8;

void require_orthonormal(const Matrix& u, const char* name) {
  const Matrix gram = u.transpose() * u;
  const double err = (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthonormalTolerance)
    throw_config(std::string(name) + " is not column-orthonormal (max |U^T U - I| = " +
                 std::to_string(err) + ")");
}

// Projects the columns of y off span(q) and re-orthonormalizes. Two passes
// keep the result orthogonal to q even when y is numerically inside span(q).
Matrix orthonormalize_against(const Matrix& y, const Matrix& q) {
  Matrix out = y;
  for (int pass = 0; pass < 2; ++pass) {
    if (q.cols() > 0) out -= q * (q.transpose() * out);
    out = orthonormalize(out);
  }
  return out;
}

template <typename Block>
void append_columns(Matrix& dst, const Block& cols) {
  const Index old = dst.cols();
  dst.conservativeResize(dst.rows(), old + cols.cols());
  dst.rightCols(cols.cols()) = cols;
}

template <typename Block>
void append_rows(Matrix& dst, const Block& rows) {
  const Index old = dst.rows();
  dst.conservativeResize(old + rows.rows(), dst.cols());
  dst.bottomRows(rows.rows()) = rows;
}

}  // namespace

SvdFactors full_svd(const Matrix& a) {
  if (!a.allFinite()) throw_config("full_svd: matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw_numeric("full_svd: SVD did not converge");
  SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
  if (!f.u.allFinite() || !f.s.allFinite() || !f.vt.allFinite())
    throw_numeric("full_svd: SVD produced non-finite factors");
  return f;
}

Matrix orthonormalize(const Matrix& y) {
  const Index cols = std::min(y.rows(), y.cols());
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), cols);
}

QbFactors randqb_fp(const Matrix& a, const QbTarget& target, const QbOptions& options) {
  if (options.block_size < 1) throw_config("randqb_fp: block size must be >= 1");
  if (options.power_iters < 0) throw_config("randqb_fp: power iterations must be >= 0");
  if (!a.allFinite()) throw_config("randqb_fp: matrix has non-finite entries");

  const Index n = a.rows();
  const Index m = a.cols();
  const Index full_rank = std::min(n, m);

  const auto* rank = std::get_if<RankTarget>(&target);
  const auto* tol = std::get_if<ToleranceTarget>(&target);
  if (rank && (rank->k < 1 || rank->k > full_rank))
    throw_config("randqb_fp: rank " + std::to_string(rank->k) + " outside [1, " +
                 std::to_string(full_rank) + "]");
  if (tol && !(tol->tau > 0.0 && std::isfinite(tol->tau)))
    throw_config("randqb_fp: tolerance must be positive and finite");

  Rng rng(derive_seed(options.seed, "randqb_fp"));
  const double norm2 = a.squaredNorm();
  const double tau2 = tol ? tol->tau * tol->tau : 0.0;
  // Below this ratio the subtraction norm2 - ||B||^2 has lost most of its digits.
  const bool tracker_unreliable = tol && tau2 < 1e-8 * norm2;

  Matrix q(n, 0);
  Matrix b(0, m);
  double energy = norm2;
  double achieved = std::sqrt(norm2);
  bool met = false;

  while (q.cols() < full_rank) {
    const Index width = std::min(options.block_size, full_rank - q.cols());
    const Matrix omega = gaussian_matrix(m, width, rng);
    Matrix qi = orthonormalize(a * omega - q * (b * omega));
    for (int p = 0; p < options.power_iters; ++p) {
      const Matrix z = orthonormalize(a.transpose() * qi - b.transpose() * (q.transpose() * qi));
      qi = orthonormalize(a * z - q * (b * z));
    }
    qi = orthonormalize_against(qi, q);
    const Matrix bi = qi.transpose() * a;
    append_columns(q, qi);
    append_rows(b, bi);

    energy -= bi.squaredNorm();
    achieved = std::sqrt(std::max(energy, 0.0));

    if (rank && q.cols() >= rank->k) {
      met = true;
      break;
    }
    if (tol && energy < tau2) {
      if (tracker_unreliable) achieved = (a - q * b).norm();
      if (achieved <= tol->tau) {
        met = true;
        break;
      }
    }
  }
  if (tol && !met) {
    achieved = (a - q * b).norm();
    met = achieved <= tol->tau;
  }
  return QbFactors{std::move(q), std::move(b), achieved, met};
}

SvdFactors truncate_to_svd(const QbFactors& qb, Index k) {
  const Index available = std::min(qb.b.rows(), qb.b.cols());
  if (k < 1 || k > available)
    throw_config("truncate_to_svd: rank " + std::to_string(k) + " outside [1, " +
                 std::to_string(available) + "]");
  const SvdFactors small = full_svd(qb.b);
  return SvdFactors{qb.q * small.u.leftCols(k), small.s.head(k), small.vt.topRows(k)};
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double sin_theta(const Matrix& u1, const Matrix& u2) {
  if (u1.rows() != u2.rows() || u1.cols() != u2.cols())
    throw_config("sin_theta: subspace bases must have the same shape");
  require_orthonormal(u1, "sin_theta: first basis");
  require_orthonormal(u2, "sin_theta: second basis");
  const Matrix residual = u2 - u1 * (u1.transpose() * u2);
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

double condition_number(const Vector& s) {
  if (s.size() == 0 || s(0) <= 0.0) throw_config("condition_number: matrix is all zeros");
  const double smin = s(s.size() - 1);
  if (smin <= kConditionCutoff * s(0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double condition_number(const Matrix& a) {
  if (!a.allFinite()) throw_config("condition_number: matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) throw_numeric("condition_number: SVD did not converge");
  return condition_number(Vector(svd.singularValues()));
}

}  // namespace topola
