#pragma once

// Test-only fixtures and brute-force oracles. Nothing here calls into the
// code path it is used to check.

#include "topola/net_core.hpp"
#include "topola/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace topola::test {

// --- Fixtures -------------------------------------------------------------

/// The eight-node worked example. F is a leaf on H; no other leaf placement
/// gives 89 six-hop walks between D and E.
inline constexpr const char* kFigS9Edges =
    "# worked n-hop example\n"
    "D A\nD C\nA B\nA C\nB E\nB G\nC E\nC H\nG E\nG H\nH F\n";

inline Graph fig_s9() {
  std::istringstream in(kFigS9Edges);
  return parse_edge_list(in);
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "test-matrix"));
  return gaussian_matrix(rows, cols, rng);
}

inline Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, seed));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// U diag(s) V^T with random orthonormal U, V and the given spectrum.
inline Matrix with_spectrum(Index rows, Index cols, const Vector& s, std::uint64_t seed) {
  const Matrix u = random_orthonormal(rows, s.size(), seed);
  const Matrix v = random_orthonormal(cols, s.size(), seed + 7919);
  return u * s.asDiagonal() * v.transpose();
}

inline Matrix exact_rank(Index rows, Index cols, Index k, std::uint64_t seed) {
  return random_matrix(rows, k, seed) * random_matrix(k, cols, seed + 1);
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix g = random_matrix(n, n, seed);
  return 0.5 * (g + g.transpose());
}

inline Matrix random_binary_graph(Index n, double p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "test-graph"));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (coin(rng) < p) a(i, j) = a(j, i) = 1.0;
  return a;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// --- Linear-algebra oracles ----------------------------------------------

inline Vector singular_values(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

inline double two_norm(const Matrix& a) { return singular_values(a)(0); }

/// sin of the largest principal angle from the smallest cosine.
inline double principal_angle_sine(const Matrix& u1, const Matrix& u2) {
  const Vector cosines = singular_values(u1.transpose() * u2);
  const double c = std::min(1.0, cosines(cosines.size() - 1));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

/// sin of the largest principal angle as the norm of u2 projected on an
/// explicit orthonormal complement of u1. Accurate for tiny angles.
inline double complement_sine(const Matrix& u1, const Matrix& u2) {
  Eigen::HouseholderQR<Matrix> qr(u1);
  const Matrix full = qr.householderQ() * Matrix::Identity(u1.rows(), u1.rows());
  const Matrix perp = full.rightCols(u1.rows() - u1.cols());
  if (perp.cols() == 0) return 0.0;
  return two_norm(perp.transpose() * u2);
}

/// Best rank-k approximation from a Jacobi SVD.
inline Matrix best_rank(const Matrix& a, Index k) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() *
         svd.matrixV().leftCols(k).transpose();
}

/// Leading k left and right singular vectors from a Jacobi SVD.
inline std::pair<Matrix, Matrix> leading_subspaces(const Matrix& a, Index k) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(k), svd.matrixV().leftCols(k)};
}

/// P_t = (1 - alpha) P0 + alpha W P_{t-1}, starting from P0.
inline Matrix rwr_iterate(const Matrix& w, const Matrix& p0, double alpha, int steps) {
  Matrix p = p0;
  for (int t = 0; t < steps; ++t) p = (1.0 - alpha) * p0 + alpha * w * p;
  return p;
}

/// (A^n)_{ij} by repeated floating multiplication; exact for small counts.
inline double walk_count_float(const Matrix& a, int n, Index i, Index j) {
  Matrix p = Matrix::Identity(a.rows(), a.cols());
  for (int t = 0; t < n; ++t) p = p * a;
  return p(i, j);
}

// --- Metric oracles -------------------------------------------------------

inline double pairwise_auc(std::span<const double> s, std::span<const int> l) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (l[p] == 0) continue;
    for (std::size_t q = 0; q < s.size(); ++q) {
      if (l[q] != 0) continue;
      pairs += 1.0;
      if (s[p] > s[q]) wins += 1.0;
      else if (s[p] == s[q]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Average precision from precision/recall recomputed at every cutoff of the
/// (score desc, index asc) ordering.
inline double threshold_sweep_ap(std::span<const double> s, std::span<const int> l) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });
  double total_pos = 0.0;
  for (const int x : l) total_pos += x != 0 ? 1.0 : 0.0;
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t cut = 1; cut <= order.size(); ++cut) {
    double tp = 0.0;
    for (std::size_t r = 0; r < cut; ++r) tp += l[order[r]] != 0 ? 1.0 : 0.0;
    const double recall = tp / total_pos;
    const double precision = tp / static_cast<double>(cut);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

/// ARI from explicit pair counting over all element pairs.
inline double ari_pair_counting(std::span<const int> a, std::span<const int> b) {
  double both = 0.0, in_a = 0.0, in_b = 0.0, pairs = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p)
    for (std::size_t q = p + 1; q < a.size(); ++q) {
      pairs += 1.0;
      const bool sa = a[p] == a[q];
      const bool sb = b[p] == b[q];
      in_a += sa;
      in_b += sb;
      both += sa && sb;
    }
  const double expected = in_a * in_b / pairs;
  const double denom = 0.5 * (in_a + in_b) - expected;
  return denom == 0.0 ? 1.0 : (both - expected) / denom;
}

inline double nmi_direct(std::span<const int> a, std::span<const int> b) {
  const double n = static_cast<double>(a.size());
  std::set<int> ua(a.begin(), a.end()), ub(b.begin(), b.end());
  if (ua.size() == 1 && ub.size() == 1) return 1.0;
  if (ua.size() == 1 || ub.size() == 1) return 0.0;
  auto size_of = [&](std::span<const int> v, int label) {
    return static_cast<double>(std::count(v.begin(), v.end(), label));
  };
  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (const int x : ua) {
    const double px = size_of(a, x) / n;
    ha -= px * std::log(px);
    for (const int y : ub) {
      double joint = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) joint += (a[k] == x && b[k] == y) ? 1.0 : 0.0;
      if (joint == 0.0) continue;
      const double py = size_of(b, y) / n;
      mi += joint / n * std::log((joint / n) / (px * py));
    }
  }
  for (const int y : ub) {
    const double py = size_of(b, y) / n;
    hb -= py * std::log(py);
  }
  return mi / std::max(ha, hb);
}

}  // namespace topola::test
