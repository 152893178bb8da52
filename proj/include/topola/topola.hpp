#pragma once

#include "topola/net_core.hpp"
#include "topola/spectral.hpp"

#include <cstdint>
#include <vector>

namespace topola {

struct TopoLaParams {
  /// Damping of the even-hop series; larger values shrink the influence of
  /// high-degree nodes. Must be positive and finite.
  double lambda = 1.0;

  void validate() const;
};

/// D = A A^T (A A^T + lambda I)^{-1}, an n x n symmetric matrix whose
/// eigenvalues are sigma_i^2 / (sigma_i^2 + lambda).
struct TopoLaDistanceMatrix {
  Matrix values;
  double lambda = 0.0;
};

/// Computed from the left singular factors; no inverse is ever formed.
TopoLaDistanceMatrix topola_distance(const Matrix& a, const TopoLaParams& params);
TopoLaDistanceMatrix topola_distance(const SvdFactors& svd, Index n, const TopoLaParams& params);

struct SeriesSum {
  Matrix values;
  /// False when sigma_max^2 >= lambda; the partial sums then do not approach
  /// the closed form.
  bool convergent = true;
};

/// Partial alternating sum  sum_{t=1..terms} (-1)^{t+1} (A A^T)^t / lambda^t.
SeriesSum topola_series(const Matrix& a, const TopoLaParams& params, int terms);

/// sigma^3 / (sigma^2 + lambda): the singular-value map applied by NR.
double singular_transform(double sigma, double lambda);

/// A* = D A = U diag(f(sigma)) V^T with f = singular_transform.
Matrix nr_enhance(const Matrix& a, const TopoLaParams& params);
Matrix nr_enhance(const SvdFactors& svd, const TopoLaParams& params);

/// NR over a randomized low-rank factorization. In rank mode the result uses
/// exactly k singular triplets; in tolerance mode every column of Q is kept.
Matrix fastnr_enhance(const Matrix& a, const TopoLaParams& params, const QbTarget& target,
                      const QbOptions& options = {});

/// A A^T; on a 0/1 symmetric graph entry (i, j) counts common neighbors.
Matrix cn_matrix(const Matrix& a);

/// Candidate lambdas {10^g * median(sigma)^2 : g = -3..3}.
std::vector<double> lambda_grid(const Matrix& a);
std::vector<double> lambda_grid(const Vector& singular_values);

/// Max over rows r and column pairs (i, j) of
///   (D[r,i] - D[r,j])^2 - (||A(r)||^2 / lambda) * ||A(i) - A(j)||^2,
/// where A(.) are rows of A. The regularized least-squares argument behind
/// D bounds this by zero.
double distance_bound_violation(const Matrix& a, const TopoLaParams& params);

// --- Walk and path counting on 0/1 graphs --------------------------------

/// Largest node count accepted by the simple-path enumerators.
inline constexpr Index kMaxEnumerationNodes = 20;

/// (A^n)_{ij} in exact integer arithmetic. Throws on overflow.
std::uint64_t walk_count(const Matrix& a, int hops, Index i, Index j);

/// Number of simple paths (no repeated vertex) with exactly `length` edges
/// from i to j, by depth-first enumeration.
std::uint64_t loop_free_paths(const Matrix& a, int length, Index i, Index j);

/// Decomposition of the n-hop walks between i and j into loop-free paths,
/// simple paths decorated with back-and-forth loops at the endpoints, and
/// the remainder: total == loop_free[n] + endpoint_loops + remainder.
struct PathCensus {
  int hops = 0;
  std::uint64_t total = 0;
  /// loop_free[l] = |a_l| for l = 0..hops (index 0 unused, always 0).
  std::vector<std::uint64_t> loop_free;
  std::uint64_t endpoint_loops = 0;
  std::uint64_t remainder = 0;
  std::uint64_t degree_i = 0;
  std::uint64_t degree_j = 0;
};

PathCensus path_census(const Matrix& a, int hops, Index i, Index j);

}  // namespace topola
