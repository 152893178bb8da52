#pragma once

#include "topola/net_core.hpp"

#include <cstdint>
#include <variant>

namespace topola {

/// Thin SVD A = U diag(S) Vt with S non-increasing.
struct SvdFactors {
  Matrix u;   // n x k, orthonormal columns
  Vector s;   // length k
  Matrix vt;  // k x m, orthonormal rows

  Index rank() const { return s.size(); }
  Matrix reconstruct() const { return u * s.asDiagonal() * vt; }
};

/// A ~= Q B with Q column-orthonormal.
struct QbFactors {
  Matrix q;
  Matrix b;
  /// Running estimate of ||A - QB||_F from the Frobenius tracker.
  double achieved_error = 0.0;
  /// False when a tolerance target could not be met even at full rank.
  bool tolerance_met = true;
};

struct RankTarget {
  Index k;
};
struct ToleranceTarget {
  double tau;
};
using QbTarget = std::variant<RankTarget, ToleranceTarget>;

struct QbOptions {
  Index block_size = 16;
  int power_iters = 1;
  std::uint64_t seed = 0;
};

/// Full thin SVD with k = min(n, m).
SvdFactors full_svd(const Matrix& a);

/// Blocked randomized QB with Frobenius-error tracking. Rank mode grows Q in
/// whole blocks until it has at least k columns; tolerance mode stops at the
/// first block boundary where the tracked error drops below tau.
QbFactors randqb_fp(const Matrix& a, const QbTarget& target, const QbOptions& options = {});

/// SVD of the small factor B lifted through Q, truncated to the top k triplets.
SvdFactors truncate_to_svd(const QbFactors& qb, Index k);

/// Orthonormal basis for the column span, computed by Householder QR.
Matrix orthonormalize(const Matrix& y);

/// Largest principal-angle sine between span(u1) and span(u2),
/// i.e. ||(I - u1 u1^T) u2||_2. Both inputs must be column-orthonormal.
double sin_theta(const Matrix& u1, const Matrix& u2);

double spectral_norm(const Matrix& a);

/// Relative threshold under which the smallest singular value counts as zero.
inline constexpr double kConditionCutoff = 1e-13;

/// sigma_max / sigma_min over min(n, m) singular values, +inf when
/// sigma_min <= kConditionCutoff * sigma_max.
double condition_number(const Matrix& a);
double condition_number(const Vector& singular_values);

}  // namespace topola
