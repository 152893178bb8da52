#include "support.hpp"
#include "topola/error.hpp"
#include "topola/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace topola;

namespace {

double orthonormality_defect(const Matrix& q) {
  return test::max_abs(q.transpose() * q - Matrix::Identity(q.cols(), q.cols()));
}

void check_svd_invariants(const SvdFactors& f) {
  CHECK(orthonormality_defect(f.u) <= 1e-10);
  CHECK(orthonormality_defect(f.vt.transpose()) <= 1e-10);
  for (Index k = 0; k < f.s.size(); ++k) {
    CHECK(f.s(k) >= 0.0);
    if (k > 0) CHECK(f.s(k) <= f.s(k - 1));
  }
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("full_svd of identity and diagonal") {
  const SvdFactors eye = full_svd(Matrix::Identity(3, 3));
  CHECK(test::max_abs(eye.s - Vector::Ones(3)) <= 1e-14);

  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  const SvdFactors f = full_svd(d);
  CHECK(f.s(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(f.s(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.s(2) == doctest::Approx(1.0).epsilon(1e-14));
  // Signed permutations of the identity.
  CHECK(test::max_abs(f.u.cwiseAbs() - Matrix::Identity(3, 3)) <= 1e-14);
  CHECK(test::max_abs(f.vt.cwiseAbs() - Matrix::Identity(3, 3)) <= 1e-14);
}

TEST_CASE("full_svd reconstructs random matrices") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index rows = 10 + static_cast<Index>(seed % 3), cols = 8 + static_cast<Index>(seed % 5);
    const Matrix a = test::random_matrix(rows, cols, seed);
    const SvdFactors f = full_svd(a);
    CHECK(f.rank() == std::min(rows, cols));
    check_svd_invariants(f);
    CHECK((a - f.reconstruct()).norm() <= 1e-8 * a.norm());
    CHECK(test::max_abs(f.s - test::singular_values(a)) <= 1e-12 * f.s(0));
  }
}

TEST_CASE("randqb rank mode recovers exact-rank matrices") {
  Matrix a = Matrix::Zero(30, 20);
  a += test::random_matrix(30, 1, 1) * test::random_matrix(1, 20, 2);
  a += test::random_matrix(30, 1, 3) * test::random_matrix(1, 20, 4);
  const QbFactors qb = randqb_fp(a, RankTarget{2}, {.block_size = 16, .power_iters = 1, .seed = 5});
  CHECK(orthonormality_defect(qb.q) <= 1e-10);
  CHECK((a - qb.q * qb.b).norm() <= 1e-8 * a.norm());
  CHECK(qb.achieved_error >= 0.0);
  CHECK(qb.achieved_error <= 1e-6 * a.norm());
}

TEST_CASE("randqb of identity with k = n") {
  const Matrix eye = Matrix::Identity(12, 12);
  const QbFactors qb = randqb_fp(eye, RankTarget{12}, {.block_size = 5});
  CHECK(test::max_abs(qb.q * qb.b - eye) <= 1e-10);
}

TEST_CASE("randqb rank mode column count rounds up to a block multiple") {
  const Matrix a = test::random_matrix(60, 50, 9);
  CHECK(randqb_fp(a, RankTarget{5}, {.block_size = 4}).q.cols() == 8);
  CHECK(randqb_fp(a, RankTarget{8}, {.block_size = 4}).q.cols() == 8);
  CHECK(randqb_fp(a, RankTarget{47}, {.block_size = 16}).q.cols() == 48);
  CHECK(randqb_fp(a, RankTarget{3}, {.block_size = 16}).q.cols() == 16);
  CHECK(randqb_fp(a, RankTarget{49}, {.block_size = 16}).q.cols() == 50);
}

TEST_CASE("randqb tolerance mode meets tau on the explicit residual") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = test::random_matrix(200, 150, seed);
    const double tau = 0.1 * a.norm();
    const QbFactors qb = randqb_fp(a, ToleranceTarget{tau}, {.seed = seed});
    CHECK(qb.tolerance_met);
    CHECK((a - qb.q * qb.b).norm() <= tau);
    CHECK(orthonormality_defect(qb.q) <= 1e-10);
  }
}

TEST_CASE("randqb tolerance mode with a tiny tau on a low-rank matrix") {
  const Matrix a = test::exact_rank(40, 30, 3, 11);
  const double tau = 1e-9 * a.norm();
  const QbFactors qb = randqb_fp(a, ToleranceTarget{tau}, {.block_size = 2});
  CHECK(qb.tolerance_met);
  CHECK((a - qb.q * qb.b).norm() <= tau);
}

TEST_CASE("randqb reports an unreachable tolerance") {
  // At full rank QB == A up to rounding, so only a tau below rounding fails.
  const Matrix a = test::random_matrix(10, 6, 3);
  const QbFactors qb = randqb_fp(a, ToleranceTarget{1e-300}, {.block_size = 4});
  CHECK(qb.q.cols() == 6);
  CHECK_FALSE(qb.tolerance_met);
}

TEST_CASE("randqb is deterministic per seed") {
  const Matrix a = test::random_matrix(50, 40, 21);
  const QbOptions opts{.block_size = 8, .power_iters = 2, .seed = 77};
  const QbFactors x = randqb_fp(a, RankTarget{10}, opts);
  const QbFactors y = randqb_fp(a, RankTarget{10}, opts);
  CHECK(x.q == y.q);
  CHECK(x.b == y.b);
  const QbFactors z = randqb_fp(a, RankTarget{10}, {.block_size = 8, .power_iters = 2, .seed = 78});
  CHECK(z.q != x.q);
}

TEST_CASE("randqb rejects bad arguments") {
  const Matrix a = test::random_matrix(5, 4, 0);
  CHECK_THROWS_AS(randqb_fp(a, RankTarget{5}), Error);
  CHECK_THROWS_AS(randqb_fp(a, RankTarget{0}), Error);
  CHECK_THROWS_AS(randqb_fp(a, ToleranceTarget{0.0}), Error);
  CHECK_THROWS_AS(randqb_fp(a, RankTarget{2}, {.block_size = 0}), Error);
  CHECK_THROWS_AS(randqb_fp(a, RankTarget{2}, {.power_iters = -1}), Error);
}

TEST_CASE("truncate_to_svd") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  const QbFactors qb = randqb_fp(d, RankTarget{3});
  const SvdFactors top = truncate_to_svd(qb, 2);
  CHECK(top.s.size() == 2);
  CHECK(top.s(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(top.s(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(truncate_to_svd(qb, 0), Error);
  CHECK_THROWS_AS(truncate_to_svd(qb, 4), Error);

  // Lift consistency against the best rank-k approximation of QB.
  const Matrix a = test::random_matrix(40, 30, 8);
  const QbFactors q2 = randqb_fp(a, RankTarget{12}, {.block_size = 6});
  const SvdFactors f = truncate_to_svd(q2, 5);
  check_svd_invariants(f);
  const Matrix qbm = q2.q * q2.b;
  CHECK(test::max_abs(f.reconstruct() - test::best_rank(qbm, 5)) <= 1e-10 * test::max_abs(qbm));
}

TEST_CASE("truncated randomized spectrum matches full svd on gapped spectra") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Vector s(20);
    for (Index k = 0; k < 20; ++k) s(k) = k < 4 ? 10.0 - k : 0.5 * std::pow(0.8, static_cast<double>(k));
    const Matrix a = test::with_spectrum(60, 45, s, seed);
    const SvdFactors f = truncate_to_svd(randqb_fp(a, RankTarget{4}, {.block_size = 4, .seed = seed}), 4);
    CHECK(test::max_abs(f.s - s.head(4)) <= 1e-6 * s(0));
  }
}

TEST_CASE("sin_theta") {
  const Matrix u = test::random_orthonormal(10, 3, 1);
  CHECK(sin_theta(u, u) <= 1e-12);
  const Matrix e = Matrix::Identity(4, 4);
  CHECK(sin_theta(e.leftCols(2), e.rightCols(2)) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = test::random_orthonormal(12, 4, 100 + seed);
    const Matrix b = test::random_orthonormal(12, 4, 200 + seed);
    const double s = sin_theta(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(std::abs(s - test::principal_angle_sine(a, b)) <= 1e-10);
    CHECK(std::abs(s - sin_theta(b, a)) <= 1e-10);
  }
  CHECK_THROWS_AS(sin_theta(u, test::random_orthonormal(10, 2, 3)), Error);
  CHECK_THROWS_AS(sin_theta(u, 2.0 * u), Error);
}

TEST_CASE("condition_number") {
  CHECK(condition_number(Matrix(Matrix::Identity(3, 3))) == 1.0);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 10, 1;
  CHECK(condition_number(d) == doctest::Approx(10.0).epsilon(1e-14));
  Matrix deficient(3, 3);
  deficient << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CHECK(condition_number(deficient) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(condition_number(Matrix(Matrix::Zero(3, 3))), Error);
}

TEST_CASE("Weyl: singular values move by at most the perturbation norm") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = test::random_matrix(15, 10, seed);
    const Matrix h = 0.1 * test::random_matrix(15, 10, seed + 1000);
    const Vector s = full_svd(a).s;
    const Vector st = full_svd(a + h).s;
    CHECK((st - s).cwiseAbs().maxCoeff() <= test::two_norm(h) + 1e-12);
  }
}

TEST_CASE("spectral_norm agrees with the largest singular value") {
  const Matrix a = test::random_matrix(9, 7, 4);
  CHECK(spectral_norm(a) == doctest::Approx(test::two_norm(a)).epsilon(1e-12));
}

}
