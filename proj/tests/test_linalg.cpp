#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eigenparity/linalg.hpp"
#include "support/test_util.hpp"

using namespace eigenparity;
using test_util::max_abs_diff;
using test_util::oracle_reconstruct;

namespace {

SymMatrix sym2(double a, double b, double c) {
  Matrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = b;
  m(1, 1) = c;
  return SymMatrix(std::move(m));
}

}  // namespace

TEST_CASE("sym_eigen: identity is its own decomposition") {
  const auto d = sym_eigen(SymMatrix::identity(2));
  REQUIRE(d.eigenvalues[0] == 1.0);
  REQUIRE(d.eigenvalues[1] == 1.0);
  REQUIRE(max_abs_diff(d.eigenvectors, Matrix::identity(2)) == 0.0);
}

TEST_CASE("sym_eigen: 2x2 equicorrelation has forced eigenvectors") {
  const auto d = sym_eigen(sym2(1.0, 0.5, 1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  REQUIRE(d.eigenvalues[0] == Catch::Approx(1.5).margin(1e-14));
  REQUIRE(d.eigenvalues[1] == Catch::Approx(0.5).margin(1e-14));
  REQUIRE(d.eigenvectors(0, 0) == Catch::Approx(inv_sqrt2).margin(1e-12));
  REQUIRE(d.eigenvectors(1, 0) == Catch::Approx(inv_sqrt2).margin(1e-12));
  REQUIRE(d.eigenvectors(0, 1) == Catch::Approx(inv_sqrt2).margin(1e-12));
  REQUIRE(d.eigenvectors(1, 1) == Catch::Approx(-inv_sqrt2).margin(1e-12));
}

TEST_CASE("sym_eigen: random 5x5 reconstruction oracle") {
  Rng rng(42);
  const Matrix m = test_util::random_symmetric(5, rng);
  const auto d = sym_eigen(SymMatrix(m));
  REQUIRE(max_abs_diff(oracle_reconstruct(d.eigenvalues, d.eigenvectors), m) < 1e-10);
}

TEST_CASE("sym_eigen: orthonormality and reconstruction on 1000 random matrices up to N=50") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    const Matrix m = test_util::random_symmetric(n, rng);
    const auto d = sym_eigen(SymMatrix(m));

    const Matrix gram = test_util::oracle_matmul(d.eigenvectors.transposed(), d.eigenvectors);
    REQUIRE(max_abs_diff(gram, Matrix::identity(n)) < 1e-10);

    const double scale = std::max(m.max_abs(), 1.0);
    REQUIRE(max_abs_diff(oracle_reconstruct(d.eigenvalues, d.eigenvectors), m) < 1e-10 * scale);

    for (std::size_t a = 1; a < n; ++a) REQUIRE(d.eigenvalues[a - 1] >= d.eigenvalues[a]);
  }
}

TEST_CASE("sym_eigen: deterministic ordering and sign convention") {
  Rng rng(11);
  const Matrix m = test_util::random_symmetric(8, rng);
  const auto d1 = sym_eigen(SymMatrix(m));
  const auto d2 = sym_eigen(SymMatrix(m));
  REQUIRE(max_abs_diff(d1.eigenvectors, d2.eigenvectors) == 0.0);
  for (std::size_t a = 0; a < 8; ++a) {
    REQUIRE(d1.eigenvalues[a] == d2.eigenvalues[a]);
    // First nonzero component of each eigenvector is positive.
    for (std::size_t i = 0; i < 8; ++i) {
      if (std::abs(d1.eigenvectors(i, a)) > 1e-12) {
        REQUIRE(d1.eigenvectors(i, a) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("sym_eigen: rejects asymmetric input") {
  Matrix m(2, 2);
  m(0, 1) = 0.2;
  m(1, 0) = 0.3;
  REQUIRE_THROWS_AS(SymMatrix(std::move(m)), numeric_error);
}

TEST_CASE("spd_power: identity to the -1/2 is identity") {
  const SymMatrix p = spd_power(SymMatrix::identity(3), -0.5);
  REQUIRE(max_abs_diff(p.mat(), Matrix::identity(3)) < 1e-14);
}

TEST_CASE("spd_power: 2x2 closed form for the inverse square root") {
  // Spectral oracle for [[1,.5],[.5,1]]: eigenvalues 1.5 and 0.5 on the
  // (1,1)/sqrt(2) and (1,-1)/sqrt(2) axes, so
  //   a = (1/sqrt(0.5) + 1/sqrt(1.5)) / 2,  b = (1/sqrt(1.5) - 1/sqrt(0.5)) / 2.
  const double a = (1.0 / std::sqrt(0.5) + 1.0 / std::sqrt(1.5)) / 2.0;
  const double b = (1.0 / std::sqrt(1.5) - 1.0 / std::sqrt(0.5)) / 2.0;
  REQUIRE(a == Catch::Approx(1.1153550716504106).epsilon(1e-15));
  REQUIRE(b == Catch::Approx(-0.29885849072268456).epsilon(1e-15));

  const SymMatrix p = spd_power(sym2(1.0, 0.5, 1.0), -0.5);
  REQUIRE(p(0, 0) == Catch::Approx(a).margin(1e-12));
  REQUIRE(p(0, 1) == Catch::Approx(b).margin(1e-12));
  REQUIRE(p(1, 1) == Catch::Approx(a).margin(1e-12));

  // Squaring must give C^{-1} = [[4/3,-2/3],[-2/3,4/3]].
  const Matrix sq = test_util::oracle_matmul(p.mat(), p.mat());
  REQUIRE(sq(0, 0) == Catch::Approx(4.0 / 3.0).margin(1e-8));
  REQUIRE(sq(0, 1) == Catch::Approx(-2.0 / 3.0).margin(1e-8));
}

TEST_CASE("spd_power: diagonal square root") {
  const SymMatrix p = spd_power(sym2(2.0, 0.0, 8.0), 0.5);
  REQUIRE(p(0, 0) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
  REQUIRE(p(1, 1) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
  REQUIRE(std::abs(p(0, 1)) < 1e-12);
}

TEST_CASE("spd_power: rejects non-SPD input and names the eigenvalue") {
  try {
    spd_power(sym2(1.0, 1.0, 1.0), -0.5);  // singular: eigenvalues 2 and 0
    FAIL("expected numeric_error");
  } catch (const numeric_error& e) {
    REQUIRE(std::string(e.what()).find("not SPD") != std::string::npos);
    REQUIRE(std::string(e.what()).find("eigenvalue") != std::string::npos);
  }
}

TEST_CASE("spd_power: exponents compose additively") {
  Rng rng(19);
  const double exponents[] = {-1.0, -0.5, 0.5, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = test_util::random_spd(6, rng);
    for (double ea : exponents)
      for (double eb : exponents) {
        const Matrix lhs = test_util::oracle_matmul(spd_power(m, ea).mat(), spd_power(m, eb).mat());
        const Matrix rhs = spd_power(m, ea + eb).mat();
        REQUIRE(max_abs_diff(lhs, rhs) < 1e-8 * std::max(rhs.max_abs(), 1.0));
      }
  }
}

TEST_CASE("spd_power_apply matches the materialized matrix") {
  Rng rng(23);
  const SymMatrix m = test_util::random_spd(7, rng);
  const auto d = sym_eigen(m);
  Vector x(7);
  for (auto& v : x) v = rng.gaussian();
  const Vector via_apply = spd_power_apply(d, -0.5, x);
  const Vector via_matrix = spd_power(d, -0.5).mat() * x;
  for (std::size_t i = 0; i < 7; ++i) REQUIRE(via_apply[i] == Catch::Approx(via_matrix[i]).margin(1e-12));
}

TEST_CASE("random_rotation: dim 1 gives a sign") {
  bool saw_plus = false;
  bool saw_minus = false;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const auto r = random_rotation(1, seed);
    REQUIRE(std::abs(std::abs(r(0, 0)) - 1.0) < 1e-14);
    (r(0, 0) > 0 ? saw_plus : saw_minus) = true;
  }
  REQUIRE(saw_plus);
  REQUIRE(saw_minus);
}

TEST_CASE("random_rotation: orthogonality and determinism") {
  const auto r1 = random_rotation(5, 99);
  const auto r2 = random_rotation(5, 99);
  REQUIRE(max_abs_diff(r1.mat(), r2.mat()) == 0.0);
  const Matrix gram = test_util::oracle_matmul(r1.mat(), r1.mat().transposed());
  REQUIRE(max_abs_diff(gram, Matrix::identity(5)) < 1e-10);
}

TEST_CASE("mahalanobis_gap: zero at the identity rotation") {
  Rng rng(31);
  const SymMatrix c = test_util::random_spd(4, rng);
  REQUIRE(std::abs(mahalanobis_gap(c, RotationMatrix::identity(4))) < 1e-12);
}

TEST_CASE("mahalanobis_gap: trace identity on the identity correlation") {
  // With C = I the gap reduces to 2 (N - Tr[R]); check against a direct
  // trace evaluation for random rotations.
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = random_rotation(3, seed);
    double tr = 0.0;
    for (std::size_t i = 0; i < 3; ++i) tr += r(i, i);
    const double expected = 2.0 * (3.0 - tr);
    REQUIRE(mahalanobis_gap(SymMatrix::identity(3), r) == Catch::Approx(expected).margin(1e-10));
    REQUIRE(expected >= -1e-10);
  }
}

TEST_CASE("mahalanobis_gap: nonnegative over a brute-force rotation sweep") {
  Rng rng(37);
  const SymMatrix c = test_util::random_spd(3, rng);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto r = random_rotation(3, 1000 + seed);
    REQUIRE(mahalanobis_gap(c, r) >= -1e-10);
  }
}

TEST_CASE("mahalanobis_gap: strictly positive away from the identity") {
  Rng rng(41);
  const SymMatrix c = test_util::random_spd(4, rng);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = random_rotation(4, 5000 + seed);
    if (max_abs_diff(r.mat(), Matrix::identity(4)) > 1e-6) REQUIRE(mahalanobis_gap(c, r) > 0.0);
  }
}

TEST_CASE("mahalanobis_gap: identity weight gives the same minimizer") {
  Rng rng(43);
  const SymMatrix c = test_util::random_spd(3, rng);
  REQUIRE(std::abs(mahalanobis_gap(c, RotationMatrix::identity(3), 0.0)) < 1e-12);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto r = random_rotation(3, 7000 + seed);
    REQUIRE(mahalanobis_gap(c, r, 0.0) >= -1e-10);
  }
}

TEST_CASE("first-order optimality: trace gradient vanishes at R = I") {
  Rng rng(47);
  const SymMatrix c = test_util::random_spd(5, rng);
  const Matrix inv_sqrt = spd_power(c, -0.5).mat();
  const double eps = 1e-5;
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t l = k + 1; l < 5; ++l) {
      const double f_plus = trace(test_util::oracle_matmul(test_util::givens(5, k, l, eps), inv_sqrt));
      const double f_minus = trace(test_util::oracle_matmul(test_util::givens(5, k, l, -eps), inv_sqrt));
      REQUIRE(std::abs((f_plus - f_minus) / (2.0 * eps)) < 1e-6);
    }
}
