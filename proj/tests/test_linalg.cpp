#include <catch_amalgamated.hpp>

#include <random>

#include "isoalg/linalg.hpp"
#include "oracles.hpp"

using namespace isoalg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("spectral norm agrees with SVD on random and rectangular matrices") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 8; ++n) {
    const ComplexMatrix m = oracle::random_matrix(n, rng);
    CHECK_THAT(spectral_norm(m), WithinRel(oracle::norm(m), 1e-12));
  }
  ComplexMatrix tall = ComplexMatrix::Random(5, 2);
  CHECK_THAT(spectral_norm(tall), WithinRel(oracle::norm(tall), 1e-12));
  CHECK(spectral_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("hs_inner is trace(A*B) and rejects mismatched shapes") {
  const ComplexMatrix a = oracle::unit(2, 0, 1) * Complex(0.0, 2.0);
  const ComplexMatrix b = oracle::unit(2, 0, 1) * 3.0;
  CHECK(std::abs(hs_inner(a, b) - Complex(0.0, -6.0)) < 1e-15);
  CHECK_THROWS_AS(hs_inner(a, ComplexMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("herm_eig rejects non-self-adjoint input") {
  CHECK_THROWS_AS(herm_eig(oracle::unit(2, 0, 1)), NotSelfAdjoint);
  const HermitianEigen e = herm_eig(oracle::diag({3.0, -1.0}));
  CHECK_THAT(e.values(0), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(e.values(1), WithinAbs(3.0, 1e-15));
}

TEST_CASE("psd_sqrt squares back and rejects negative spectrum") {
  std::mt19937_64 rng(3);
  const ComplexMatrix x = oracle::random_matrix(5, rng);
  const ComplexMatrix p = x.adjoint() * x;
  const ComplexMatrix r = psd_sqrt(p);
  CHECK(oracle::norm(r * r - p) <= 1e-12 * oracle::norm(p));
  CHECK(oracle::norm(r - r.adjoint()) <= 1e-12);
  CHECK_THROWS_AS(psd_sqrt(oracle::diag({1.0, -0.5})), NotPSD);
  // rounding-level negative eigenvalues are clamped to zero
  const ComplexMatrix nearly = oracle::diag({1.0, -1e-14});
  CHECK(psd_sqrt(nearly)(1, 1) == 0.0);
}

TEST_CASE("spectral projections resolve the identity") {
  const ComplexMatrix h = oracle::diag({1.0, 2.0, 2.0, 5.0});
  const auto ps = spectral_projections(h, 1e-6);
  REQUIRE(ps.size() == 3);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  for (const auto& p : ps) {
    CHECK(oracle::norm(p * p - p) < 1e-12);
    sum += p;
  }
  CHECK(oracle::norm(sum - ComplexMatrix::Identity(4, 4)) < 1e-12);
  CHECK(spectral_projections(ComplexMatrix::Identity(3, 3), 1e-6).empty());
}

TEST_CASE("partial isometry detection reports each characterization") {
  CHECK(is_partial_isometry(oracle::unit(2, 0, 1)).pass());
  CHECK(is_partial_isometry(ComplexMatrix::Zero(3, 3)).pass());
  CHECK(is_partial_isometry(oracle::backward_shift(6)).pass());

  const ConditionReport bad = is_partial_isometry(2.0 * oracle::unit(2, 0, 1));
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.defects().size() == 5);
  for (const auto& d : bad.defects()) CHECK_FALSE(d.ok());

  CHECK_THROWS_AS(is_partial_isometry(ComplexMatrix::Zero(2, 3)), DimensionMismatch);
}
