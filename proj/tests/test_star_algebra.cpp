#include <catch_amalgamated.hpp>

#include <random>

#include "isoalg/star_algebra.hpp"
#include "oracles.hpp"

using namespace isoalg;

TEST_CASE("closure of a diagonal with distinct entries is all diagonals") {
  const FiniteStarAlgebra a = generate_closure(3, {oracle::diag({1.0, 2.0, 3.0})});
  CHECK(a.dimension() == 3);
  CHECK(verify_algebra(a).pass());
  CHECK(contains(a, oracle::diag({5.0, -1.0, 0.5})).inside);
  CHECK_FALSE(contains(a, oracle::unit(3, 0, 1)).inside);
}

TEST_CASE("closure of a matrix unit is the full matrix algebra") {
  const FiniteStarAlgebra a = generate_closure(2, {oracle::unit(2, 0, 1)});
  CHECK(a.dimension() == 4);
  CHECK(commutant(a).size() == 1);
}

TEST_CASE("closure matches the word-span oracle on block structures") {
  std::mt19937_64 rng(5);
  // generators inside C (+) M_2 (+) M_2 with the two M_2 blocks independent
  for (int trial = 0; trial < 5; ++trial) {
    ComplexMatrix g1 = ComplexMatrix::Zero(5, 5);
    ComplexMatrix g2 = ComplexMatrix::Zero(5, 5);
    g1(0, 0) = 0.7;
    g1.block(1, 1, 2, 2) = oracle::random_matrix(2, rng);
    g2.block(3, 3, 2, 2) = oracle::random_matrix(2, rng);
    const std::vector<ComplexMatrix> gens{g1, g2};
    const FiniteStarAlgebra a = generate_closure(5, std::span<const ComplexMatrix>(gens));
    const auto words = oracle::words(gens, 4);
    CHECK(static_cast<Eigen::Index>(a.dimension()) == oracle::span_rank(words));
    for (const auto& w : words) CHECK(contains(a, w).inside);
    CHECK(verify_algebra(a).pass());
  }
}

TEST_CASE("closure equals the bicommutant of its generators") {
  std::mt19937_64 rng(9);
  const ComplexMatrix h = oracle::diag({1.0, 1.0, 2.0, 3.0});
  const ComplexMatrix x = oracle::unit(4, 2, 3);
  const std::vector<ComplexMatrix> gens{h, x};
  const FiniteStarAlgebra a = generate_closure(4, std::span<const ComplexMatrix>(gens));
  const auto bc = bicommutant(4, std::span<const ComplexMatrix>(gens));
  CHECK(a.dimension() == bc.size());
  for (const auto& b : bc) CHECK(contains(a, b).inside);
}

TEST_CASE("closure rejects generators of the wrong size") {
  CHECK_THROWS_AS(generate_closure(3, {oracle::unit(2, 0, 1)}), DimensionMismatch);
  const FiniteStarAlgebra a = generate_closure(2, {oracle::diag({1.0, 2.0})});
  CHECK_THROWS_AS(contains(a, ComplexMatrix::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("same_span compares subspaces") {
  const FiniteStarAlgebra a = generate_closure(3, {oracle::diag({1.0, 2.0, 3.0})});
  const FiniteStarAlgebra b = generate_closure(3, {oracle::diag({0.0, 1.0, 0.0}), oracle::diag({1.0, 0.0, 0.0})});
  const FiniteStarAlgebra c = generate_closure(3, {oracle::diag({1.0, 1.0, 2.0})});
  CHECK(same_span(a, b));
  CHECK_FALSE(same_span(a, c));
}

TEST_CASE("isometry system refuses a non partial isometry") {
  const FiniteStarAlgebra a = generate_closure(2, {oracle::diag({1.0, 2.0})});
  CHECK_THROWS_AS(IsometrySystem(a, 2.0 * oracle::unit(2, 0, 1)), HypothesisViolated);
}

TEST_CASE("delta and delta_* conjugate by U") {
  const ComplexMatrix u = oracle::backward_shift(4);
  auto sys = make_system(generate_closure(4, {oracle::diag({1.0, 0.5, 0.25, 0.125})}), u);
  const ComplexMatrix q = oracle::diag({1.0, 0.5, 0.25, 0.125});
  CHECK(oracle::norm(delta(*sys, q) - u * q * u.adjoint()) == 0.0);
  CHECK(oracle::norm(delta_star(*sys, q) - u.adjoint() * q * u) == 0.0);
  CHECK(oracle::norm(sys->delta(q, 3) - oracle::diag({0.125, 0.0, 0.0, 0.0})) == 0.0);
  CHECK(oracle::norm(sys->final_projection(2) - oracle::diag({1.0, 1.0, 0.0, 0.0})) == 0.0);
  CHECK(oracle::norm(sys->initial_projection(1) - oracle::diag({0.0, 1.0, 1.0, 1.0})) == 0.0);
  CHECK(oracle::norm(sys->power(9)) == 0.0);
}
