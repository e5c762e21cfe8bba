#include <catch_amalgamated.hpp>

#include "isoalg/conditions.hpp"
#include "isoalg/models.hpp"
#include "oracles.hpp"

using namespace isoalg;

namespace {

SystemPtr shift_over_diagonals(Eigen::Index n) {
  std::vector<double> d;
  for (Eigen::Index j = 0; j < n; ++j) d.push_back(1.0 + static_cast<double>(j));
  return make_system(generate_closure(static_cast<std::size_t>(n), {oracle::diag(d)}), oracle::backward_shift(n));
}

SystemPtr noncentral() {
  const ComplexMatrix e12 = oracle::unit(2, 0, 1);
  return make_system(generate_closure(2, {e12}), e12);
}

}  // namespace

TEST_CASE("intertwining forms agree on a shift over the diagonals") {
  const auto sys = shift_over_diagonals(5);
  const ConditionReport r = check_intertwining(*sys);
  CHECK(r.pass());
  CHECK(r.find("equivalent forms disagree")->value == 0.0);
  CHECK(check_coefficient_algebra(*sys).pass());
}

TEST_CASE("intertwining fails when U*U is not central") {
  const auto sys = noncentral();
  const ConditionReport r = check_intertwining(*sys);
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.find("(i) Ua = delta(a)U")->ok());
  CHECK_FALSE(r.find("(ii) U*U commutes with A")->ok());
  // all three forms fail together, so they agree
  CHECK(r.find("equivalent forms disagree")->ok());
  CHECK_FALSE(check_coefficient_algebra(*sys).pass());
}

TEST_CASE("intertwining alone does not make a coefficient algebra") {
  // span{1, e_00}: U*U commutes, but delta(1) and delta_*(e_00) = e_11 leave
  const ComplexMatrix u = oracle::backward_shift(3);
  const auto sys = make_system(generate_closure(3, {oracle::diag({1.0, 0.0, 0.0})}), u);
  const ConditionReport r = check_coefficient_algebra(*sys);
  CHECK_FALSE(r.pass());
  CHECK(check_intertwining(*sys).pass());
  CHECK_FALSE(r.find("delta maps A into A")->ok());
  CHECK_FALSE(r.find("delta_* maps A into A")->ok());
}

TEST_CASE("initial projection chain reports a stabilization index") {
  const auto sys = shift_over_diagonals(4);
  const ConditionReport r = check_initial_projection_chain(*sys, 10);
  CHECK(r.pass());
  bool found = false;
  for (const auto& n : r.notes()) found = found || n.rfind("stabilization index", 0) == 0;
  CHECK(found);
}

TEST_CASE("commutative extension needs a commutative algebra") {
  CHECK_THROWS_AS(check_commutative_extension(*noncentral(), 4), NotCommutative);
  const PolarModel m = build_polar_model(oracle::unit(2, 0, 1) * 2.0);
  CHECK(check_commutative_extension(*m.base, 6).pass());
}

TEST_CASE("towers over the polar models agree") {
  for (const Eigen::Index n : {2, 6}) {
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j) a(j - 1, j) = std::pow(0.5, 0.5 * static_cast<double>(j));
    const PolarModel m = build_polar_model(n == 2 ? ComplexMatrix(2.0 * oracle::unit(2, 0, 1)) : a);
    const ConditionReport r = verify_tower_commutation(*m.base, 2 * static_cast<std::size_t>(n) + 2);
    CHECK(r.pass());
    CHECK(r.find("towers have equal span")->value <= 1e-9);
    CHECK(check_extension_fixed_point(*m.system).pass());
    CHECK(verify_power_projections(*m.system, 5).max_defect() <= 1e-12);
  }
}

TEST_CASE("extension towers grow a non-invariant algebra") {
  const ComplexMatrix u = oracle::backward_shift(4);
  const auto sys = make_system(generate_closure(4, {oracle::diag({1.0, 0.0, 0.0, 0.0})}), u);
  const FiniteStarAlgebra back = delta_tower(*sys, sys->algebra(), Direction::Backward);
  CHECK(back.dimension() == 4);
  CHECK_FALSE(check_extension_fixed_point(*sys).pass());
  const SystemPtr ext = coefficient_extension(*sys);
  CHECK(check_coefficient_algebra(*ext).pass());
  CHECK(check_extension_fixed_point(*ext).pass());
}

TEST_CASE("extend_E refuses a non-central initial projection") {
  CHECK_THROWS_AS(extend_E(*noncentral()), HypothesisViolated);
  CHECK_THROWS_AS(verify_tower_commutation(*noncentral(), 3), NotCommutative);
}
