#include <catch_amalgamated.hpp>

#include <random>

#include "isoalg/models.hpp"
#include "isoalg/norm_engine.hpp"
#include "oracles.hpp"

using namespace isoalg;
using Catch::Matchers::WithinRel;

TEST_CASE("degree-zero element: s_k equals the coefficient norm") {
  const auto sys = build_qdeform(5, 0.5, heisenberg_rho(5, 0.5)).system;
  GeneratorTable t;
  t.emplace("Q", oracle::diag({1.0, 0.5, 0.25, 0.125, 0.0625}));
  const NormalForm x = reduce(parse("3*Q - 1", t), sys);
  const NormLimitTrace tr = norm_limit(x, 8);
  REQUIRE(tr.k_values == std::vector<int>{1, 2, 4, 8});
  for (double s : tr.s_values) CHECK_THAT(s, WithinRel(2.0, 1e-12));
  CHECK_THAT(tr.direct_norm, WithinRel(2.0, 1e-12));
}

TEST_CASE("the shift has norm limit one") {
  const auto sys = build_qdeform(12, 0.5, heisenberg_rho(12, 0.5)).system;
  const NormLimitTrace tr = norm_limit(reduce(parse("U", {}), sys), 8);
  CHECK_THAT(tr.s_values.back(), WithinRel(1.0, 1e-12));
  CHECK(check_norm_trace(tr, 1e-9).pass());
}

TEST_CASE("norm trace bounds hold on random elements") {
  const auto sys = build_qdeform(8, 0.5, heisenberg_rho(8, 0.5)).system;
  Rng rng(17);
  for (int s = 0; s < 20; ++s) {
    const NormalForm x = random_normal_form(sys, rng);
    const NormLimitTrace tr = norm_limit(x, 8);
    CHECK(check_norm_trace(tr, 1e-9).pass());
    CHECK_THAT(tr.direct_norm, WithinRel(oracle::norm(eval(x)), 1e-12));
  }
}

TEST_CASE("huge elements are pre-scaled; non-finite ones are refused") {
  const auto sys = build_qdeform(4, 0.5, heisenberg_rho(4, 0.5)).system;
  const NormalForm x(sys, NormalForm::Terms{{1, 1e200 * ComplexMatrix::Identity(4, 4)}});
  const NormLimitTrace tr = norm_limit(x, 8);
  CHECK_THAT(tr.s_values.back(), WithinRel(1e200, 1e-12));
  CHECK(check_norm_trace(tr, 1e-9).pass());
  CHECK_THROWS_AS(NormalForm(sys, NormalForm::Terms{{0, 1e308 * ComplexMatrix::Identity(4, 4)}}), Overflow);
}

TEST_CASE("sum-norm inequalities: single matrix gives equality") {
  std::mt19937_64 rng(2);
  const ComplexMatrix d = oracle::random_matrix(4, rng);
  const ConditionReport r = sum_norm_inequalities({d}, 1e-12);
  CHECK(r.pass());
  CHECK(r.max_defect() <= 1e-12);
}

TEST_CASE("sum-norm inequalities on orthogonal projections") {
  const ConditionReport r = sum_norm_inequalities({oracle::diag({1.0, 0.0}), oracle::diag({0.0, 1.0})}, 1e-12);
  CHECK(r.pass());
  CHECK(r.defects().size() == 4);
}

TEST_CASE("sum-norm inequalities never fail on random tuples") {
  Rng rng(99);
  for (int s = 0; s < 100; ++s) {
    std::vector<ComplexMatrix> d;
    const int m = 1 + s % 5;
    for (int i = 0; i < m; ++i) d.push_back(random_gaussian_matrix(1 + s % 8, rng));
    CHECK(sum_norm_inequalities(d, 1e-9).pass());
  }
  CHECK_THROWS_AS(sum_norm_inequalities({}, 1e-9), DimensionMismatch);
}

TEST_CASE("property-star sampler passes on both models") {
  const auto q = build_qdeform(6, 0.5, heisenberg_rho(6, 0.5)).system;
  const auto p = build_polar_model(2.0 * oracle::unit(2, 0, 1)).system;
  CHECK(property_star_sample(q, 50, 1, 1e-9).pass());
  CHECK(property_star_sample(p, 50, 1, 1e-9).pass());
}

TEST_CASE("gauge invariance: trivial cases are exact") {
  const auto sys = build_qdeform(5, 0.5, heisenberg_rho(5, 0.5)).system;
  GeneratorTable t;
  t.emplace("Q", oracle::diag({1.0, 0.5, 0.25, 0.125, 0.0625}));
  CHECK(gauge_invariance_check(reduce(parse("Q", t), sys), 16, 0.0).pass());
  CHECK(gauge_invariance_check(reduce(parse("U + Q*U'", t), sys), 1, 0.0).pass());
  Rng rng(5);
  CHECK(gauge_invariance_check(random_normal_form(sys, rng), 16, 1e-9).pass());
}

TEST_CASE("random sampling is reproducible from the seed") {
  const auto sys = build_qdeform(5, 0.5, heisenberg_rho(5, 0.5)).system;
  Rng a(123), b(123);
  const NormalForm x = random_normal_form(sys, a);
  const NormalForm y = random_normal_form(sys, b);
  CHECK(eval(x) == eval(y));
}
