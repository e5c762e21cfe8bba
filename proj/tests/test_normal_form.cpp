#include <catch_amalgamated.hpp>

#include <random>

#include "isoalg/models.hpp"
#include "isoalg/norm_engine.hpp"
#include "isoalg/normal_form.hpp"
#include "oracles.hpp"

using namespace isoalg;

namespace {

SystemPtr qsystem(std::size_t n = 6) { return build_qdeform(n, 0.5, heisenberg_rho(n, 0.5)).system; }

SystemPtr polar_system() { return build_polar_model(2.0 * oracle::unit(2, 0, 1)).system; }

/// A unitary U over the diagonals of C^3 acting by a cyclic permutation:
/// no power of U vanishes, so degrees never truncate.
SystemPtr cyclic_system() {
  ComplexMatrix u = ComplexMatrix::Zero(3, 3);
  u(0, 1) = 1.0;
  u(1, 2) = 1.0;
  u(2, 0) = 1.0;
  return make_system(generate_closure(3, {oracle::diag({1.0, 2.0, 4.0})}), u);
}

}  // namespace

TEST_CASE("UU*U reduces to a single degree-one term") {
  const auto sys = polar_system();
  const NormalForm x = reduce(parse("U*U'*U", {}), sys);
  REQUIRE(x.terms().size() == 1);
  CHECK(x.terms().begin()->first == 1);
  CHECK(oracle::norm(eval(x) - sys->U()) < 1e-13);
}

TEST_CASE("reduction agrees with direct evaluation of random expressions") {
  for (const auto& sys : {qsystem(), polar_system(), cyclic_system()}) {
    GeneratorTable t;
    const auto& basis = sys->algebra().basis();
    for (std::size_t i = 0; i < 3; ++i) t.emplace("b" + std::to_string(i), basis[i % basis.size()]);
    for (const std::string text : {"U*b0*U' + b1", "(U'*b1*U)^2 - b2*U^3'", "U'^2*b0*U^2*U'*b1",
                                   "(b0 + U*b1)*(b2' - U'*b0)'", "U^3*U'^3 - U'^2*U^2", "2i*U*b1 - U'"}) {
      const Expression e = parse(text, t);
      const NormalForm x = reduce(e, sys);
      const ComplexMatrix direct = oracle::evaluate(e, sys->U());
      CHECK(oracle::norm(eval(x) - direct) <= 1e-12 * std::max(1.0, oracle::norm(direct)));
    }
  }
}

TEST_CASE("normalized coefficients satisfy the absorption identities") {
  const auto sys = qsystem();
  std::mt19937_64 rng(21);
  for (int s = 0; s < 20; ++s) {
    const NormalForm x = random_normal_form(sys, rng);
    for (const auto& [k, a] : x.terms()) {
      const auto uk = static_cast<std::size_t>(std::abs(k));
      if (k > 0) CHECK(oracle::norm(a * sys->final_projection(uk) - a) < 1e-14);
      if (k < 0) CHECK(oracle::norm(sys->final_projection(uk) * a - a) < 1e-14);
      CHECK(contains(sys->algebra(), a).inside);
    }
  }
}

TEST_CASE("coefficients are the bands of the evaluated matrix on a shift model") {
  const auto sys = qsystem(8);
  std::mt19937_64 rng(4);
  for (int s = 0; s < 20; ++s) {
    const NormalForm x = random_normal_form(sys, rng);
    const ComplexMatrix m = eval(x);
    for (int k = -4; k <= 4; ++k) {
      const auto uk = static_cast<std::size_t>(std::abs(k));
      const ComplexMatrix term = k >= 0 ? ComplexMatrix(coefficient(x, k) * sys->power(uk))
                                        : ComplexMatrix(sys->star_power(uk) * coefficient(x, k));
      CHECK(oracle::norm(term - oracle::band(m, k)) < 1e-12);
    }
  }
}

TEST_CASE("gauge average recovers coefficients") {
  for (const auto& sys : {qsystem(), cyclic_system()}) {
    std::mt19937_64 rng(8);
    for (int s = 0; s < 10; ++s) {
      const NormalForm x = random_normal_form(sys, rng);
      const int n = x.max_degree();
      for (int k = -n; k <= n; ++k) {
        const ComplexMatrix avg = gauge_average(x, k, static_cast<std::size_t>(2 * n + 1));
        CHECK(oracle::norm(avg - coefficient(x, k)) < 1e-12 * std::max(1.0, x.max_coefficient_norm()));
      }
      CHECK_THROWS_AS(gauge_average(x, 0, static_cast<std::size_t>(2 * n)), InsufficientResolution);
    }
  }
}

TEST_CASE("gauge multiplies degree k by lambda^k") {
  const auto sys = cyclic_system();
  const NormalForm x = reduce(parse("U + U'", {}), sys);
  const Complex i(0.0, 1.0);
  const NormalForm g = gauge(x, i);
  CHECK(std::abs(coefficient(g, 1)(0, 0) - i) < 1e-15);
  CHECK(std::abs(coefficient(g, -1)(0, 0) + i) < 1e-15);
  CHECK_THROWS_AS(gauge(x, Complex(1.1, 0.0)), NotUnimodular);
}

TEST_CASE("mixing systems and escaping the algebra are refused") {
  const auto a = qsystem();
  const auto b = qsystem();
  const NormalForm x = NormalForm::identity(a);
  const NormalForm y = NormalForm::identity(b);
  CHECK_THROWS_AS(nf_multiply(x, y), SystemMismatch);
  CHECK_THROWS_AS(nf_add(x, y), SystemMismatch);

  GeneratorTable t;
  t.emplace("off", oracle::unit(6, 0, 3));
  try {
    (void)reduce(parse("U*off", t), a);
    FAIL("expected CoefficientEscape");
  } catch (const CoefficientEscape& e) {
    CHECK(e.defect() > 0.5);
  }
}

TEST_CASE("reduce refuses a system that is not a coefficient algebra") {
  const ComplexMatrix e12 = oracle::unit(2, 0, 1);
  const auto sys = make_system(generate_closure(2, {e12}), e12);
  CHECK_THROWS_AS(reduce(parse("U", {}), sys), NotCoefficientAlgebra);
}

TEST_CASE("left coefficients move delta_* onto negative degrees") {
  const auto sys = cyclic_system();
  GeneratorTable t;
  t.emplace("d", oracle::diag({1.0, 2.0, 4.0}));
  const NormalForm x = reduce(parse("U'*d", t), sys);
  const auto left = left_coefficients(x);
  // U* d = delta_*(d) U*
  const ComplexMatrix expected = sys->delta_star(oracle::diag({1.0, 2.0, 4.0}));
  CHECK(oracle::norm(left.at(-1) * sys->Ustar() - eval(x)) < 1e-14);
  CHECK(oracle::norm(left.at(-1) - expected) < 1e-14);
}

TEST_CASE("small coefficients are dropped relative to the operands") {
  const auto sys = cyclic_system();
  NormalForm::Terms terms{{0, ComplexMatrix::Identity(3, 3)}, {1, 1e-15 * ComplexMatrix::Identity(3, 3)}};
  const NormalForm x(sys, terms);
  CHECK(x.terms().size() == 1);
  const NormalForm z = nf_subtract(x, x);
  CHECK(z.empty());
  CHECK(eval(z).norm() == 0.0);
}
