#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "isoalg/io.hpp"
#include "isoalg/runner.hpp"
#include "oracles.hpp"

using namespace isoalg;

namespace {

Json check_named(const Json& report, const std::string& name) {
  for (const auto& c : report.at("checks")) {
    if (c.at("name") == name) return c;
  }
  return nullptr;
}

RunConfig config(ModelSpec spec, std::size_t samples = 20) {
  RunConfig cfg;
  cfg.model = std::move(spec);
  cfg.samples = samples;
  cfg.seed = 3;
  return cfg;
}

ComplexMatrix nilpotent() { return 2.0 * oracle::unit(2, 0, 1); }

}  // namespace

TEST_CASE("matrix JSON round trip") {
  std::mt19937_64 rng(1);
  const ComplexMatrix m = oracle::random_matrix(3, rng);
  const ComplexMatrix back = matrix_from_json(Json::parse(matrix_to_json(m).dump()));
  CHECK(back == m);
  CHECK(matrix_from_json(Json::parse(R"({"entries": [[1, 0], [0, 2]]})")) == oracle::diag({1.0, 2.0}));
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"entries": [[1, 0], [0]]})")), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"dim": 3, "entries": [[1]]})")), ConfigError);
}

TEST_CASE("model specs parse and reject bad input") {
  CHECK(model_type(model_spec_from_json(Json::parse(R"({"type":"qdeform","n":4,"q":0.5})"))) == "qdeform");
  const auto s = model_spec_from_json(Json::parse(R"({"type":"qdeform","n":3,"q":0.5,"rho":{"samples":[0,1,1.5,1.75]}})"));
  CHECK(std::get<QDeformSpec>(s).samples.size() == 4);
  CHECK_THROWS_AS(model_spec_from_json(Json::parse(R"({"type":"torus"})")), ConfigError);
  CHECK_THROWS_AS(model_spec_from_json(Json::parse(R"({"type":"qdeform","n":4,"q":2})")), ConfigError);
  CHECK_THROWS_AS(model_spec_from_json(Json::parse(R"({"type":"qdeform","n":4,"q":0.5,"rho":"cubic"})")), ConfigError);
  CHECK_THROWS_AS(model_spec_from_json(Json::parse(R"({"type":"polar"})")), ConfigError);
}

TEST_CASE("algebra JSON rebuilds the closure") {
  const FiniteStarAlgebra a = generate_closure(3, {oracle::diag({1.0, 2.0, 3.0})});
  const FiniteStarAlgebra b = algebra_from_json(algebra_to_json(a));
  CHECK(same_span(a, b));
}

TEST_CASE("full run on the polar model passes") {
  const RunResult r = run(config(PolarSpec{nilpotent()}));
  CHECK(r.exit_code == 0);
  CHECK(r.report.at("pass") == true);
  CHECK(r.report.at("checks").size() == 16);
  CHECK(r.report.contains("norm_limit_traces"));
}

TEST_CASE("runs are deterministic given the seed") {
  const RunConfig cfg = config(QDeformSpec{6, 0.5, "heisenberg", {}}, 10);
  CHECK(run(cfg).report.dump() == run(cfg).report.dump());
  RunConfig other = cfg;
  other.seed = 4;
  CHECK(run(other).report.dump() != run(cfg).report.dump());
}

TEST_CASE("unknown or inapplicable checks are configuration errors") {
  RunConfig cfg = config(PolarSpec{nilpotent()});
  cfg.checks = {"bogus"};
  try {
    (void)run(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("registered checks: model") != std::string::npos);
  }
  cfg.checks = {"qdeform-suite"};
  CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("requesting a check pulls in its prerequisites") {
  RunConfig cfg = config(PolarSpec{nilpotent()});
  cfg.checks = {"tower-commutation"};
  const RunResult r = run(cfg);
  std::vector<std::string> names;
  for (const auto& c : r.report.at("checks")) names.push_back(c.at("name"));
  CHECK(names == std::vector<std::string>{"model", "partial-isometry", "intertwining", "initial-projection",
                                          "commutative-extension", "tower-commutation"});
}

TEST_CASE("non-central initial projection fails intertwining and its dependents only") {
  const ComplexMatrix e12 = oracle::unit(2, 0, 1);
  const RunResult r = run(config(SystemSpec{e12, {e12}, false}));
  CHECK(r.exit_code == 1);
  for (const auto& name : {"model", "partial-isometry", "sum-norm-inequalities"}) CHECK(check_named(r.report, name).at("pass") == true);
  CHECK(check_named(r.report, "intertwining").at("pass") == false);
  const Json skipped = check_named(r.report, "tower-commutation");
  CHECK(skipped.at("pass") == false);
  CHECK(skipped.at("notes").at(0) == "skipped: prerequisite commutative-extension failed");
}

TEST_CASE("constant rho fails the rho condition and the relations suite only") {
  const RunResult r = run(config(QDeformSpec{4, 0.5, "samples", {1, 1, 1, 1, 1}}));
  CHECK(r.exit_code == 1);
  for (const auto& c : r.report.at("checks")) {
    const std::string name = c.at("name");
    const bool expect_fail = name == "rho-condition" || name == "qdeform-suite";
    CHECK(c.at("pass") == !expect_fail);
  }
}

TEST_CASE("aa* outside A0 fails at model construction") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  const RunResult r = run(config(PolarSpec{a}));
  CHECK(r.exit_code == 1);
  const Json model = check_named(r.report, "model");
  CHECK(model.at("pass") == false);
  CHECK(model.at("notes").at(0).get<std::string>().rfind("model construction failed", 0) == 0);
  CHECK(check_named(r.report, "sum-norm-inequalities").at("pass") == true);
  CHECK(check_named(r.report, "polar-suite").at("notes").at(0) == "skipped: prerequisite model failed");
}

TEST_CASE("ISOALG_TOL overrides the default tolerance") {
  ::setenv("ISOALG_TOL", "1e-7", 1);
  CHECK(default_tolerance() == 1e-7);
  ::setenv("ISOALG_TOL", "abc", 1);
  CHECK_THROWS_AS(default_tolerance(), ConfigError);
  ::unsetenv("ISOALG_TOL");
  CHECK(default_tolerance() == kDefaultTolerance);
}

TEST_CASE("non-finite values serialize as null") {
  ConditionReport r("x");
  r.record("nan", std::nan(""), 1.0);
  const Json j = report_to_json(r);
  CHECK(j.at("defects").at(0).at("value").is_null());
  CHECK(j.at("pass") == false);
}
