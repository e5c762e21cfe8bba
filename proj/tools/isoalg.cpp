// isoalg: batch front-end over the model checks.
//
//   isoalg run --model M.json [--checks LIST|all] [--tol T] [--seed S] ...
//   isoalg nf --model M.json --expr "U*absa*U'"
//   isoalg norm-limit --model M.json [--expr E] [--k-max K]
//   isoalg closure --model M.json
//   isoalg polar --matrix A.json
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isoalg/isoalg.hpp"

namespace {

using isoalg::Json;

int emit(const Json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "isoalg: cannot write '" << out_path << "'\n";
      return 2;
    }
    out << text;
  }
  return 0;
}

isoalg::LoadedModel load(const std::string& path, double tol) {
  return isoalg::load_model(isoalg::model_spec_from_json(isoalg::read_json_file(path)), tol);
}

// NAME=PATH pairs from --gen.
void add_generators(isoalg::GeneratorTable& table, const std::vector<std::string>& pairs) {
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw isoalg::ConfigError("--gen expects NAME=PATH, got '" + p + "'");
    const std::string name = p.substr(0, eq);
    if (name == "U") throw isoalg::ConfigError("'U' is reserved");
    table.insert_or_assign(name, isoalg::matrix_from_json(isoalg::read_json_file(p.substr(eq + 1))));
  }
}

std::string expression_text(const std::string& expr, const std::string& expr_file) {
  if (!expr_file.empty()) return isoalg::read_text_file(expr_file);
  return expr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks for algebras generated by a *-algebra and a partial isometry"};
  app.require_subcommand(1);

  double tol = 0.0;
  std::string model_path, out_path;

  isoalg::RunConfig cfg;
  std::vector<std::string> checks{"all"};
  std::size_t n_max = 0;
  auto* run = app.add_subcommand("run", "run checks on a model and print a JSON report");
  run->add_option("--model", model_path, "model spec JSON")->required();
  run->add_option("--checks", checks, "comma-separated check names, or 'all'")->delimiter(',');
  run->add_option("--tol", tol, "tolerance (default 1e-9 or ISOALG_TOL)");
  run->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  run->add_option("--k-max", cfg.k_max, "largest power / norm-limit k")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--n-max", n_max, "chain length for tower checks (default 2 dim + 2)");
  run->add_option("--samples", cfg.samples, "random samples per sampling check")->capture_default_str();
  run->add_option("--out", out_path, "output file (default stdout)");

  std::string expr, expr_file;
  std::vector<std::string> gens;
  auto* nf = app.add_subcommand("nf", "reduce an expression to normal form");
  nf->add_option("--model", model_path, "model spec JSON")->required();
  auto* expr_opt = nf->add_option("--expr", expr, "expression, e.g. \"U*absa*U'\"");
  nf->add_option("--expr-file", expr_file, "file holding the expression")->excludes(expr_opt);
  nf->add_option("--gen", gens, "extra generator NAME=PATH (matrix JSON)");
  nf->add_option("--tol", tol, "tolerance");
  nf->add_option("--out", out_path, "output file (default stdout)");

  int k_max = 8;
  std::uint64_t seed = 0;
  auto* nl = app.add_subcommand("norm-limit", "norm limit trace of an expression or a random element");
  nl->add_option("--model", model_path, "model spec JSON")->required();
  nl->add_option("--expr", expr, "expression (default: random element)");
  nl->add_option("--gen", gens, "extra generator NAME=PATH");
  nl->add_option("--k-max", k_max, "largest k")->capture_default_str()->check(CLI::PositiveNumber);
  nl->add_option("--seed", seed, "seed for the random element")->capture_default_str();
  nl->add_option("--tol", tol, "tolerance");
  nl->add_option("--out", out_path, "output file (default stdout)");

  auto* cl = app.add_subcommand("closure", "dimensions of the extension towers");
  cl->add_option("--model", model_path, "model spec JSON")->required();
  cl->add_option("--tol", tol, "tolerance");
  cl->add_option("--out", out_path, "output file (default stdout)");

  std::string matrix_path;
  auto* po = app.add_subcommand("polar", "polar decomposition of a matrix");
  po->add_option("--matrix", matrix_path, "matrix JSON")->required();
  po->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (tol == 0.0) tol = isoalg::default_tolerance();
    if (!(tol > 0.0)) throw isoalg::ConfigError("--tol must be positive");

    if (*run) {
      cfg.model = isoalg::model_spec_from_json(isoalg::read_json_file(model_path));
      cfg.checks = checks;
      cfg.tol = tol;
      cfg.n_max = n_max;
      const isoalg::RunResult r = isoalg::run(cfg);
      if (const int c = emit(r.report, out_path)) return c;
      return r.exit_code;
    }

    if (*nf || *nl) {
      isoalg::LoadedModel m = load(model_path, tol);
      add_generators(m.generators, gens);
      const std::string text = expression_text(expr, expr_file);
      if (*nf) {
        if (text.empty()) throw isoalg::ConfigError("nf needs --expr or --expr-file");
        const isoalg::NormalForm x = isoalg::reduce(isoalg::parse(text, m.generators), m.system);
        Json j{{"expr", text}, {"normal_form", isoalg::normal_form_to_json(x)}};
        return emit(j, out_path);
      }
      isoalg::Rng rng(seed);
      const isoalg::NormalForm x = text.empty() ? isoalg::random_normal_form(m.system, rng)
                                                : isoalg::reduce(isoalg::parse(text, m.generators), m.system);
      isoalg::NormLimitTrace t = isoalg::norm_limit(x, k_max);
      const isoalg::ConditionReport bounds = isoalg::check_norm_trace(t, tol);
      Json j{{"expr", text.empty() ? Json(nullptr) : Json(text)},
             {"trace", isoalg::trace_to_json(t)},
             {"bounds", isoalg::report_to_json(bounds)}};
      if (const int c = emit(j, out_path)) return c;
      return bounds.pass() ? 0 : 1;
    }

    if (*cl) {
      const isoalg::LoadedModel m = load(model_path, tol);
      const auto& sys = *m.base;
      const auto& a0 = sys.algebra();
      using isoalg::Direction;
      const auto e = isoalg::delta_tower(sys, a0, Direction::Forward);
      const auto es = isoalg::delta_tower(sys, a0, Direction::Backward);
      const auto ese = isoalg::delta_tower(sys, e, Direction::Backward);
      const auto ees = isoalg::delta_tower(sys, es, Direction::Forward);
      Json j{{"ambient_dim", sys.dim()},
             {"A0", a0.dimension()},
             {"E(A0)", e.dimension()},
             {"E_*(A0)", es.dimension()},
             {"E_*(E(A0))", ese.dimension()},
             {"E(E_*(A0))", ees.dimension()},
             {"coefficient_algebra", m.system->algebra().dimension()}};
      return emit(j, out_path);
    }

    if (*po) {
      const isoalg::ComplexMatrix a = isoalg::matrix_from_json(isoalg::read_json_file(matrix_path));
      const isoalg::PolarDecomposition pd = isoalg::polar_decompose(a);
      const double scale = std::max(1.0, isoalg::spectral_norm(a));
      Json j{{"U", isoalg::matrix_to_json(pd.U)},
             {"abs_a", isoalg::matrix_to_json(pd.abs_a)},
             {"residual", isoalg::spectral_norm(a - pd.U * pd.abs_a) / scale},
             {"partial_isometry", isoalg::report_to_json(isoalg::is_partial_isometry(pd.U))}};
      return emit(j, out_path);
    }
  } catch (const isoalg::ConfigError& e) {
    std::cerr << "isoalg: " << e.what() << "\n";
    return 2;
  } catch (const isoalg::SyntaxError& e) {
    std::cerr << "isoalg: " << e.what() << "\n";
    return 2;
  } catch (const isoalg::UnknownGenerator& e) {
    std::cerr << "isoalg: " << e.what() << "\n";
    return 2;
  } catch (const isoalg::DimensionMismatch& e) {
    std::cerr << "isoalg: " << e.what() << "\n";
    return 2;
  } catch (const isoalg::Error& e) {
    std::cerr << "isoalg: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
