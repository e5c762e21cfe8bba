#pragma once

// JSON encodings.
//
//   matrix:      {"dim": n, "entries": [[[re, im], ...], ...]}   rows first;
//                a plain number is accepted for a real entry
//   report:      {"name", "pass", "defects": [{"check", "value", "limit"}], "notes"}
//   normal form: {"degrees": [{"k": k, "coeff": matrix}, ...]}
//   model spec:  {"type": "polar", "a": matrix}
//                {"type": "qdeform", "n": int, "q": real,
//                 "rho": "heisenberg" | "sl2" | {"samples": [real, ...]}}
//                {"type": "system", "U": matrix, "generators": [matrix, ...],
//                 "extend": bool}

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "isoalg/errors.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/models.hpp"
#include "isoalg/norm_engine.hpp"
#include "isoalg/normal_form.hpp"
#include "isoalg/report.hpp"

namespace isoalg {

using Json = nlohmann::ordered_json;

/// Malformed input file or spec.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite doubles become null; JSON has no NaN or infinity.
inline Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({number(m(i, j).real()), number(m(i, j).imag())}));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", m.rows()}, {"entries", std::move(rows)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  try {
    const Json& entries = j.is_object() ? j.at("entries") : j;
    if (!entries.is_array() || entries.empty()) throw ConfigError("matrix needs a non-empty 'entries' array");
    const auto n = static_cast<Eigen::Index>(entries.size());
    if (j.is_object() && j.contains("dim") && j.at("dim").get<Eigen::Index>() != n) {
      throw ConfigError("matrix 'dim' does not match the number of rows");
    }
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = entries.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ConfigError("matrix row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        const Json& e = row.at(static_cast<std::size_t>(c));
        if (e.is_number()) {
          m(r, c) = Complex(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
          m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
          throw ConfigError("matrix entry must be a number or [re, im]");
        }
      }
    }
    return m;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed matrix: ") + e.what());
  }
}

inline Json algebra_to_json(const FiniteStarAlgebra& alg) {
  Json basis = Json::array();
  for (const auto& b : alg.basis()) basis.push_back(matrix_to_json(b));
  return Json{{"ambient_dim", alg.ambient_dim()}, {"dimension", alg.dimension()}, {"basis", std::move(basis)}};
}

/// The stored matrices are used as generators and the closure is rebuilt.
inline FiniteStarAlgebra algebra_from_json(const Json& j, double tol = kDefaultTolerance) {
  const Json& list = j.is_object() ? j.at("basis") : j;
  std::vector<ComplexMatrix> gens;
  for (const auto& m : list) gens.push_back(matrix_from_json(m));
  if (gens.empty()) throw ConfigError("algebra needs at least one matrix");
  return generate_closure(static_cast<std::size_t>(gens.front().rows()), std::span<const ComplexMatrix>(gens), tol);
}

inline Json report_to_json(const ConditionReport& r) {
  Json defects = Json::array();
  for (const auto& d : r.defects()) {
    defects.push_back(Json{{"check", d.check}, {"value", number(d.value)}, {"limit", number(d.limit)}});
  }
  return Json{{"name", r.name()}, {"pass", r.pass()}, {"defects", std::move(defects)}, {"notes", r.notes()}};
}

inline Json normal_form_to_json(const NormalForm& x) {
  Json degrees = Json::array();
  for (const auto& [k, a] : x.terms()) degrees.push_back(Json{{"k", k}, {"coeff", matrix_to_json(a)}});
  return Json{{"degrees", std::move(degrees)}};
}

inline Json trace_to_json(const NormLimitTrace& t) {
  Json s = Json::array(), up = Json::array();
  for (double v : t.s_values) s.push_back(number(v));
  for (double v : t.upper_values) up.push_back(number(v));
  return Json{{"max_degree", t.max_degree},
              {"direct_norm", number(t.direct_norm)},
              {"k", t.k_values},
              {"s", std::move(s)},
              {"upper", std::move(up)},
              {"sandwich_lo", number(t.sandwich_lo)},
              {"sandwich_hi", number(t.sandwich_hi)},
              {"property_star", t.property_star}};
}

struct PolarSpec {
  ComplexMatrix a;
};

struct QDeformSpec {
  std::size_t n = 0;
  double q = 0.0;
  std::string rho_kind;        // heisenberg, sl2 or samples
  std::vector<double> samples;  // only for rho_kind == samples
};

struct SystemSpec {
  ComplexMatrix U;
  std::vector<ComplexMatrix> generators;
  bool extend = false;
};

using ModelSpec = std::variant<PolarSpec, QDeformSpec, SystemSpec>;

inline std::string model_type(const ModelSpec& spec) {
  switch (spec.index()) {
    case 0: return "polar";
    case 1: return "qdeform";
    default: return "system";
  }
}

inline ModelSpec model_spec_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ConfigError("model spec must be a JSON object");
    const std::string type = j.at("type").get<std::string>();
    if (type == "polar") return PolarSpec{matrix_from_json(j.at("a"))};
    if (type == "qdeform") {
      QDeformSpec s;
      const auto n = j.at("n").get<long long>();
      if (n < 2) throw ConfigError("qdeform 'n' must be >= 2");
      s.n = static_cast<std::size_t>(n);
      s.q = j.at("q").get<double>();
      if (!(s.q > 0.0 && s.q < 1.0)) throw ConfigError("qdeform 'q' must lie in (0, 1)");
      const Json& rho = j.contains("rho") ? j.at("rho") : Json("heisenberg");
      if (rho.is_string()) {
        s.rho_kind = rho.get<std::string>();
        if (s.rho_kind != "heisenberg" && s.rho_kind != "sl2") {
          throw ConfigError("unknown rho '" + s.rho_kind + "' (expected heisenberg, sl2 or {\"samples\": [...]})");
        }
      } else {
        s.rho_kind = "samples";
        s.samples = rho.at("samples").get<std::vector<double>>();
      }
      return s;
    }
    if (type == "system") {
      SystemSpec s;
      s.U = matrix_from_json(j.at("U"));
      for (const auto& g : j.at("generators")) s.generators.push_back(matrix_from_json(g));
      s.extend = j.value("extend", false);
      return s;
    }
    throw ConfigError("unknown model type '" + type + "' (expected polar, qdeform or system)");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed model spec: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace isoalg
