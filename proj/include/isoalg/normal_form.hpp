#pragma once

// Canonical finite Fourier-like sums
//
//   x = U*^N a_{-N} + ... + U* a_{-1} + a_0 + a_1 U + ... + a_N U^N
//
// with coefficients in a coefficient algebra.  Positive degrees carry the
// coefficient on the left of U^k, negative degrees on the right of U*^k.
// Stored coefficients are normalized: a_k U^k U*^k = a_k for k > 0 and
// U^k U*^k a_{-k} = a_{-k}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "isoalg/conditions.hpp"
#include "isoalg/errors.hpp"
#include "isoalg/expression.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/star_algebra.hpp"

namespace isoalg {

/// Relative threshold below which a coefficient is dropped as zero.
inline constexpr double kZeroCoefficient = 1e-13;

class NormalForm {
 public:
  using Terms = std::map<int, ComplexMatrix>;

  explicit NormalForm(SystemPtr system) : system_(std::move(system)) {
    if (!system_) throw SystemMismatch("normal form needs a system");
  }

  /// Normalizes the given coefficients and drops those with Frobenius norm
  /// <= zero_tol * scale.  A non-positive scale means the largest input norm.
  NormalForm(SystemPtr system, Terms terms, double zero_tol = kZeroCoefficient, double scale = 0.0)
      : NormalForm(std::move(system)) {
    double largest = 0.0;
    for (auto& [k, a] : terms) {
      if (a.rows() != static_cast<Eigen::Index>(system_->dim()) || a.cols() != a.rows()) {
        throw DimensionMismatch("coefficient at degree " + std::to_string(k) + " has wrong dimension");
      }
      a = normalized(k, a);
      const double norm = frobenius_norm(a);
      if (!std::isfinite(norm)) throw Overflow("coefficient at degree " + std::to_string(k) + " is not finite");
      largest = std::max(largest, norm);
    }
    const double threshold = zero_tol * (scale > 0.0 ? scale : largest);
    for (auto& [k, a] : terms) {
      if (frobenius_norm(a) > threshold) terms_.emplace(k, std::move(a));
    }
  }

  static NormalForm identity(SystemPtr system) {
    const std::size_t n = system->dim();
    return NormalForm(std::move(system), Terms{{0, isoalg::identity(n)}});
  }

  const IsometrySystem& system() const { return *system_; }
  const SystemPtr& system_ptr() const { return system_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Largest |k| with a stored coefficient; 0 for the empty form.
  int max_degree() const {
    int n = 0;
    for (const auto& [k, a] : terms_) n = std::max(n, std::abs(k));
    return n;
  }

  double max_coefficient_norm() const {
    double m = 0.0;
    for (const auto& [k, a] : terms_) m = std::max(m, frobenius_norm(a));
    return m;
  }

  /// a U^k U*^k for k > 0, U^|k| U*^|k| a for k < 0.
  ComplexMatrix normalized(int k, const ComplexMatrix& a) const {
    if (k > 0) return a * system_->final_projection(static_cast<std::size_t>(k));
    if (k < 0) return system_->final_projection(static_cast<std::size_t>(-k)) * a;
    return a;
  }

 private:
  SystemPtr system_;
  Terms terms_;
};

namespace detail {

inline void require_same_system(const NormalForm& x, const NormalForm& y) {
  if (x.system_ptr() != y.system_ptr()) throw SystemMismatch("normal forms belong to different systems");
}

inline void accumulate(NormalForm::Terms& out, int k, ComplexMatrix m) {
  auto [it, inserted] = out.try_emplace(k, std::move(m));
  if (!inserted) it->second += m;
}

}  // namespace detail

inline ComplexMatrix coefficient(const NormalForm& x, int k) {
  auto it = x.terms().find(k);
  if (it == x.terms().end()) return zero_matrix(x.system().dim());
  return it->second;
}

inline NormalForm nf_add(const NormalForm& x, const NormalForm& y) {
  detail::require_same_system(x, y);
  NormalForm::Terms out = x.terms();
  for (const auto& [k, a] : y.terms()) detail::accumulate(out, k, a);
  const double scale = std::max(x.max_coefficient_norm(), y.max_coefficient_norm());
  return NormalForm(x.system_ptr(), std::move(out), kZeroCoefficient, scale);
}

inline NormalForm nf_scale(const NormalForm& x, Complex c) {
  NormalForm::Terms out = x.terms();
  for (auto& [k, a] : out) a *= c;
  return NormalForm(x.system_ptr(), std::move(out));
}

inline NormalForm nf_subtract(const NormalForm& x, const NormalForm& y) {
  return nf_add(x, nf_scale(y, -1.0));
}

/// Degree k <-> -k with adjoint coefficients: (a U^k)* = U*^k a*.
inline NormalForm nf_adjoint(const NormalForm& x) {
  NormalForm::Terms out;
  for (const auto& [k, a] : x.terms()) out.emplace(-k, a.adjoint());
  return NormalForm(x.system_ptr(), std::move(out));
}

namespace detail {

/// Product of two monomials, returned as (degree, coefficient).  Positive
/// degree: coefficient a of a U^k; negative degree: coefficient b of U*^k b.
inline std::pair<int, ComplexMatrix> monomial_product(const IsometrySystem& sys, int k,
                                                      const ComplexMatrix& a, int l,
                                                      const ComplexMatrix& b) {
  const auto uk = static_cast<std::size_t>(std::abs(k));
  const auto ul = static_cast<std::size_t>(std::abs(l));
  if (k >= 0 && l >= 0) {
    // a U^k b U^l = a delta^k(b) U^{k+l}
    return {k + l, a * sys.delta(b, uk)};
  }
  if (k <= 0 && l <= 0) {
    // U*^k a U*^l b = U*^{k+l} delta^l(a) b
    return {k + l, sys.delta(a, ul) * b};
  }
  if (k > 0) {
    // a U^k U*^l b
    if (uk >= ul) {
      // = a delta^k(1) delta^{k-l}(b) U^{k-l}
      return {k + l, a * sys.final_projection(uk) * sys.delta(b, uk - ul)};
    }
    // = U*^{l-k} delta^{l-k}(a) delta^l(1) b
    return {k + l, sys.delta(a, ul - uk) * sys.final_projection(ul) * b};
  }
  // U*^k (a b) U^l
  const ComplexMatrix c = a * b;
  if (uk >= ul) {
    // = U*^{k-l} delta_*^l(c)
    return {k + l, sys.delta_star(c, ul)};
  }
  // = delta_*^k(c) U^{l-k}
  return {k + l, sys.delta_star(c, uk)};
}

}  // namespace detail

/// Product in canonical form; every pair of monomials is rewritten with the
/// intertwining rules and the result renormalized.
inline NormalForm nf_multiply(const NormalForm& x, const NormalForm& y) {
  detail::require_same_system(x, y);
  const auto& sys = x.system();
  NormalForm::Terms out;
  for (const auto& [k, a] : x.terms()) {
    for (const auto& [l, b] : y.terms()) {
      auto [deg, c] = detail::monomial_product(sys, k, a, l, b);
      detail::accumulate(out, deg, std::move(c));
    }
  }
  const double scale = x.max_coefficient_norm() * y.max_coefficient_norm();
  return NormalForm(x.system_ptr(), std::move(out), kZeroCoefficient, scale);
}

/// Sum of the matrices of all terms.
inline ComplexMatrix eval(const NormalForm& x) {
  const auto& sys = x.system();
  ComplexMatrix out = zero_matrix(sys.dim());
  for (const auto& [k, a] : x.terms()) {
    if (k >= 0) {
      out += a * sys.power(static_cast<std::size_t>(k));
    } else {
      out += sys.star_power(static_cast<std::size_t>(-k)) * a;
    }
  }
  return out;
}

/// Substitutes U -> lambda U: the degree-k coefficient picks up lambda^k.
inline NormalForm gauge(const NormalForm& x, Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
    throw NotUnimodular("gauge parameter must have modulus 1, got " + std::to_string(std::abs(lambda)));
  }
  NormalForm::Terms out;
  for (const auto& [k, a] : x.terms()) out.emplace(k, a * std::pow(lambda, k));
  return NormalForm(x.system_ptr(), std::move(out));
}

inline Complex root_of_unity(std::size_t j, std::size_t m) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
  return {std::cos(angle), std::sin(angle)};
}

/// Discrete Fourier extraction of the degree-k part of x over the M-th roots
/// of unity, then stripped of its U power using the normalization:
/// (a U^k) U*^k = a and U^k (U*^k a) = a.
inline ComplexMatrix gauge_average(const NormalForm& x, int k, std::size_t m) {
  if (m <= static_cast<std::size_t>(2 * x.max_degree())) {
    throw InsufficientResolution("need more than " + std::to_string(2 * x.max_degree()) +
                                 " roots of unity, got " + std::to_string(m));
  }
  const auto& sys = x.system();
  ComplexMatrix avg = zero_matrix(sys.dim());
  for (std::size_t j = 0; j < m; ++j) {
    const Complex lambda = root_of_unity(j, m);
    avg += std::pow(lambda, -k) * eval(gauge(x, lambda));
  }
  avg /= static_cast<double>(m);
  const auto uk = static_cast<std::size_t>(std::abs(k));
  if (k > 0) return avg * sys.star_power(uk);
  if (k < 0) return sys.power(uk) * avg;
  return avg;
}

/// Coefficients for the left-placed form a_{-k} U*^k, available only when
/// U* a = delta_*(a) U* holds on the algebra.  Returns the map degree ->
/// coefficient with negative degrees rewritten as delta_*^k(a).
inline NormalForm::Terms left_coefficients(const NormalForm& x) {
  const auto& sys = x.system();
  ConditionReport report("adjoint-intertwining");
  double worst = 0.0;
  const ComplexMatrix ustar = sys.Ustar();
  for (const auto& a : sys.algebra().basis()) {
    worst = std::max(worst, spectral_norm(ustar * a - sys.delta_star(a) * ustar));
  }
  report.record("U*a = delta_*(a)U*", worst, sys.tol());
  if (!report.pass()) throw HypothesisViolated(std::move(report));
  NormalForm::Terms out;
  for (const auto& [k, a] : x.terms()) {
    out.emplace(k, k < 0 ? sys.delta_star(a, static_cast<std::size_t>(-k)) : a);
  }
  return out;
}

/// Reduces a parsed expression to canonical form.  Refuses systems whose
/// algebra is not a coefficient algebra.
inline NormalForm reduce(const Expression& e, const SystemPtr& system) {
  ConditionReport check = check_coefficient_algebra(*system);
  if (!check.pass()) throw NotCoefficientAlgebra(std::move(check));
  const std::size_t n = system->dim();

  auto walk = [&](auto&& self, const Expression& node) -> NormalForm {
    switch (node.kind) {
      case Expression::Kind::Generator: {
        if (node.value.rows() != static_cast<Eigen::Index>(n) || node.value.cols() != node.value.rows()) {
          throw DimensionMismatch("generator '" + node.name + "' has wrong dimension");
        }
        const Membership m = contains(system->algebra(), node.value);
        if (!m.inside) {
          throw CoefficientEscape("generator '" + node.name + "' is not in the coefficient algebra", 0,
                                  m.defect);
        }
        return NormalForm(system, NormalForm::Terms{{0, node.value}});
      }
      case Expression::Kind::U:
        return NormalForm(system, NormalForm::Terms{{1, identity(n)}});
      case Expression::Kind::Scalar:
        return NormalForm(system, NormalForm::Terms{{0, identity(n) * node.scalar}});
      case Expression::Kind::Adjoint:
        return nf_adjoint(self(self, node.children.front()));
      case Expression::Kind::Sum: {
        NormalForm acc(system);
        for (const auto& c : node.children) acc = nf_add(acc, self(self, c));
        return acc;
      }
      case Expression::Kind::Product: {
        NormalForm acc = self(self, node.children.front());
        for (std::size_t i = 1; i < node.children.size(); ++i) acc = nf_multiply(acc, self(self, node.children[i]));
        return acc;
      }
    }
    throw SyntaxError("malformed expression tree", node.position);
  };

  NormalForm out = walk(walk, e);
  for (const auto& [k, a] : out.terms()) {
    const Membership m = contains(system->algebra(), a);
    if (!m.inside) {
      throw CoefficientEscape("coefficient at degree " + std::to_string(k) + " left the algebra", k,
                              m.defect);
    }
  }
  return out;
}

}  // namespace isoalg
