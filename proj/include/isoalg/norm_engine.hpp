#pragma once

// Sampling checks on normal forms: coefficient bounds, the sum-norm
// inequalities, the norm limit through degree-zero parts of powers of xx*,
// and gauge invariance of the norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "isoalg/conditions.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/normal_form.hpp"
#include "isoalg/report.hpp"
#include "isoalg/star_algebra.hpp"

namespace isoalg {

using Rng = std::mt19937_64;

inline ComplexMatrix random_gaussian_matrix(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

/// Random element with all degrees in [-N, N], N uniform in [0, max_degree];
/// coefficients are complex Gaussian matrices projected into the algebra.
inline NormalForm random_normal_form(const SystemPtr& system, Rng& rng, int max_degree = 4) {
  std::uniform_int_distribution<int> pick(0, std::max(0, max_degree));
  const int n = pick(rng);
  NormalForm::Terms terms;
  for (int k = -n; k <= n; ++k) {
    terms.emplace(k, system->algebra().project(random_gaussian_matrix(system->dim(), rng)));
  }
  return NormalForm(system, std::move(terms));
}

/// Checks ||a_k|| <= ||x|| for every stored degree on random samples.  The
/// defect is the worst excess max(0, ||a_k|| - ||x||).
inline ConditionReport property_star_sample(const SystemPtr& system, std::size_t samples,
                                            std::uint64_t seed, double tol) {
  ConditionReport report("property-star");
  const ConditionReport coeff = check_coefficient_algebra(*system, tol);
  if (!coeff.pass()) report.fail("algebra is not a coefficient algebra; samples are not meaningful");

  Rng rng(seed);
  double excess0 = 0.0;
  double excess = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const NormalForm x = random_normal_form(system, rng);
    const double norm = spectral_norm(eval(x));
    for (const auto& [k, a] : x.terms()) {
      const double ak = spectral_norm(a);
      const double over = std::max(0.0, ak - norm);
      if (k == 0) excess0 = std::max(excess0, over);
      excess = std::max(excess, over);
      margin = std::min(margin, norm - ak);
      if (over > tol) ++violations;
    }
  }
  report.record("||a_0|| <= ||x||", excess0, tol);
  report.record("||a_k|| <= ||x||", excess, tol);
  report.note("samples " + std::to_string(samples) + ", violations " + std::to_string(violations));
  if (std::isfinite(margin)) report.note("worst margin ||x|| - ||a_k|| = " + std::to_string(margin));
  return report;
}

/// The four sum-norm inequalities for d_1..d_m:
///   ||sum d||^2 <= m ||sum d d*||,       ||sum d||^2 <= m ||sum d* d||,
///   ||sum |d|||^2 >= ||sum d* d|| / m,   ||sum |d*|||^2 >= ||sum d d*|| / m.
/// Defects are violations relative to the larger side.
inline ConditionReport sum_norm_inequalities(const std::vector<ComplexMatrix>& d, double tol) {
  if (d.empty()) throw DimensionMismatch("need at least one matrix");
  for (const auto& x : d) {
    require_square(x);
    require_same_dim(x, d.front());
  }
  const auto m = static_cast<double>(d.size());
  const std::size_t n = static_cast<std::size_t>(d.front().rows());
  ComplexMatrix sum = zero_matrix(n), ddstar = zero_matrix(n), dstard = zero_matrix(n);
  ComplexMatrix abs_sum = zero_matrix(n), abs_star_sum = zero_matrix(n);
  for (const auto& x : d) {
    sum += x;
    ddstar += x * x.adjoint();
    dstard += x.adjoint() * x;
    abs_sum += psd_sqrt(x.adjoint() * x);
    abs_star_sum += psd_sqrt(x * x.adjoint());
  }
  auto at_most = [](double lhs, double rhs) {
    const double scale = std::max({lhs, rhs, 1e-300});
    return std::max(0.0, lhs - rhs) / scale;
  };
  const double s2 = std::pow(spectral_norm(sum), 2);
  ConditionReport report("sum-norm-inequalities");
  report.record("||sum d||^2 <= m ||sum dd*||", at_most(s2, m * spectral_norm(ddstar)), tol);
  report.record("||sum d||^2 <= m ||sum d*d||", at_most(s2, m * spectral_norm(dstard)), tol);
  report.record("||sum |d|||^2 >= ||sum d*d|| / m",
                at_most(spectral_norm(dstard) / m, std::pow(spectral_norm(abs_sum), 2)), tol);
  report.record("||sum |d*|||^2 >= ||sum dd*|| / m",
                at_most(spectral_norm(ddstar) / m, std::pow(spectral_norm(abs_star_sum), 2)), tol);
  return report;
}

struct NormLimitTrace {
  std::vector<int> k_values;
  std::vector<double> s_values;      // ||N0[(xx*)^(2k)]||^(1/4k)
  std::vector<double> upper_values;  // (4kN+1)^(1/4k) s_k
  double direct_norm = 0.0;
  double sandwich_lo = 0.0;  // ||N0(xx*)||
  double sandwich_hi = 0.0;  // (2N+1) ||N0(xx*)||
  int max_degree = 0;
  std::string property_star = "unchecked";
};

/// Degree-zero parts of (xx*)^(2k) for k = 1, 2, 4, ... <= k_max, computed by
/// repeated squaring of yy* with y = x / ||x||; results are scaled back.
inline NormLimitTrace norm_limit(const NormalForm& x, int k_max) {
  NormLimitTrace trace;
  trace.direct_norm = spectral_norm(eval(x));
  trace.max_degree = x.max_degree();
  if (!std::isfinite(trace.direct_norm)) throw Overflow("norm of x is not finite");
  const double big_n = trace.max_degree;
  if (trace.direct_norm == 0.0) {
    for (int k = 1; k <= k_max; k *= 2) {
      trace.k_values.push_back(k);
      trace.s_values.push_back(0.0);
      trace.upper_values.push_back(0.0);
    }
    return trace;
  }

  const NormalForm y = nf_scale(x, 1.0 / trace.direct_norm);
  const NormalForm p = nf_multiply(y, nf_adjoint(y));
  const double x2 = trace.direct_norm * trace.direct_norm;
  trace.sandwich_lo = spectral_norm(coefficient(p, 0)) * x2;
  trace.sandwich_hi = (2.0 * big_n + 1.0) * trace.sandwich_lo;
  NormalForm power = nf_multiply(p, p);
  for (int k = 1; k <= k_max; k *= 2) {
    if (k > 1) power = nf_multiply(power, power);
    const double c0 = spectral_norm(coefficient(power, 0));
    if (!std::isfinite(c0)) throw Overflow("coefficient norm overflow at k = " + std::to_string(k));
    const double s = std::pow(c0, 1.0 / (4.0 * k)) * trace.direct_norm;
    trace.k_values.push_back(k);
    trace.s_values.push_back(s);
    trace.upper_values.push_back(std::pow(4.0 * k * big_n + 1.0, 1.0 / (4.0 * k)) * s);
  }
  return trace;
}

/// Checks the two-sided bounds carried by a trace, relative to ||x||^2 or ||x||.
inline ConditionReport check_norm_trace(const NormLimitTrace& t, double tol) {
  ConditionReport report("norm-limit");
  const double x2 = t.direct_norm * t.direct_norm;
  const double scale2 = std::max(x2, 1e-300);
  const double scale = std::max(t.direct_norm, 1e-300);
  report.record("||N0(xx*)|| <= ||x||^2", std::max(0.0, t.sandwich_lo - x2) / scale2, tol);
  report.record("||x||^2 <= (2N+1)||N0(xx*)||", std::max(0.0, x2 - t.sandwich_hi) / scale2, tol);
  double lower = 0.0, upper = 0.0;
  for (std::size_t i = 0; i < t.s_values.size(); ++i) {
    lower = std::max(lower, std::max(0.0, t.s_values[i] - t.direct_norm) / scale);
    upper = std::max(upper, std::max(0.0, t.direct_norm - t.upper_values[i]) / scale);
  }
  report.record("s_k <= ||x||", lower, tol);
  report.record("||x|| <= (4kN+1)^(1/4k) s_k", upper, tol);
  return report;
}

/// | ||eval(gauge(x, lambda))|| - ||eval(x)|| | over the grid-th roots of unity.
inline ConditionReport gauge_invariance_check(const NormalForm& x, std::size_t grid, double tol) {
  ConditionReport report("gauge-invariance");
  const double norm = spectral_norm(eval(x));
  const double scale = std::max(norm, 1e-300);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double g = spectral_norm(eval(gauge(x, root_of_unity(j, grid))));
    worst = std::max(worst, std::abs(g - norm) / scale);
  }
  report.record("| ||x(lambda)|| - ||x|| | / ||x||", worst, tol);
  return report;
}

}  // namespace isoalg
