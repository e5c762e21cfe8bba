#pragma once

// Concrete systems: the polar-decomposition model built from an operator a,
// and the truncated q-deformed oscillator built from a backward shift.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "isoalg/conditions.hpp"
#include "isoalg/errors.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/report.hpp"
#include "isoalg/star_algebra.hpp"

namespace isoalg {

/// Singular values of a at or below this fraction of ||a|| count as kernel.
inline constexpr double kPolarRankTolerance = 1e-10;

struct PolarDecomposition {
  ComplexMatrix U;
  ComplexMatrix abs_a;
};

/// a = U|a| with U zero on ker|a|.  Works from the eigenpairs of the
/// Hermitian matrix [[0, a], [a*, 0]]: eigenvalue s > 0 has eigenvector
/// (w; v)/sqrt(2) with a v = s w, so U = sum w v* and |a| = sum s v v*.
/// Small singular values keep full relative accuracy this way, unlike the
/// square root of a*a.
inline PolarDecomposition polar_decompose(const ComplexMatrix& a) {
  require_square(a, "a");
  const Eigen::Index n = a.rows();
  ComplexMatrix jw = ComplexMatrix::Zero(2 * n, 2 * n);
  jw.topRightCorner(n, n) = a;
  jw.bottomLeftCorner(n, n) = a.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(jw);
  const RealVector& s = solver.eigenvalues();
  const double cutoff = kPolarRankTolerance * std::max(s.cwiseAbs().maxCoeff(), 0.0);

  PolarDecomposition out{ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cutoff || s(i) <= 0.0) continue;
    const auto w = solver.eigenvectors().col(i).head(n);
    const auto v = solver.eigenvectors().col(i).tail(n);
    out.U += 2.0 * w * v.adjoint();
    out.abs_a += 2.0 * s(i) * v * v.adjoint();
  }
  out.abs_a = hermitian_part(out.abs_a);
  return out;
}

struct PolarModel {
  ComplexMatrix a;
  ComplexMatrix abs_a;
  ComplexMatrix U;
  FiniteStarAlgebra A0;
  SystemPtr base;    // (A0, U)
  SystemPtr system;  // coefficient extension of A0
};

/// Builds A0 = closure{1, |a|} and its minimal coefficient extension.
/// Throws Condition54Violated unless aa* lies in A0.
inline PolarModel build_polar_model(const ComplexMatrix& a, double tol = kDefaultTolerance) {
  PolarDecomposition pd = polar_decompose(a);
  const std::size_t n = static_cast<std::size_t>(a.rows());
  FiniteStarAlgebra a0 = generate_closure(n, {pd.abs_a}, tol);
  const Membership m = contains(a0, a * a.adjoint());
  if (!m.inside) throw Condition54Violated(m.defect);
  auto base = make_system(a0, pd.U);
  auto system = coefficient_extension(*base);
  return PolarModel{a, std::move(pd.abs_a), std::move(pd.U), std::move(a0), std::move(base),
                    std::move(system)};
}

/// a = U|a|, U vanishing on ker|a|, U a partial isometry, aa* in A0.
inline ConditionReport check_polar_model(const PolarModel& m, double tol) {
  ConditionReport report("polar-model");
  const double scale = std::max(1.0, spectral_norm(m.a));
  report.record("a = U|a|", spectral_norm(m.a - m.U * m.abs_a) / scale, tol);
  const HermitianEigen eig = herm_eig(m.abs_a);
  ComplexMatrix kernel = zero_matrix(static_cast<std::size_t>(m.a.rows()));
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= kPolarRankTolerance * scale) {
      kernel += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
  }
  report.record("U vanishes on ker|a|", spectral_norm(m.U * kernel), tol);
  report.record("U is a partial isometry", is_partial_isometry(m.U, tol).max_defect(), tol);
  report.record("aa* in A0", detail::relative_membership(m.A0, m.a * m.a.adjoint()), tol);
  return report;
}

/// Structure of the polar model for k, l <= k_max, R_k = U^k U*^k, P_l = U*^l U^l:
///   delta^k(|a|) in closure{1, |a|, R_1, ..., R_(k-1)};
///   delta multiplicative on those closures;
///   R_k in the double commutant of A0;
///   U*U^kU*^l = U^(k-1)U*^l and UU*^kU^l = U*^(k-1)U^l for 1 <= k <= l;
///   [P_l, R_k] = 0.
inline ConditionReport polar_model_suite(const PolarModel& m, std::size_t k_max, double tol) {
  ConditionReport report("polar-suite");
  const IsometrySystem& sys = *m.base;
  const std::size_t n = sys.dim();

  double membership = 0.0, mult = 0.0;
  std::vector<ComplexMatrix> gens{m.abs_a};
  for (std::size_t k = 1; k <= k_max; ++k) {
    const FiniteStarAlgebra closure = generate_closure(n, std::span<const ComplexMatrix>(gens), sys.tol());
    membership = std::max(membership, detail::relative_membership(closure, sys.delta(m.abs_a, k)));
    mult = std::max(mult, detail::multiplicativity_defect(sys, closure, Direction::Forward));
    gens.push_back(sys.final_projection(k));
  }

  const std::vector<ComplexMatrix> a0_commutant = commutant(m.A0);
  double bicommutant = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const ComplexMatrix rk = sys.final_projection(k);
    for (const auto& c : a0_commutant) bicommutant = std::max(bicommutant, spectral_norm(commutator(rk, c)));
  }

  double shift = 0.0;
  const ComplexMatrix u = sys.U();
  const ComplexMatrix ustar = sys.Ustar();
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t l = k; l <= k_max; ++l) {
      shift = std::max({shift,
                        spectral_norm(ustar * sys.power(k) * sys.star_power(l) -
                                      sys.power(k - 1) * sys.star_power(l)),
                        spectral_norm(u * sys.star_power(k) * sys.power(l) -
                                      sys.star_power(k - 1) * sys.power(l))});
    }
  }

  double cross = 0.0;
  for (std::size_t l = 0; l <= k_max; ++l) {
    for (std::size_t k = 0; k <= k_max; ++k) {
      cross = std::max(cross, spectral_norm(commutator(sys.initial_projection(l), sys.final_projection(k))));
    }
  }

  report.record("delta^k(|a|) in closure{1, |a|, U^jU*^j : j < k}", membership, tol);
  report.record("delta multiplicative on closure{1, |a|, U^jU*^j : j < k}", mult, tol);
  report.record("U^kU*^k in A0''", bicommutant, tol);
  report.record("U*U^kU*^l = U^(k-1)U*^l and UU*^kU^l = U*^(k-1)U^l", shift, tol);
  report.record("[U*^lU^l, U^kU*^k] = 0", cross, tol);
  return report;
}

/// Values of rho on q^0, q^1, ...  Either n samples (the spectrum of Q) or
/// n + 1 (also q^n, needed for the edge of aa*).
struct RhoSpec {
  std::string name;
  std::vector<double> samples;
};

/// rho(t) = (1 - t) / (1 - q).
inline RhoSpec heisenberg_rho(std::size_t n, double q) {
  RhoSpec r{"heisenberg", {}};
  for (std::size_t j = 0; j <= n; ++j) r.samples.push_back((1.0 - std::pow(q, static_cast<double>(j))) / (1.0 - q));
  return r;
}

/// rho^2(t) = -(q/t + t) / ((1-q)(1-q^2)(1-q)^2), taken as written.  Any
/// negative sample is rejected.
inline RhoSpec sl2_rho(std::size_t n, double q) {
  RhoSpec r{"sl2", {}};
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = std::pow(q, static_cast<double>(j));
    const double rho2 = -(q / t + t) / ((1.0 - q) * (1.0 - q * q)) / ((1.0 - q) * (1.0 - q));
    if (rho2 < 0.0) {
      throw RhoConditionViolated("sl2 rho^2 is negative at q^" + std::to_string(j) + " (" +
                                     std::to_string(rho2) + ")",
                                 j);
    }
    r.samples.push_back(std::sqrt(rho2));
  }
  return r;
}

struct QDeformModel {
  std::size_t n = 0;
  double q = 0.0;
  ComplexMatrix Q;     // diag(q^0, ..., q^(n-1))
  ComplexMatrix U;     // U e_j = e_(j-1), U e_0 = 0
  RhoSpec rho;
  ComplexMatrix rhoQ;  // diag(rho(q^j))
  ComplexMatrix a;     // U rho(Q)
  FiniteStarAlgebra A0;
  SystemPtr system;
};

/// Builds the operators without checking the condition on rho.
inline QDeformModel qdeform_operators(std::size_t n, double q, RhoSpec rho, double tol = kDefaultTolerance) {
  if (!(q > 0.0 && q < 1.0)) throw DimensionMismatch("q must lie in (0, 1)");
  if (n < 2) throw DimensionMismatch("truncation dimension must be >= 2");
  if (rho.samples.size() != n && rho.samples.size() != n + 1) {
    throw DimensionMismatch("rho needs " + std::to_string(n) + " or " + std::to_string(n + 1) +
                            " samples, got " + std::to_string(rho.samples.size()));
  }
  for (std::size_t j = 0; j < rho.samples.size(); ++j) {
    if (!(rho.samples[j] >= 0.0)) throw RhoConditionViolated("rho is negative at q^" + std::to_string(j), j);
  }
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix big_q = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix rho_q = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    big_q(j, j) = std::pow(q, static_cast<double>(j));
    rho_q(j, j) = rho.samples[static_cast<std::size_t>(j)];
    if (j + 1 < dim) u(j, j + 1) = 1.0;
  }
  FiniteStarAlgebra a0 = generate_closure(n, {big_q}, tol);
  const IsometrySystem base(a0, u);
  SystemPtr system = coefficient_extension(base);
  ComplexMatrix a = u * rho_q;
  return QDeformModel{n, q, std::move(big_q), std::move(u), std::move(rho), std::move(rho_q),
                      std::move(a), std::move(a0), std::move(system)};
}

/// U*U rho(Q) = rho(Q), checked one basis vector at a time.  The first
/// failing vector is named in a note (1-based, as e_1 ... e_n).
inline ConditionReport check_rho_condition(const QDeformModel& m, double tol) {
  ConditionReport report("rho-condition");
  const ComplexMatrix diff = m.U.adjoint() * m.U * m.rhoQ - m.rhoQ;
  double worst = 0.0;
  bool named = false;
  for (Eigen::Index j = 0; j < diff.cols(); ++j) {
    const double d = diff.col(j).norm();
    worst = std::max(worst, d);
    if (d > tol && !named) {
      report.note("fails at basis vector e" + std::to_string(j + 1));
      named = true;
    }
  }
  report.record("U*U rho(Q) = rho(Q)", worst, tol);
  return report;
}

/// Throws RhoConditionViolated if U*U rho(Q) != rho(Q).
inline QDeformModel build_qdeform(std::size_t n, double q, RhoSpec rho, double tol = kDefaultTolerance) {
  QDeformModel m = qdeform_operators(n, q, std::move(rho), tol);
  const ComplexMatrix diff = m.U.adjoint() * m.U * m.rhoQ - m.rhoQ;
  for (Eigen::Index j = 0; j < diff.cols(); ++j) {
    if (diff.col(j).norm() > tol) {
      throw RhoConditionViolated("U*U rho(Q) != rho(Q) at basis vector e" + std::to_string(j + 1),
                                 static_cast<std::size_t>(j));
    }
  }
  return m;
}

inline constexpr double kExactRelation = 1e-13;
inline constexpr double kTruncationMatch = 1e-10;

/// Relations of the truncated oscillator.  Exact ones are checked against
/// 1e-13 (1e-14 for UQ = qQU).  Truncation defects are compared to their
/// closed forms: ||UQU* - qQ|| = q^n, and aa* - rho^2(qQ) is rho^2(q^n) at
/// the top basis vector and zero on the rest.
inline ConditionReport qdeform_relations_suite(const QDeformModel& m) {
  ConditionReport report("qdeform-suite");
  const std::size_t n = m.n;
  const auto dim = static_cast<Eigen::Index>(n);
  const double q = m.q;
  const ComplexMatrix& Q = m.Q;
  const ComplexMatrix& U = m.U;
  const ComplexMatrix& a = m.a;
  const ComplexMatrix astar = a.adjoint();
  const bool have_edge = m.rho.samples.size() > n;

  ComplexMatrix rho_qq = ComplexMatrix::Zero(dim, dim);  // rho(qQ)
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto idx = static_cast<std::size_t>(j + 1);
    rho_qq(j, j) = idx < m.rho.samples.size() ? m.rho.samples[idx] : 0.0;
  }
  const ComplexMatrix rho2 = m.rhoQ * m.rhoQ;
  const ComplexMatrix rho2_qq = rho_qq * rho_qq;

  report.record("UQ = qQU", spectral_norm(U * Q - q * Q * U), 1e-14);
  report.record("U rho(Q) = rho(qQ) U", spectral_norm(U * m.rhoQ - rho_qq * U), kExactRelation);
  report.record("a*a = rho^2(Q)", spectral_norm(astar * a - rho2), kExactRelation);
  report.record("aQ = qQa", spectral_norm(a * Q - q * Q * a), kExactRelation);
  report.record("Qa* = qa*Q", spectral_norm(Q * astar - q * astar * Q), kExactRelation);

  const std::vector<ComplexMatrix> q_commutant = commutant(n, std::vector<ComplexMatrix>{Q});
  const ComplexMatrix initial = U.adjoint() * U;
  double central = 0.0;
  for (const auto& c : q_commutant) central = std::max(central, spectral_norm(commutator(initial, c)));
  report.record("U*U in {Q}''", central, kExactRelation);

  const double qn = std::pow(q, static_cast<double>(n));
  const double trunc = spectral_norm(U * Q * U.adjoint() - q * Q);
  report.record("||UQU* - qQ|| - q^n", std::abs(trunc - qn), kTruncationMatch);
  report.note("||UQU* - qQ|| = " + std::to_string(trunc) + ", q^n = " + std::to_string(qn));

  const ComplexMatrix gap = a * astar - rho2_qq;
  const auto bulk = static_cast<Eigen::Index>(n - 1);
  report.record("aa* = rho^2(qQ) on span(e_1..e_(n-1))",
                spectral_norm(gap.topLeftCorner(bulk, bulk)), kExactRelation);
  if (have_edge) {
    const double edge_expected = m.rho.samples[n] * m.rho.samples[n];
    const double edge = spectral_norm(gap);
    report.record("||aa* - rho^2(qQ)|| - rho^2(q^n)", std::abs(edge - edge_expected), kTruncationMatch);
    report.note("||aa* - rho^2(qQ)|| = " + std::to_string(edge) +
                ", rho^2(q^n) = " + std::to_string(edge_expected));
  } else {
    report.note("edge defect of aa* not checked: rho has no sample at q^n");
  }
  return report;
}

}  // namespace isoalg
