#pragma once

// Checkers for the coefficient-algebra conditions and the builders of the
// delta / delta_* extension towers.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isoalg/errors.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/report.hpp"
#include "isoalg/star_algebra.hpp"

namespace isoalg {

enum class Direction {
  Forward,   // delta:   x -> U x U*
  Backward,  // delta_*: x -> U* x U
};

namespace detail {

inline ComplexMatrix apply(const IsometrySystem& sys, Direction dir, const ComplexMatrix& m,
                           std::size_t k = 1) {
  return dir == Direction::Forward ? sys.delta(m, k) : sys.delta_star(m, k);
}

/// Membership defect scaled the same way contains() decides membership.
inline double relative_membership(const FiniteStarAlgebra& alg, const ComplexMatrix& m) {
  return contains(alg, m).defect / std::max(1.0, spectral_norm(m));
}

inline double max_image_defect(const IsometrySystem& sys, const FiniteStarAlgebra& alg,
                               Direction dir) {
  double worst = 0.0;
  for (const auto& b : alg.basis()) worst = std::max(worst, relative_membership(alg, apply(sys, dir, b)));
  return worst;
}

inline double multiplicativity_defect(const IsometrySystem& sys, const FiniteStarAlgebra& alg,
                                      Direction dir) {
  double worst = 0.0;
  const auto& b = alg.basis();
  std::vector<ComplexMatrix> images;
  images.reserve(b.size());
  for (const auto& x : b) images.push_back(apply(sys, dir, x));
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      worst = std::max(worst, spectral_norm(apply(sys, dir, b[i] * b[j]) - images[i] * images[j]));
    }
  }
  return worst;
}

inline double commutativity_defect(const FiniteStarAlgebra& alg) {
  double worst = 0.0;
  const auto& b = alg.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      worst = std::max(worst, spectral_norm(commutator(b[i], b[j])));
    }
  }
  return worst;
}

inline double commutes_with_algebra(const ComplexMatrix& x, const FiniteStarAlgebra& alg) {
  double worst = 0.0;
  for (const auto& b : alg.basis()) worst = std::max(worst, spectral_norm(commutator(x, b)));
  return worst;
}

inline std::size_t default_chain_cap(const IsometrySystem& sys) { return sys.dim() * sys.dim(); }

}  // namespace detail

/// Evaluates the three equivalent forms of the intertwining relation
/// independently:
///   (i)   Ua = delta(a) U for all a in A,
///   (ii)  U a partial isometry with U*U in the commutant A',
///   (iii) U*U in A' and delta multiplicative on A.
/// The report passes iff all three hold; a disagreement among them is
/// recorded as its own defect since it can only come from a numerical fault.
inline ConditionReport check_intertwining(const IsometrySystem& sys, double tol) {
  ConditionReport report("intertwining");
  const auto& alg = sys.algebra();
  const ComplexMatrix& u = sys.U();
  const ComplexMatrix initial = sys.initial_projection(1);

  double form_i = 0.0;
  for (const auto& a : alg.basis()) form_i = std::max(form_i, spectral_norm(u * a - sys.delta(a) * u));

  const ConditionReport pi = is_partial_isometry(u, tol);
  const double commutes = detail::commutes_with_algebra(initial, alg);
  const double mult = detail::multiplicativity_defect(sys, alg, Direction::Forward);

  const bool ok_i = report.record("(i) Ua = delta(a)U", form_i, tol);
  const bool ok_ii_pi = report.record("(ii) U is a partial isometry", pi.max_defect(), tol);
  const bool ok_ii_c = report.record("(ii) U*U commutes with A", commutes, tol);
  const bool ok_iii_c = report.record("(iii) U*U commutes with A", commutes, tol);
  const bool ok_iii_m = report.record("(iii) delta(ab) = delta(a)delta(b)", mult, tol);
  const bool ok_ii = ok_ii_pi && ok_ii_c;
  const bool ok_iii = ok_iii_c && ok_iii_m;
  const bool agree = ok_i == ok_ii && ok_ii == ok_iii;
  report.record("equivalent forms disagree", agree ? 0.0 : 1.0, 0.0);
  if (!agree) report.note("equivalent forms disagree: numerical fault suspected");
  return report;
}

inline ConditionReport check_intertwining(const IsometrySystem& sys) {
  return check_intertwining(sys, sys.tol());
}

/// A is a coefficient algebra: intertwining holds and both delta and delta_*
/// map A into itself.
inline ConditionReport check_coefficient_algebra(const IsometrySystem& sys, double tol) {
  ConditionReport report("coefficient-algebra");
  report.merge(check_intertwining(sys, tol), "intertwining");
  report.record("delta maps A into A",
                detail::max_image_defect(sys, sys.algebra(), Direction::Forward), tol);
  report.record("delta_* maps A into A",
                detail::max_image_defect(sys, sys.algebra(), Direction::Backward), tol);
  return report;
}

inline ConditionReport check_coefficient_algebra(const IsometrySystem& sys) {
  return check_coefficient_algebra(sys, sys.tol());
}

/// U*U commutes with delta^n(a) for every basis a and n = 0..n_max.  Also
/// reports where the chain of spans of delta^n(basis) first repeats.
inline ConditionReport check_initial_projection_chain(const IsometrySystem& sys, std::size_t n_max,
                                                      double tol) {
  ConditionReport report("initial-projection");
  const auto& alg = sys.algebra();
  const ComplexMatrix initial = sys.initial_projection(1);
  double worst = 0.0;
  std::vector<ComplexMatrix> previous;
  std::optional<std::size_t> stabilized;
  std::vector<ComplexMatrix> images = alg.basis();
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      for (auto& m : images) m = sys.delta(m);
    }
    for (const auto& m : images) worst = std::max(worst, spectral_norm(commutator(initial, m)));
    if (!stabilized) {
      auto span = linear_span(sys.dim(), std::span<const ComplexMatrix>(images), tol);
      if (n > 0 && span.size() == previous.size()) {
        const FiniteStarAlgebra a(sys.dim(), span, tol);
        const FiniteStarAlgebra b(sys.dim(), previous, tol);
        if (span.empty() || span_distance(a, b) <= tol) stabilized = n;
      }
      previous = std::move(span);
    }
  }
  report.record("[U*U, delta^n(a)] = 0", worst, tol);
  if (stabilized) {
    report.note("stabilization index " + std::to_string(*stabilized));
  } else {
    report.note("span of delta^n(basis) did not repeat up to n = " + std::to_string(n_max));
  }
  return report;
}

inline ConditionReport check_initial_projection_chain(const IsometrySystem& sys,
                                                      std::size_t n_max) {
  return check_initial_projection_chain(sys, n_max, sys.tol());
}

/// Commutative-extension conditions for a commutative algebra A0:
///   [a, delta^n(b)] = 0 and [U*U, delta^n(a)] = 0 for n <= n_max.
/// Throws NotCommutative when A0 itself is not commutative.
inline ConditionReport check_commutative_extension(const IsometrySystem& sys, std::size_t n_max,
                                                   double tol) {
  const auto& alg = sys.algebra();
  const double noncomm = detail::commutativity_defect(alg);
  if (noncomm > tol) {
    throw NotCommutative("algebra is not commutative: max ||[a,b]|| = " + std::to_string(noncomm),
                         noncomm);
  }
  ConditionReport report("commutative-extension");
  double worst = 0.0;
  std::vector<ComplexMatrix> images = alg.basis();
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) {
      for (auto& m : images) m = sys.delta(m);
    }
    for (const auto& a : alg.basis()) {
      for (const auto& m : images) worst = std::max(worst, spectral_norm(commutator(a, m)));
    }
  }
  report.record("[a, delta^n(b)] = 0", worst, tol);
  report.merge(check_initial_projection_chain(sys, n_max, tol));
  return report;
}

inline ConditionReport check_commutative_extension(const IsometrySystem& sys, std::size_t n_max) {
  return check_commutative_extension(sys, n_max, sys.tol());
}

/// The *-algebra generated by all images delta^n(start) (Forward) or
/// delta_*^n(start) (Backward).  Stops after two consecutive steps that add
/// nothing, or at the hard cap dim^2.  No hypotheses are checked.
inline FiniteStarAlgebra delta_tower(const IsometrySystem& sys, const FiniteStarAlgebra& start,
                                     Direction dir) {
  const double tol = start.tol();
  FiniteStarAlgebra current = generate_closure(sys.dim(), std::span<const ComplexMatrix>(start.basis()), tol);
  std::vector<ComplexMatrix> images = start.basis();
  std::size_t quiet = 0;
  const std::size_t cap = detail::default_chain_cap(sys);
  for (std::size_t n = 1; n <= cap && quiet < 2; ++n) {
    std::vector<ComplexMatrix> gens = current.basis();
    bool grew = false;
    for (auto& m : images) {
      m = detail::apply(sys, dir, m);
      if (!contains(current, m).inside) {
        gens.push_back(m);
        grew = true;
      }
    }
    if (!grew) {
      ++quiet;
      continue;
    }
    quiet = 0;
    current = generate_closure(sys.dim(), std::span<const ComplexMatrix>(gens), tol);
  }
  return current;
}

/// E(A): hypothesis is the initial-projection chain condition.
inline FiniteStarAlgebra extend_E(const IsometrySystem& sys) {
  ConditionReport pre = check_initial_projection_chain(sys, detail::default_chain_cap(sys));
  if (!pre.pass()) throw HypothesisViolated("extend_E precondition failed", std::move(pre));
  return delta_tower(sys, sys.algebra(), Direction::Forward);
}

/// E_*(A): hypothesis is intertwining plus delta-invariance of A.
inline FiniteStarAlgebra extend_Estar(const IsometrySystem& sys) {
  ConditionReport pre("extend-Estar hypothesis");
  pre.merge(check_intertwining(sys), "intertwining");
  pre.record("delta maps A into A",
             detail::max_image_defect(sys, sys.algebra(), Direction::Forward), sys.tol());
  if (!pre.pass()) throw HypothesisViolated("extend_Estar precondition failed", std::move(pre));
  return delta_tower(sys, sys.algebra(), Direction::Backward);
}

/// Minimal coefficient algebra E_*(E(A)) over the system's algebra.
inline SystemPtr coefficient_extension(const IsometrySystem& sys) {
  const FiniteStarAlgebra e = extend_E(sys);
  const IsometrySystem mid(e, sys.U());
  return make_system(extend_Estar(mid), sys.U());
}

/// Projection families of the powers of U, for k, l <= k_max:
/// U^k a = delta^k(a) U^k; U^k partial isometries with U*^k U^k in A';
/// both projection families commuting and decreasing; cross commutators
/// [U*^k U^k, U^l U*^l] = 0; and the shift identities
/// U* U^k U*^l = U^{k-1} U*^l, U U*^k U^l = U*^{k-1} U^l for 1 <= k <= l.
inline ConditionReport verify_power_projections(const IsometrySystem& sys, std::size_t k_max,
                                                double tol) {
  ConditionReport report("power-projections");
  const auto& alg = sys.algebra();
  const ComplexMatrix& u = sys.U();
  const ComplexMatrix ustar = sys.Ustar();

  double intertwine = 0.0, pisom = 0.0, commutant = 0.0;
  double proj = 0.0, comm_family = 0.0, decreasing = 0.0, cross = 0.0, shift = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const ComplexMatrix uk = sys.power(k);
    for (const auto& a : alg.basis()) {
      intertwine = std::max(intertwine, spectral_norm(uk * a - sys.delta(a, k) * uk));
    }
    pisom = std::max(pisom, is_partial_isometry(uk, tol).max_defect());
    commutant = std::max(commutant, detail::commutes_with_algebra(sys.initial_projection(k), alg));
  }
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (const ComplexMatrix& p : {sys.initial_projection(k), sys.final_projection(k)}) {
      proj = std::max({proj, spectral_norm(p * p - p), spectral_norm(p - p.adjoint())});
    }
    const ComplexMatrix pk = sys.initial_projection(k);
    const ComplexMatrix pk1 = sys.initial_projection(k + 1);
    const ComplexMatrix rk = sys.final_projection(k);
    const ComplexMatrix rk1 = sys.final_projection(k + 1);
    decreasing = std::max({decreasing, spectral_norm(pk * pk1 - pk1), spectral_norm(rk * rk1 - rk1)});
    for (std::size_t l = 1; l <= k_max; ++l) {
      comm_family = std::max(
          {comm_family, spectral_norm(commutator(pk, sys.initial_projection(l))),
           spectral_norm(commutator(rk, sys.final_projection(l)))});
    }
  }
  for (std::size_t k = 0; k <= k_max; ++k) {
    for (std::size_t l = 0; l <= k_max; ++l) {
      cross = std::max(cross, spectral_norm(commutator(sys.initial_projection(k), sys.final_projection(l))));
    }
  }
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t l = k; l <= k_max; ++l) {
      const ComplexMatrix lhs1 = ustar * sys.power(k) * sys.star_power(l);
      const ComplexMatrix rhs1 = sys.power(k - 1) * sys.star_power(l);
      const ComplexMatrix lhs2 = u * sys.star_power(k) * sys.power(l);
      const ComplexMatrix rhs2 = sys.star_power(k - 1) * sys.power(l);
      shift = std::max({shift, spectral_norm(lhs1 - rhs1), spectral_norm(lhs2 - rhs2)});
    }
  }
  report.record("U^k a = delta^k(a) U^k", intertwine, tol);
  report.record("U^k is a partial isometry", pisom, tol);
  report.record("U*^k U^k commutes with A", commutant, tol);
  report.record("U*^k U^k and U^k U*^k are projections", proj, tol);
  report.record("projection families commute", comm_family, tol);
  report.record("projection families decrease", decreasing, tol);
  report.record("[U*^k U^k, U^l U*^l] = 0", cross, tol);
  report.record("U*U^kU*^l = U^(k-1)U*^l and UU*^kU^l = U*^(k-1)U^l", shift, tol);
  return report;
}

inline ConditionReport verify_power_projections(const IsometrySystem& sys, std::size_t k_max) {
  return verify_power_projections(sys, k_max, sys.tol());
}

/// E_*(E(A0)) and E(E_*(A0)) span the same commutative algebra, invariant
/// under both delta and delta_*, on which both maps are multiplicative.
/// Hypothesis: check_commutative_extension passes.
inline ConditionReport verify_tower_commutation(const IsometrySystem& sys, std::size_t n_max,
                                                double tol) {
  ConditionReport pre = check_commutative_extension(sys, n_max, tol);
  if (!pre.pass()) throw HypothesisViolated("tower commutation precondition failed", std::move(pre));

  ConditionReport report("tower-commutation");
  const auto& a0 = sys.algebra();
  const FiniteStarAlgebra forward = delta_tower(sys, a0, Direction::Forward);
  const FiniteStarAlgebra e_star_e = delta_tower(sys, forward, Direction::Backward);
  const FiniteStarAlgebra backward = delta_tower(sys, a0, Direction::Backward);
  const FiniteStarAlgebra e_e_star = delta_tower(sys, backward, Direction::Forward);

  report.note("dim A0 = " + std::to_string(a0.dimension()));
  report.note("dim E(A0) = " + std::to_string(forward.dimension()));
  report.note("dim E_*(E(A0)) = " + std::to_string(e_star_e.dimension()));
  report.note("dim E_*(A0) = " + std::to_string(backward.dimension()));
  report.note("dim E(E_*(A0)) = " + std::to_string(e_e_star.dimension()));

  const double dim_gap = std::abs(static_cast<double>(e_star_e.dimension()) -
                                  static_cast<double>(e_e_star.dimension()));
  report.record("towers have equal dimension", dim_gap, 0.0);
  report.record("towers have equal span", span_distance(e_star_e, e_e_star), tol);
  report.record("E_*(E(A0)) is commutative", detail::commutativity_defect(e_star_e), tol);
  report.record("delta maps E_*(E(A0)) into itself",
                detail::max_image_defect(sys, e_star_e, Direction::Forward), tol);
  report.record("delta_* maps E_*(E(A0)) into itself",
                detail::max_image_defect(sys, e_star_e, Direction::Backward), tol);
  report.record("delta is multiplicative on E_*(E(A0))",
                detail::multiplicativity_defect(sys, e_star_e, Direction::Forward), tol);
  report.record("delta_* is multiplicative on E_*(E(A0))",
                detail::multiplicativity_defect(sys, e_star_e, Direction::Backward), tol);
  return report;
}

inline ConditionReport verify_tower_commutation(const IsometrySystem& sys, std::size_t n_max) {
  return verify_tower_commutation(sys, n_max, sys.tol());
}

/// Extending an algebra that is already delta- and delta_*-invariant must
/// not grow its span.
inline ConditionReport check_extension_fixed_point(const IsometrySystem& sys, double tol) {
  ConditionReport report("extension-fixed-point");
  const auto& alg = sys.algebra();
  const FiniteStarAlgebra e = delta_tower(sys, alg, Direction::Forward);
  const FiniteStarAlgebra es = delta_tower(sys, alg, Direction::Backward);
  const auto base = static_cast<double>(alg.dimension());
  report.record("dim E(A) - dim A", static_cast<double>(e.dimension()) - base, 0.0);
  report.record("dim E_*(A) - dim A", static_cast<double>(es.dimension()) - base, 0.0);
  report.record("span E(A) = span A", span_distance(e, alg), tol);
  report.record("span E_*(A) = span A", span_distance(es, alg), tol);
  return report;
}

inline ConditionReport check_extension_fixed_point(const IsometrySystem& sys) {
  return check_extension_fixed_point(sys, sys.tol());
}

}  // namespace isoalg
