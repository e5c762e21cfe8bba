#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isoalg/errors.hpp"
#include "isoalg/linalg.hpp"
#include "isoalg/report.hpp"

namespace isoalg {

inline constexpr double kDefaultTolerance = 1e-9;

namespace detail {

inline Eigen::Map<const Eigen::VectorXcd> flat(const ComplexMatrix& m) {
  return {m.data(), m.size()};
}

inline ComplexMatrix unflatten(const Eigen::VectorXcd& v, Eigen::Index n) {
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

/// Incremental Hilbert-Schmidt orthonormal basis of a linear span of n x n
/// matrices.  Two passes of classical Gram-Schmidt per candidate.
class SpanBuilder {
 public:
  SpanBuilder(std::size_t dim, double tol, bool detect_collapse = true)
      : dim_(static_cast<Eigen::Index>(dim)), tol_(tol), detect_collapse_(detect_collapse) {}

  std::size_t size() const { return basis_.size(); }
  std::size_t capacity() const { return static_cast<std::size_t>(dim_ * dim_); }
  const ComplexMatrix& element(std::size_t i) const { return basis_[i]; }
  const std::vector<ComplexMatrix>& elements() const { return basis_; }

  /// Adds the candidate if it leaves the span; returns its index if so.
  std::optional<std::size_t> add(const ComplexMatrix& candidate) {
    if (candidate.rows() != dim_ || candidate.cols() != dim_) {
      throw DimensionMismatch("span candidate has wrong dimension");
    }
    const double scale = std::max(1.0, spectral_norm(candidate));
    Eigen::VectorXcd r = flat(candidate);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) r -= flat(b).dot(r) * flat(b);
    }
    const double residual = r.norm() / scale;
    if (residual <= tol_) return std::nullopt;
    if (detect_collapse_ && residual <= 10.0 * tol_) {
      throw ToleranceCollapse("Gram-Schmidt residual " + std::to_string(residual) +
                                  " lies in the ambiguous band (tol, 10 tol]",
                              residual);
    }
    r /= r.norm();
    basis_.push_back(unflatten(r, dim_));
    return basis_.size() - 1;
  }

 private:
  Eigen::Index dim_;
  double tol_;
  bool detect_collapse_;
  std::vector<ComplexMatrix> basis_;
};

}  // namespace detail

/// A unital *-subalgebra of the n x n matrices, stored as a Hilbert-Schmidt
/// orthonormal basis.  Immutable once built.
class FiniteStarAlgebra {
 public:
  /// Trusts the caller that the basis is orthonormal and spans a unital
  /// *-algebra; use generate_closure() to build one from generators.
  FiniteStarAlgebra(std::size_t ambient_dim, std::vector<ComplexMatrix> basis, double tol)
      : dim_(ambient_dim), basis_(std::move(basis)), tol_(tol) {
    const auto n2 = static_cast<Eigen::Index>(dim_ * dim_);
    flat_.resize(n2, static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      require_square(basis_[i], "basis element");
      if (static_cast<std::size_t>(basis_[i].rows()) != dim_) {
        throw DimensionMismatch("basis element has wrong dimension");
      }
      flat_.col(static_cast<Eigen::Index>(i)) = detail::flat(basis_[i]);
    }
  }

  std::size_t ambient_dim() const { return dim_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<ComplexMatrix>& basis() const { return basis_; }
  double tol() const { return tol_; }

  /// Orthogonal (Hilbert-Schmidt) projection onto the span of the basis.
  ComplexMatrix project(const ComplexMatrix& m) const {
    if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_) {
      throw DimensionMismatch("matrix dimension does not match algebra dimension");
    }
    const Eigen::VectorXcd coords = flat_.adjoint() * detail::flat(m);
    return detail::unflatten(flat_ * coords, static_cast<Eigen::Index>(dim_));
  }

 private:
  std::size_t dim_;
  std::vector<ComplexMatrix> basis_;
  Eigen::MatrixXcd flat_;
  double tol_;
};

struct Membership {
  bool inside = false;
  double defect = 0.0;
};

/// Defect is the Frobenius norm of the component orthogonal to the algebra;
/// membership holds iff defect <= tol * max(1, ||M||).
inline Membership contains(const FiniteStarAlgebra& alg, const ComplexMatrix& m) {
  require_square(m);
  if (static_cast<std::size_t>(m.rows()) != alg.ambient_dim()) {
    throw DimensionMismatch("matrix dimension " + std::to_string(m.rows()) +
                            " does not match algebra dimension " +
                            std::to_string(alg.ambient_dim()));
  }
  const double defect = frobenius_norm(m - alg.project(m));
  return {defect <= alg.tol() * std::max(1.0, spectral_norm(m)), defect};
}

/// Both algebras span the same subspace (mutual containment of bases).
inline double span_distance(const FiniteStarAlgebra& a, const FiniteStarAlgebra& b) {
  double worst = 0.0;
  for (const auto& x : a.basis()) worst = std::max(worst, contains(b, x).defect);
  for (const auto& x : b.basis()) worst = std::max(worst, contains(a, x).defect);
  return worst;
}

inline bool same_span(const FiniteStarAlgebra& a, const FiniteStarAlgebra& b) {
  if (a.dimension() != b.dimension()) return false;
  return span_distance(a, b) <= std::max(a.tol(), b.tol());
}

/// Smallest unital *-algebra containing the generators.
///
/// Products of the orthonormal basis elements are adjoined until the
/// dimension stops growing.  Spectral projections of the self-adjoint parts
/// of each new element are adjoined as well: they are polynomials in that
/// element, so they lie in the algebra, and they keep the Gram-Schmidt
/// residuals well away from the tolerance when generators have clustered
/// spectra.
inline FiniteStarAlgebra generate_closure(std::size_t dim, std::span<const ComplexMatrix> gens,
                                          double tol = kDefaultTolerance) {
  if (dim < 1) throw DimensionMismatch("ambient dimension must be >= 1");
  for (const auto& g : gens) {
    require_square(g, "generator");
    if (static_cast<std::size_t>(g.rows()) != dim) {
      throw DimensionMismatch("generator dimension " + std::to_string(g.rows()) +
                              " does not match " + std::to_string(dim));
    }
  }
  constexpr double kClusterGap = 1e-6;
  detail::SpanBuilder span(dim, tol);
  std::deque<ComplexMatrix> pending;
  std::vector<std::size_t> frontier;

  pending.push_back(identity(dim));
  for (const auto& g : gens) {
    pending.push_back(g);
    pending.push_back(g.adjoint());
  }

  auto drain = [&] {
    while (!pending.empty() && span.size() < span.capacity()) {
      ComplexMatrix c = std::move(pending.front());
      pending.pop_front();
      if (auto idx = span.add(c)) {
        frontier.push_back(*idx);
        const ComplexMatrix& b = span.element(*idx);
        pending.push_back(b.adjoint());
        const ComplexMatrix re = hermitian_part(b);
        const ComplexMatrix im = (b - b.adjoint()) * Complex(0.0, -0.5);
        for (auto& p : spectral_projections(re, kClusterGap)) pending.push_back(std::move(p));
        for (auto& p : spectral_projections(im, kClusterGap)) pending.push_back(std::move(p));
      }
    }
    pending.clear();
  };

  drain();
  while (!frontier.empty() && span.size() < span.capacity()) {
    const std::vector<std::size_t> current = std::exchange(frontier, {});
    const std::size_t total = span.size();
    for (std::size_t f : current) {
      for (std::size_t g = 0; g < total; ++g) {
        pending.push_back(span.element(f) * span.element(g));
        pending.push_back(span.element(g) * span.element(f));
      }
      drain();
    }
  }
  return FiniteStarAlgebra(dim, span.elements(), tol);
}

inline FiniteStarAlgebra generate_closure(std::size_t dim,
                                          std::initializer_list<ComplexMatrix> gens,
                                          double tol = kDefaultTolerance) {
  const std::vector<ComplexMatrix> v(gens);
  return generate_closure(dim, std::span<const ComplexMatrix>(v), tol);
}

/// Orthonormal basis of the linear span of the given matrices (no closure).
inline std::vector<ComplexMatrix> linear_span(std::size_t dim, std::span<const ComplexMatrix> mats,
                                              double tol = kDefaultTolerance) {
  detail::SpanBuilder span(dim, tol, false);
  for (const auto& m : mats) span.add(m);
  return span.elements();
}

/// Basis of { X : XG = GX for all G in gens }, found as the null space of
/// the Hermitian operator sum_G L_G* L_G with L_G(X) = XG - GX.  Singular
/// values below rank_tol times the largest count as zero.
inline std::vector<ComplexMatrix> commutant(std::size_t dim, std::span<const ComplexMatrix> gens,
                                            double rank_tol = 1e-6) {
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::Index n2 = n * n;
  ComplexMatrix gram = ComplexMatrix::Zero(n2, n2);
  const ComplexMatrix id = identity(dim);
  for (const auto& g : gens) {
    require_square(g, "generator");
    if (g.rows() != n) throw DimensionMismatch("commutant: generator has wrong dimension");
    // vec(XG - GX) = (G^T (x) I - I (x) G) vec(X), column-major vec.
    ComplexMatrix op = ComplexMatrix::Zero(n2, n2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        op.block(i * n, j * n, n, n) += g(j, i) * id;
        if (i == j) op.block(i * n, j * n, n, n) -= g;
      }
    }
    gram += op.adjoint() * op;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(gram));
  const RealVector& ev = solver.eigenvalues();
  const double top = std::max(0.0, ev.maxCoeff());
  const double cutoff = rank_tol * rank_tol * top;
  std::vector<ComplexMatrix> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (top == 0.0 || ev(i) <= cutoff) {
      out.push_back(detail::unflatten(solver.eigenvectors().col(i), n));
    }
  }
  return out;
}

inline std::vector<ComplexMatrix> commutant(const FiniteStarAlgebra& alg, double rank_tol = 1e-6) {
  return commutant(alg.ambient_dim(), std::span<const ComplexMatrix>(alg.basis()), rank_tol);
}

/// (S u S*)'' as a linear span; in finite dimension this is the unital
/// *-algebra generated by S.
inline std::vector<ComplexMatrix> bicommutant(std::size_t dim, std::span<const ComplexMatrix> gens,
                                              double rank_tol = 1e-6) {
  std::vector<ComplexMatrix> sym;
  for (const auto& g : gens) {
    sym.push_back(g);
    sym.push_back(g.adjoint());
  }
  const auto first = commutant(dim, std::span<const ComplexMatrix>(sym), rank_tol);
  return commutant(dim, std::span<const ComplexMatrix>(first), rank_tol);
}

/// Checks every FiniteStarAlgebra invariant and reports the worst defects.
inline ConditionReport verify_algebra(const FiniteStarAlgebra& alg) {
  ConditionReport report("algebra-invariants");
  const auto& b = alg.basis();
  double ortho = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Complex expected = i == j ? 1.0 : 0.0;
      ortho = std::max(ortho, std::abs(hs_inner(b[i], b[j]) - expected));
    }
  }
  double adj = 0.0;
  double prod = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    adj = std::max(adj, contains(alg, b[i].adjoint()).defect);
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod = std::max(prod, contains(alg, b[i] * b[j]).defect);
    }
  }
  const double tol = alg.tol();
  report.record("orthonormal basis", ortho, tol);
  report.record("closed under adjoint", adj, tol);
  report.record("closed under product", prod, tol);
  report.record("contains identity", contains(alg, identity(alg.ambient_dim())).defect, tol);
  return report;
}

/// The pair (A, U) with U a partial isometry, plus eagerly cached powers of U
/// and the projections U*^k U^k, U^k U*^k.
class IsometrySystem {
 public:
  IsometrySystem(FiniteStarAlgebra algebra, ComplexMatrix u, std::size_t depth = 0)
      : algebra_(std::move(algebra)), u_(std::move(u)) {
    require_square(u_, "U");
    if (static_cast<std::size_t>(u_.rows()) != algebra_.ambient_dim()) {
      throw DimensionMismatch("U dimension does not match algebra");
    }
    ConditionReport pi = is_partial_isometry(u_, algebra_.tol());
    if (!pi.pass()) throw HypothesisViolated("U is not a partial isometry", std::move(pi));
    if (depth == 0) depth = 2 * algebra_.ambient_dim() + 2;
    powers_.reserve(depth + 1);
    powers_.push_back(identity(dim()));
    for (std::size_t k = 1; k <= depth; ++k) powers_.push_back(powers_.back() * u_);
    for (const auto& p : powers_) {
      initial_.push_back(p.adjoint() * p);
      final_.push_back(p * p.adjoint());
    }
  }

  const FiniteStarAlgebra& algebra() const { return algebra_; }
  const ComplexMatrix& U() const { return u_; }
  ComplexMatrix Ustar() const { return u_.adjoint(); }
  std::size_t dim() const { return algebra_.ambient_dim(); }
  double tol() const { return algebra_.tol(); }
  std::size_t depth() const { return powers_.size() - 1; }

  ComplexMatrix power(std::size_t k) const {
    if (k < powers_.size()) return powers_[k];
    ComplexMatrix p = powers_.back();
    for (std::size_t i = powers_.size() - 1; i < k; ++i) p = p * u_;
    return p;
  }
  ComplexMatrix star_power(std::size_t k) const { return power(k).adjoint(); }

  /// U*^k U^k.
  ComplexMatrix initial_projection(std::size_t k) const {
    if (k < initial_.size()) return initial_[k];
    const ComplexMatrix p = power(k);
    return p.adjoint() * p;
  }
  /// U^k U*^k = delta^k(1).
  ComplexMatrix final_projection(std::size_t k) const {
    if (k < final_.size()) return final_[k];
    const ComplexMatrix p = power(k);
    return p * p.adjoint();
  }

  ComplexMatrix delta(const ComplexMatrix& m, std::size_t k = 1) const {
    check_dim(m);
    if (k == 0) return m;
    const ComplexMatrix p = power(k);
    return p * m * p.adjoint();
  }
  ComplexMatrix delta_star(const ComplexMatrix& m, std::size_t k = 1) const {
    check_dim(m);
    if (k == 0) return m;
    const ComplexMatrix p = power(k);
    return p.adjoint() * m * p;
  }

 private:
  void check_dim(const ComplexMatrix& m) const {
    if (m.rows() != u_.rows() || m.cols() != u_.cols()) {
      throw DimensionMismatch("operand dimension does not match the system");
    }
  }

  FiniteStarAlgebra algebra_;
  ComplexMatrix u_;
  std::vector<ComplexMatrix> powers_;
  std::vector<ComplexMatrix> initial_;
  std::vector<ComplexMatrix> final_;
};

using SystemPtr = std::shared_ptr<const IsometrySystem>;

inline SystemPtr make_system(FiniteStarAlgebra algebra, ComplexMatrix u) {
  return std::make_shared<const IsometrySystem>(std::move(algebra), std::move(u));
}

/// UMU*.
inline ComplexMatrix delta(const IsometrySystem& sys, const ComplexMatrix& m) {
  return sys.delta(m);
}

/// U*MU.
inline ComplexMatrix delta_star(const IsometrySystem& sys, const ComplexMatrix& m) {
  return sys.delta_star(m);
}

}  // namespace isoalg
