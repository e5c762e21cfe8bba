#pragma once

// Dense complex matrix primitives.  Only Hermitian eigensolving is used;
// norms and square roots are derived from it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "isoalg/errors.hpp"
#include "isoalg/report.hpp"

namespace isoalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kSelfAdjointTolerance = 1e-10;
inline constexpr double kPsdClamp = 1e-10;

inline void require_square(const ComplexMatrix& m, const char* what = "matrix") {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch(std::string(what) + " must be square with dim >= 1, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

inline ComplexMatrix identity(std::size_t n) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

inline ComplexMatrix zero_matrix(std::size_t n) {
  return ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

inline double frobenius_norm(const ComplexMatrix& m) { return m.stableNorm(); }

/// trace(A* B).
inline Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  return (a.array().conjugate() * b.array()).sum();
}

namespace detail {

inline RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace detail

/// Largest singular value, from the top eigenvalue of M*M.
inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double peak = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(peak)) return std::numeric_limits<double>::infinity();
  if (peak == 0.0) return 0.0;
  // divide out the largest entry so the Gram matrix cannot overflow
  const ComplexMatrix s = m / peak;
  const ComplexMatrix gram = s.rows() <= s.cols() ? ComplexMatrix(s * s.adjoint()) : ComplexMatrix(s.adjoint() * s);
  const RealVector ev = detail::hermitian_eigenvalues(gram);
  return peak * std::sqrt(std::max(0.0, ev.maxCoeff()));
}

struct HermitianEigen {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // unitary, columns are eigenvectors
};

inline HermitianEigen herm_eig(const ComplexMatrix& m, double tol = kSelfAdjointTolerance) {
  require_square(m);
  const double scale = spectral_norm(m);
  const double skew = spectral_norm(m - m.adjoint());
  if (skew > tol * std::max(scale, 1e-300) && skew > 0.0) {
    throw NotSelfAdjoint("matrix is not self-adjoint: ||M - M*|| = " + std::to_string(skew));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Positive square root.  Eigenvalues in [-clamp*||M||, clamp*||M||] are set
/// to zero; anything more negative is rejected.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double clamp = kPsdClamp) {
  const HermitianEigen eig = herm_eig(m);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  RealVector roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < -clamp * scale) {
      throw NotPSD("matrix has a negative eigenvalue " + std::to_string(lambda));
    }
    roots(i) = lambda <= clamp * scale ? 0.0 : std::sqrt(lambda);
  }
  return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// Orthogonal projections onto the eigenspaces of a self-adjoint matrix.
/// Eigenvalues closer than gap * max(1, ||h||) are merged into one cluster.
inline std::vector<ComplexMatrix> spectral_projections(const ComplexMatrix& h, double gap) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  const RealVector& ev = solver.eigenvalues();
  const ComplexMatrix& vecs = solver.eigenvectors();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<ComplexMatrix> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > gap * scale) {
      const auto block = vecs.middleCols(start, i - start);
      out.emplace_back(block * block.adjoint());
      start = i;
    }
  }
  if (out.size() == 1) out.clear();
  return out;
}

/// Evaluates the five equivalent characterizations of a partial isometry
/// independently; each defect is reported separately.
inline ConditionReport is_partial_isometry(const ComplexMatrix& u, double tol = 1e-9) {
  require_square(u, "U");
  ConditionReport report("partial-isometry");
  const ComplexMatrix ustar = u.adjoint();
  const ComplexMatrix initial = ustar * u;
  const ComplexMatrix final_ = u * ustar;

  auto spectrum_defect = [](const ComplexMatrix& gram) {
    double worst = 0.0;
    for (double lambda : detail::hermitian_eigenvalues(gram)) {
      worst = std::max(worst, std::min(std::abs(lambda), std::abs(lambda - 1.0)));
    }
    return worst;
  };
  report.record("U is a partial isometry: spectrum of U*U in {0,1}", spectrum_defect(initial), tol);
  report.record("U* is a partial isometry: spectrum of UU* in {0,1}", spectrum_defect(final_), tol);
  report.record("U*U is a projection", spectral_norm(initial * initial - initial), tol);
  report.record("UU* is a projection", spectral_norm(final_ * final_ - final_), tol);
  report.record("UU*U = U and U*UU* = U*",
                std::max(spectral_norm(final_ * u - u), spectral_norm(initial * ustar - ustar)), tol);
  return report;
}

}  // namespace isoalg
