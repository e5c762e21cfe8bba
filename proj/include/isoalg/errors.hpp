#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "isoalg/report.hpp"

namespace isoalg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSelfAdjoint : public Error {
 public:
  using Error::Error;
};

class NotPSD : public Error {
 public:
  using Error::Error;
};

/// Gram-Schmidt met a residual inside the ambiguous band (tol, 10 tol].
class ToleranceCollapse : public Error {
 public:
  ToleranceCollapse(std::string what, double residual)
      : Error(std::move(what)), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NotCommutative : public Error {
 public:
  NotCommutative(std::string what, double defect) : Error(std::move(what)), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

/// A precondition stated as a checkable condition did not hold.
class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(ConditionReport report)
      : Error("hypothesis violated: " + report.name()), report_(std::move(report)) {}
  HypothesisViolated(std::string what, ConditionReport report)
      : Error(std::move(what)), report_(std::move(report)) {}
  const ConditionReport& report() const { return report_; }

 private:
  ConditionReport report_;
};

class NotCoefficientAlgebra : public HypothesisViolated {
 public:
  explicit NotCoefficientAlgebra(ConditionReport report)
      : HypothesisViolated("not a coefficient algebra", std::move(report)) {}
};

class CoefficientEscape : public Error {
 public:
  CoefficientEscape(std::string what, int degree, double defect)
      : Error(std::move(what)), degree_(degree), defect_(defect) {}
  int degree() const { return degree_; }
  double defect() const { return defect_; }

 private:
  int degree_;
  double defect_;
};

class SystemMismatch : public Error {
 public:
  using Error::Error;
};

class NotUnimodular : public Error {
 public:
  using Error::Error;
};

class InsufficientResolution : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownGenerator : public Error {
 public:
  UnknownGenerator(std::string name, std::size_t position)
      : Error("unknown generator '" + name + "' at position " + std::to_string(position)),
        name_(std::move(name)),
        position_(position) {}
  const std::string& name() const { return name_; }
  std::size_t position() const { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

/// The polar-model standing condition aa* in A0 failed.
class Condition54Violated : public Error {
 public:
  explicit Condition54Violated(double defect)
      : Error("aa* is not in the algebra generated by 1 and |a| (defect " +
              std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

class RhoConditionViolated : public Error {
 public:
  RhoConditionViolated(std::string what, std::size_t basis_index)
      : Error(std::move(what)), basis_index_(basis_index) {}
  /// Zero-based index of the offending basis vector.
  std::size_t basis_index() const { return basis_index_; }

 private:
  std::size_t basis_index_;
};

}  // namespace isoalg
