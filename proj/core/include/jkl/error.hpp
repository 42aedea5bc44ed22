#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace jkl {

/// Base class for all library failures that are not precondition violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument shapes do not match the network (wrong state length, bad index).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Applying a reaction would leave the non-negative lattice.
class ConservationViolation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Stability analysis cannot proceed for this network.
class AnalysisError : public Error {
 public:
  enum class Code { CubicUnsupported, QuadraticObstruction, WeightNotFound, InvalidWeight };

  AnalysisError(Code code, const std::string& message) : Error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// No strictly positive weight vector exists; `obstructing()` lists reaction indices
/// whose columns are entrywise non-positive with a negative entry.
class WeightNotFound : public AnalysisError {
 public:
  WeightNotFound(const std::string& message, std::vector<std::size_t> obstructing)
      : AnalysisError(Code::WeightNotFound, message), obstructing_(std::move(obstructing)) {}
  const std::vector<std::size_t>& obstructing() const noexcept { return obstructing_; }

 private:
  std::vector<std::size_t> obstructing_;
};

/// Integrator or solver failure (step-size underflow, NaN propensities, oversize state sets).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace jkl
