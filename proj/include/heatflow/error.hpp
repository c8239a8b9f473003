#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heatflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (negative order, b <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Non-convergence, overflow or a non-finite value produced mid-computation.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Mesh topology violations: out-of-range indices, non-manifold edges,
/// isolated vertices, degenerate faces.
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Dimension mismatch between fields, operators and stacks.
class DimensionError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Forward-Euler step violates delta * lambda_max < 2.
class StabilityError : public NumericError {
public:
  StabilityError(double step, double lambda_max)
      : NumericError("forward Euler step is unstable: step * lambda_max = " +
                     std::to_string(step * lambda_max) + " (step " + std::to_string(step) +
                     ", lambda_max " + std::to_string(lambda_max) + "), must be < 2"),
        product_(step * lambda_max) {}

  double product() const noexcept { return product_; }

private:
  double product_;
};

}  // namespace heatflow
