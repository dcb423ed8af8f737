#pragma once

#include <stdexcept>
#include <string>

namespace geodex {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or configuration; maps to a usage failure at the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numeric breakdown (non-finite values, degenerate geometry).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A jet primitive produced a non-finite result.
class DomainError : public NumericError {
 public:
  DomainError(std::string primitive, const std::string& detail)
      : NumericError("domain error in " + primitive + ": " + detail), primitive_(std::move(primitive)) {}
  const std::string& primitive() const noexcept { return primitive_; }

 private:
  std::string primitive_;
};

class DegenerateMetricError : public NumericError {
 public:
  DegenerateMetricError(const std::string& what, double smallest_singular_value)
      : NumericError(what), smallest_singular_value_(smallest_singular_value) {}
  double smallest_singular_value() const noexcept { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

class IntegrationError : public NumericError {
 public:
  IntegrationError(const std::string& what, int step, double lambda)
      : NumericError(what), step_(step), lambda_(lambda) {}
  int step() const noexcept { return step_; }
  double lambda() const noexcept { return lambda_; }

 private:
  int step_;
  double lambda_;
};

class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, int sample, int epoch = -1)
      : NumericError(what), sample_(sample), epoch_(epoch) {}
  int sample() const noexcept { return sample_; }
  int epoch() const noexcept { return epoch_; }

 private:
  int sample_;
  int epoch_;
};

class SamplingError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// No solve converged; carries nothing beyond the message.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace geodex
