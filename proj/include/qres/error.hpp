#ifndef QRES_ERROR_HPP
#define QRES_ERROR_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qres {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: parse failures and violated config invariants.
/// The CLI maps this family to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (divergence, non-identifiable fit, ...).
/// The CLI maps this family to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ParseError : public ConfigError {
 public:
  ParseError(int line, std::string reason)
      : ConfigError("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}
  int line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  int line_;
  std::string reason_;
};

/// One or more config keys with out-of-range or mistyped values. key() and
/// reason() describe the first violation; issues() lists all of them.
class ValidationError : public ConfigError {
 public:
  using Issue = std::pair<std::string, std::string>;

  ValidationError(std::string key, std::string reason)
      : ValidationError(std::vector<Issue>{{std::move(key), std::move(reason)}}) {}
  explicit ValidationError(std::vector<Issue> issues)
      : ConfigError(join(issues)), issues_(std::move(issues)) {}

  const std::string& key() const noexcept { return issues_.front().first; }
  const std::string& reason() const noexcept { return issues_.front().second; }
  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<Issue>& v) {
    std::string out;
    for (const auto& [k, r] : v) out += (out.empty() ? "" : "; ") + k + ": expected " + r;
    return out;
  }
  std::vector<Issue> issues_;
};

/// Several violated invariants of one configuration, reported together.
class InvalidConfig : public ConfigError {
 public:
  explicit InvalidConfig(std::vector<std::string> violations)
      : ConfigError(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid config:";
    for (const auto& s : v) out += " [" + s + "]";
    return out;
  }
  std::vector<std::string> violations_;
};

class DegenerateGenerator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Closed-form weak value at an exact resonance zero.
class Diverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Post-selection overlap <f|U|i> too small to divide by.
class DivergedOverlap : public Diverged {
 public:
  explicit DivergedOverlap(std::complex<double> overlap)
      : Diverged("post-selection overlap underflow"), overlap_(overlap) {}
  std::complex<double> overlap() const noexcept { return overlap_; }

 private:
  std::complex<double> overlap_;
};

class StepTooLarge : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ZeroBaseProbability : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoPeak : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OutOfRange : public NumericalError {
 public:
  OutOfRange(const std::string& what, double argument) : NumericalError(what), argument_(argument) {}
  double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

class MissingFieldSign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qres

#endif  // QRES_ERROR_HPP
