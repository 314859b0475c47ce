#ifndef QRES_TESTS_SUPPORT_HPP
#define QRES_TESTS_SUPPORT_HPP

#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qres/diagnostics.hpp"
#include "qres/pauli.hpp"

namespace qres::test {

// Seeded uniform draws for property tests.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Complex complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }
  Vec3C real_vec(double r) { return Vec3C::real(uniform(-r, r), uniform(-r, r), uniform(-r, r)); }
  Vec3C complex_vec(double r) { return {complex(r), complex(r), complex(r)}; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Collects warnings for the lifetime of the object.
class CaptureWarnings {
 public:
  CaptureWarnings() {
    previous_ = set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~CaptureWarnings() { set_warning_handler(previous_); }
  CaptureWarnings(const CaptureWarnings&) = delete;
  CaptureWarnings& operator=(const CaptureWarnings&) = delete;

  std::vector<std::string> messages;

 private:
  WarningHandler previous_;
};

// Sets an environment variable and restores it on destruction.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_.c_str(), old_->c_str(), 1);
    else ::unsetenv(name_.c_str());
  }
  ScopedEnv(const ScopedEnv&) = delete;
  ScopedEnv& operator=(const ScopedEnv&) = delete;

 private:
  std::string name_;
  std::optional<std::string> old_;
};

// Truncated power series of exp(A).
inline Operator2 exp_series(const Operator2& a, int terms) {
  Operator2 sum = Operator2::identity();
  Operator2 term = Operator2::identity();
  for (int k = 1; k < terms; ++k) {
    term = Complex(1.0 / k) * (term * a);
    sum = sum + term;
  }
  return sum;
}

}  // namespace qres::test

#endif  // QRES_TESTS_SUPPORT_HPP
