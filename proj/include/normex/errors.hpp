#pragma once

#include <stdexcept>
#include <string>

namespace normex {

/// Base of every error raised by the library. The CLI maps all of these to
/// exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or dimensionally incompatible input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operation requires structure the descriptor does not have (lattice order,
/// finite generation).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Element is in the ambient group but not in the positive cone.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// Matrix handed to a PSD routine is not Hermitian within tolerance. Kept
/// apart from NotPsdError so callers can tell modeling bugs from genuine
/// positivity failures.
class NotHermitianError : public Error {
 public:
  NotHermitianError(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// Positivity precondition failed. Carries the observed margin.
class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double margin)
      : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// Enumeration budget exceeded; the request is refused rather than truncated.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, unsigned long long required)
      : Error(what), required_(required) {}
  unsigned long long required() const noexcept { return required_; }

 private:
  unsigned long long required_;
};

}  // namespace normex
