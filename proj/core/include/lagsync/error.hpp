#pragma once

#include <stdexcept>
#include <string>

namespace lagsync {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LAGSYNC_DEFINE_ERROR(Name)                 \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& what_arg)     \
        : Error(std::string(#Name ": ") + what_arg) {} \
  }

// numerics
LAGSYNC_DEFINE_ERROR(NonPositiveExponent);
LAGSYNC_DEFINE_ERROR(InvalidExponent);
// network
LAGSYNC_DEFINE_ERROR(InvalidGraph);
LAGSYNC_DEFINE_ERROR(NotRootReachable);
LAGSYNC_DEFINE_ERROR(NoCandidateFound);
// agents
LAGSYNC_DEFINE_ERROR(DimensionMismatch);
LAGSYNC_DEFINE_ERROR(SingularInertia);
// observer / controller
LAGSYNC_DEFINE_ERROR(IsolatedAgent);
LAGSYNC_DEFINE_ERROR(GainConditionViolated);
LAGSYNC_DEFINE_ERROR(InvalidExponents);
LAGSYNC_DEFINE_ERROR(UncertifiedGains);
// simulation
LAGSYNC_DEFINE_ERROR(NonFiniteState);
LAGSYNC_DEFINE_ERROR(Divergence);
LAGSYNC_DEFINE_ERROR(AssumptionViolated);

#undef LAGSYNC_DEFINE_ERROR

/// A bounds certificate failed; carries a human-readable witness.
class BoundViolated : public Error {
 public:
  BoundViolated(const std::string& what_arg, std::string witness)
      : Error("BoundViolated: " + what_arg), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

/// Malformed configuration text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error("ParseError at " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// A configuration key failed validation.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& constraint)
      : Error("ValidationError: '" + key + "': " + constraint), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace lagsync
