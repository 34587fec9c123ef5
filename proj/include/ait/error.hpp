#pragma once

#include <stdexcept>
#include <string>

namespace ait {

/// Base of every error raised by the library. `exit_code()` is the process
/// status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const noexcept { return 1; }
};

/// Malformed input, bad flag, violated precondition.
class UsageError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : UsageError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CorruptFile : public UsageError {
 public:
  using UsageError::UsageError;
};

class VersionUnknown : public UsageError {
 public:
  using UsageError::UsageError;
};

class DigestMismatch : public UsageError {
 public:
  using UsageError::UsageError;
};

/// A search or enumeration ran out of its configured budget.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// A bounded search finished without a witness.
class NotFound : public BudgetExhausted {
 public:
  using BudgetExhausted::BudgetExhausted;
};

/// A value that must be looked up in a complexity table is not there.
class OutOfTable : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ait
