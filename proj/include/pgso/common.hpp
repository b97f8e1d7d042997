#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pgso {

enum class ErrorCode {
  MalformedJson,
  UnknownConceptRef,
  DuplicateName,
  CycleDetected,
  BadRelType,
  ConstraintViolation,
  RuleNotApplicable,
  SelfMerge,
  NonConvergence,
  OrphanEdge,
  UnresolvableTemplate,
  MismatchedOrigin,
  ThetaOrder,
  IoError,
  AnswerMismatch,
};

const char* to_string(ErrorCode c);

struct Error {
  ErrorCode code;
  std::string message;
};

// Minimal expected-like wrapper; std::expected is C++23 and the rest of the
// codebase only needs ok/value/error.
template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error err) : v_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

template <>
class Result<void> {
 public:
  Result() = default;
  Result(Error err) : err_{std::move(err)} {}
  bool ok() const { return err_.empty(); }
  explicit operator bool() const { return ok(); }
  const Error& error() const { return err_.front(); }

 private:
  std::vector<Error> err_;  // empty = success
};

inline Error make_error(ErrorCode code, std::string message) {
  return Error{code, std::move(message)};
}

// Non-fatal diagnostics (defaulted stats, skipped rules, ...).
using Warnings = std::vector<std::string>;

enum class LogLevel { Debug = 0, Info = 1, Warn = 2 };

// Level comes from PGSO_LOG (debug|info|warn); default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

}  // namespace pgso
