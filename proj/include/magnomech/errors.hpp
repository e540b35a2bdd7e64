#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace magnomech {

/// Stable error codes; the CLI maps these onto its exit codes and the
/// machine-readable JSON emitted on stderr.
enum class ErrorCode {
  parse,        // malformed config text
  validation,   // config/argument violates an invariant
  instability,  // operation requires a stable drift matrix
  numerical,    // singular system, non-convergence, NaN
  io,           // file system failure
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Parse or validation failure; carries one entry per violated invariant
/// (or a single entry with line info for parse errors).
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, const std::string& message,
              std::vector<std::string> issues = {})
      : Error(code, message), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class InstabilityError : public Error {
 public:
  explicit InstabilityError(double max_real_part)
      : Error(ErrorCode::instability,
              "drift matrix is not stable (max eigenvalue real part = " +
                  std::to_string(max_real_part) + " rad/s)"),
        max_real_part_(max_real_part) {}
  double max_real_part() const { return max_real_part_; }

 private:
  double max_real_part_ = 0.0;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error(ErrorCode::numerical, message) {}
};

}  // namespace magnomech
