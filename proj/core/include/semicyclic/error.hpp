#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semicyclic {

/// Coarse failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  kArgument,   // out-of-range index, malformed configuration value
  kContract,   // violated algorithm precondition (e.g. Prod loss bound)
  kDiverged,   // non-finite iterate or gradient in an SGD chain
  kSolver,     // reference optimum did not converge
  kIngestion,  // unusable input dataset
  kIo,         // filesystem failure
};

std::string_view to_string(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message);
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ChainDivergedError : public Error {
 public:
  ChainDivergedError(long step, double iterate_norm);
  long step() const noexcept { return step_; }
  double iterate_norm() const noexcept { return iterate_norm_; }

 private:
  long step_;
  double iterate_norm_;
};

[[noreturn]] void throw_argument(const std::string& message);
[[noreturn]] void throw_contract(const std::string& message);

}  // namespace semicyclic
