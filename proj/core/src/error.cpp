#include "semicyclic/error.hpp"

#include <fmt/format.h>

namespace semicyclic {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kArgument:
      return "argument";
    case ErrorCategory::kContract:
      return "contract";
    case ErrorCategory::kDiverged:
      return "diverged";
    case ErrorCategory::kSolver:
      return "solver";
    case ErrorCategory::kIngestion:
      return "ingestion";
    case ErrorCategory::kIo:
      return "io";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kArgument:
      return 2;
    case ErrorCategory::kContract:
      return 3;
    case ErrorCategory::kDiverged:
      return 4;
    case ErrorCategory::kSolver:
      return 5;
    case ErrorCategory::kIngestion:
      return 6;
    case ErrorCategory::kIo:
      return 7;
  }
  return 1;
}

Error::Error(ErrorCategory category, const std::string& message)
    : std::runtime_error(message), category_(category) {}

ChainDivergedError::ChainDivergedError(long step, double iterate_norm)
    : Error(ErrorCategory::kDiverged,
            fmt::format("SGD chain diverged at step {} (|w_t| = {})", step, iterate_norm)),
      step_(step),
      iterate_norm_(iterate_norm) {}

void throw_argument(const std::string& message) { throw Error(ErrorCategory::kArgument, message); }

void throw_contract(const std::string& message) { throw Error(ErrorCategory::kContract, message); }

}  // namespace semicyclic
