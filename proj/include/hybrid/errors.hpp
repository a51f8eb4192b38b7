#pragma once

#include <stdexcept>
#include <string>

namespace hybrid {

enum class ErrorKind {
  MaxRoundsExceeded,
  IllegalLocalEdge,
  BudgetExceeded,
  PayloadTooLarge,
  RoundBudgetExceeded,
  AssignmentDeficit,
  RepresentativeMissing,
  SkeletonCoverage,
  Disconnected,
  InvalidArgument,
  Parse,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // Failures that a fresh seed can fix.
  bool retryable() const {
    return kind_ == ErrorKind::RoundBudgetExceeded ||
           kind_ == ErrorKind::AssignmentDeficit ||
           kind_ == ErrorKind::RepresentativeMissing ||
           kind_ == ErrorKind::SkeletonCoverage;
  }

 private:
  ErrorKind kind_;
};

}  // namespace hybrid
