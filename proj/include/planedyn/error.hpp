#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace planedyn {

enum class ErrorKind {
  InvalidArgument,
  NonFinite,
  DegenerateOverlap,
  Inconclusive,
  Overflow,
  BudgetExceeded,
  NonPositiveW,
  ProbeFailed,
  EmptyComponent,
  LeafLost,
  InvariantLeaf,
  BoundariesCross,
  NotConverging,
  ChartDegenerate,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// callers (and the CLI exit-code mapping) can tell contract violations
/// apart from usage errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateOverlap: return "DegenerateOverlap";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NonPositiveW: return "NonPositiveW";
    case ErrorKind::ProbeFailed: return "ProbeFailed";
    case ErrorKind::EmptyComponent: return "EmptyComponent";
    case ErrorKind::LeafLost: return "LeafLost";
    case ErrorKind::InvariantLeaf: return "InvariantLeaf";
    case ErrorKind::BoundariesCross: return "BoundariesCross";
    case ErrorKind::NotConverging: return "NotConverging";
    case ErrorKind::ChartDegenerate: return "ChartDegenerate";
  }
  return "Unknown";
}

}  // namespace planedyn
