#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hema {

/// Error categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  InvalidArgument,
  InfeasibleBatteryDraw,
  OutOfRange,
  AlphaOutOfRange,
  GridOutOfRange,
  CoeffOutOfTable,
  DimensionMismatch,
  InconsistentBounds,
  OracleTooLarge,
  Infeasible,
  MaxIterations,
  BatteryBoundsBreach,
  DemandExceedsCapacity,
  MismatchedScenario,
  Config,
  Io,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InfeasibleBatteryDraw: return "InfeasibleBatteryDraw";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::GridOutOfRange: return "GridOutOfRange";
    case ErrorKind::CoeffOutOfTable: return "CoeffOutOfTable";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InconsistentBounds: return "InconsistentBounds";
    case ErrorKind::OracleTooLarge: return "OracleTooLarge";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::BatteryBoundsBreach: return "BatteryBoundsBreach";
    case ErrorKind::DemandExceedsCapacity: return "DemandExceedsCapacity";
    case ErrorKind::MismatchedScenario: return "MismatchedScenario";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace hema
