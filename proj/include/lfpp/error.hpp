#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lfpp {

enum class ErrorKind {
  NonDivisible,
  OutOfFrame,
  OutOfBox,
  NotNested,
  NotContained,
  TooLarge,
  DimensionMismatch,
  Disconnected,
  EmptySpec,
  TooManyTerminals,
  NotAPath,
  BadP,
  ZeroMean,
  AssumptionViolated,
  GridMismatch,
  DegenerateData,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonDivisible: return "NonDivisible";
    case ErrorKind::OutOfFrame: return "OutOfFrame";
    case ErrorKind::OutOfBox: return "OutOfBox";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::NotContained: return "NotContained";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::EmptySpec: return "EmptySpec";
    case ErrorKind::TooManyTerminals: return "TooManyTerminals";
    case ErrorKind::NotAPath: return "NotAPath";
    case ErrorKind::BadP: return "BadP";
    case ErrorKind::ZeroMean: return "ZeroMean";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lfpp
