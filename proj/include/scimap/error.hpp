#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scimap {

enum class ErrorKind {
  MalformedIssn,
  ChecksumFailure,
  ParseError,
  DuplicateIssn,
  InvalidScheme,
  EmptyInput,
  EmptyGroup,
  ZeroTotal,
  GroupMissing,
  OracleTooLarge,
  NoConvergence,
  DegenerateInput,
  NonPositiveSample,
  SharedSupportViolation,
  ConstantPredictor,
  EmptySource,
  InvalidArgument,
  IoFailure,
  ConfigInvalid,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedIssn: return "MalformedIssn";
    case ErrorKind::ChecksumFailure: return "ChecksumFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateIssn: return "DuplicateIssn";
    case ErrorKind::InvalidScheme: return "InvalidScheme";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::ZeroTotal: return "ZeroTotal";
    case ErrorKind::GroupMissing: return "GroupMissing";
    case ErrorKind::OracleTooLarge: return "OracleTooLarge";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NonPositiveSample: return "NonPositiveSample";
    case ErrorKind::SharedSupportViolation: return "SharedSupportViolation";
    case ErrorKind::ConstantPredictor: return "ConstantPredictor";
    case ErrorKind::EmptySource: return "EmptySource";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
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

}  // namespace scimap
