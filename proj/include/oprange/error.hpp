#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oprange {

enum class ErrorKind {
  NotSquare,
  NotHermitian,
  NotPsd,
  DimensionMismatch,
  NoFactorization,
  EmptyList,
  NotConverged,
  HypothesisViolated,
  NotNested,
  OutOfFormDomain,
  NotOrthogonal,
  NotSpanning,
  NotContraction,
  NotOperator,
  InvalidZ,
  NotInvertible,
  RankDeficientSource,
  InvalidTolerance,
  InvalidArgument,
  Parse,
  Io,
  ConfigParse,
  UnknownPipeline,
  UnknownFixture,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoFactorization: return "NoFactorization";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::OutOfFormDomain: return "OutOfFormDomain";
    case ErrorKind::NotOrthogonal: return "NotOrthogonal";
    case ErrorKind::NotSpanning: return "NotSpanning";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::NotOperator: return "NotOperator";
    case ErrorKind::InvalidZ: return "InvalidZ";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::RankDeficientSource: return "RankDeficientSource";
    case ErrorKind::InvalidTolerance: return "InvalidTolerance";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::UnknownPipeline: return "UnknownPipeline";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace oprange
