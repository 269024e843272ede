#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abscompat {

enum class ErrorKind {
  NotHermitian,
  NotEffect,
  DomainError,
  NegativeSpectrum,
  DimensionMismatch,
  NotAbsolutelyCompatible,
  PostconditionFailure,
  NotCommuting,
  NotStrict,
  SumExceedsOne,
  NotStrictParams,
  NotUnitary,
  NotProjection,
  NotStrictUnitary,
  NotStrictProjection,
  OddDimension,
  PairingFailure,
  TraceNotOne,
  DetOutOfRange,
  OutsideBall,
  DegenerateSpec,
  SpectralAmbiguity,
  NotOnSphere,
  EmptyInput,
  BadMargin,
  ParseError,
  UnknownSuite,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace abscompat
