#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fluct {

enum class ErrorKind {
  InvalidArgument,
  NonProbability,
  EmptySupport,
  ResourceCap,
  TailNotDecayed,
  NotLeftContinuous,
  SpanNotOne,
  MissingCumulant,
  FitUnstable,
  FitDiagnostic,
  TruncationMismatch,
  NegativeIndex,
  InsufficientLength,
  DomainGap,
  GridTooShort,
  Config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fluct
