#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netident {

enum class ErrorCode {
  Parse,
  InvalidArgument,
  CycleDetected,
  Disconnected,
  DuplicateEdge,
  SelfLoop,
  EmptyDictionary,
  BasisNonzeroAtOrigin,
  NotPurelyNonlinear,
  UnmeasuredSink,
  UnsupportedTopology,
  MissingCoefficients,
  NonFiniteState,
  InsufficientSamples,
  OrderTooHigh,
  GatingExhausted,
  RankDeficient,
  DictionaryMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; `code()` tells
// callers which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netident
