#include "netident/errors.hpp"

namespace netident {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyDictionary: return "EmptyDictionary";
    case ErrorCode::BasisNonzeroAtOrigin: return "BasisNonzeroAtOrigin";
    case ErrorCode::NotPurelyNonlinear: return "NotPurelyNonlinear";
    case ErrorCode::UnmeasuredSink: return "UnmeasuredSink";
    case ErrorCode::UnsupportedTopology: return "UnsupportedTopology";
    case ErrorCode::MissingCoefficients: return "MissingCoefficients";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::GatingExhausted: return "GatingExhausted";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DictionaryMismatch: return "DictionaryMismatch";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace netident
