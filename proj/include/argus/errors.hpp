#pragma once

#include <stdexcept>
#include <string>

namespace argus {

// Failure categories surfaced by the library.  Callers that need to branch on
// the kind of failure (retry loops, CLI exit codes, per-pair error manifests)
// switch on code() instead of parsing message text.
enum class Errc {
  // input validation
  EmptySource,
  MissingId,
  DuplicateVideoModelKey,
  EmptyTarget,
  SchemaError,
  InconsistentInput,
  // judge transport
  NetworkExhausted,
  AuthError,
  HttpError,
  MalformedEndpointReply,
  FixtureMissing,
  // judge response interpretation
  LineCountMismatch,
  UnknownLabel,
  MissingField,
  EvidenceOutOfRange,
  // scoring and analytics
  InstanceTooLarge,
  DirectionMismatch,
  DegenerateInput,
  UnbalancedPanel,
  MissingVerdicts,
  // configuration / command line
  UsageError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptySource: return "EmptySource";
    case Errc::MissingId: return "MissingId";
    case Errc::DuplicateVideoModelKey: return "DuplicateVideoModelKey";
    case Errc::EmptyTarget: return "EmptyTarget";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InconsistentInput: return "InconsistentInput";
    case Errc::NetworkExhausted: return "NetworkExhausted";
    case Errc::AuthError: return "AuthError";
    case Errc::HttpError: return "HttpError";
    case Errc::MalformedEndpointReply: return "MalformedEndpointReply";
    case Errc::FixtureMissing: return "FixtureMissing";
    case Errc::LineCountMismatch: return "LineCountMismatch";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::MissingField: return "MissingField";
    case Errc::EvidenceOutOfRange: return "EvidenceOutOfRange";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::DirectionMismatch: return "DirectionMismatch";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::UnbalancedPanel: return "UnbalancedPanel";
    case Errc::MissingVerdicts: return "MissingVerdicts";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Transport failure that a retry loop is allowed to re-attempt (HTTP 429,
// 5xx, connect/read errors).  Everything else fails fast.
class TransientError : public Error {
 public:
  TransientError(Errc code, const std::string& message) : Error(code, message) {}
};

}  // namespace argus
