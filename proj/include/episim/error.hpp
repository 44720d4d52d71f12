#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace episim {

enum class ErrorCode {
  InvalidConfig,
  UnknownField,
  SyntaxError,
  UnknownSwitch,
  LatchingViolation,
  LockdownConflict,
  NegativeTick,
  InvalidProbability,
  UnknownRoute,
  MalformedMessage,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::UnknownField: return "unknown_field";
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::UnknownSwitch: return "unknown_switch";
    case ErrorCode::LatchingViolation: return "latching_violation";
    case ErrorCode::LockdownConflict: return "lockdown_conflict";
    case ErrorCode::NegativeTick: return "negative_tick";
    case ErrorCode::InvalidProbability: return "invalid_probability";
    case ErrorCode::UnknownRoute: return "unknown_route";
    case ErrorCode::MalformedMessage: return "malformed_message";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace episim
