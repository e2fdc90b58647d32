#pragma once

#include <stdexcept>
#include <string>

namespace specspan {

enum class ErrorCode {
  InvalidArgument,
  KOutOfRange,
  DimensionMismatch,
  NotPsd,
  NotFinite,
  ZeroVector,
  Infeasible,
  Unbounded,
  NotInSpan,
  TooLarge,
  Degenerate,
  BadPartColumn,
  DimensionTooSmall,
  SamplingFailed,
  Parse,
  Io,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace specspan
