#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace driftclass {

enum class ErrorCode {
  InvalidOrder,
  InvalidAmplitude,
  InvalidBandwidth,
  InvalidSupport,
  WrongKernelKind,
  Domain,
  InvalidProbability,
  InvalidWindow,
  DegenerateClass,
  EmptySample,
  InvalidTruncation,
  InvalidConstant,
  OutOfRange,
  DegenerateModel,
  InsufficientData,
  InvalidArgument,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace driftclass
