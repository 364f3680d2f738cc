#include "driftclass/error.hpp"

namespace driftclass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidOrder: return "invalid-order";
    case ErrorCode::InvalidAmplitude: return "invalid-amplitude";
    case ErrorCode::InvalidBandwidth: return "invalid-bandwidth";
    case ErrorCode::InvalidSupport: return "invalid-support";
    case ErrorCode::WrongKernelKind: return "wrong-kernel-kind";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::InvalidProbability: return "invalid-probability";
    case ErrorCode::InvalidWindow: return "invalid-window";
    case ErrorCode::DegenerateClass: return "degenerate-class";
    case ErrorCode::EmptySample: return "empty-sample";
    case ErrorCode::InvalidTruncation: return "invalid-truncation";
    case ErrorCode::InvalidConstant: return "invalid-constant";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::DegenerateModel: return "degenerate-model";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace driftclass
