#include "lcprod/error.hpp"

namespace lcprod {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidEmbedding: return "InvalidEmbedding";
    case ErrorCode::InvalidPotential: return "InvalidPotential";
    case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::TailDiverges: return "TailDiverges";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::DeclaredTailViolated: return "DeclaredTailViolated";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> block)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      block_(block) {}

}  // namespace lcprod
