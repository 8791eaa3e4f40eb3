#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace lcprod {

enum class ErrorCode {
  InvalidEmbedding,
  InvalidPotential,
  UnsupportedDomain,
  InsufficientDepth,
  ShapeError,
  TailDiverges,
  HypothesisNotMet,
  DeclaredTailViolated,
  ParseError,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> block = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based block index the failure refers to, when there is one.
  std::optional<std::size_t> block() const noexcept { return block_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> block_;
};

}  // namespace lcprod
