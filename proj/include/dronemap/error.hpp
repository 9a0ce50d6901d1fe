#pragma once

#include <stdexcept>
#include <string>

namespace dronemap {

enum class Errc {
  OutOfBounds,
  DimensionMismatch,
  IoError,
  UnsupportedFormat,
  CorruptFile,
  FilterTooLarge,
  WindowOutOfBounds,
  EmptyInput,
  InsufficientMatches,
  NoConsensus,
  IndexOutOfRange,
  NoOverlap,
  ExcessiveDrift,
  DirectionMismatch,
  SceneTooSmall,
  RegionMismatch,
  InvalidConfig,
};

const char* errc_name(Errc code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dronemap
