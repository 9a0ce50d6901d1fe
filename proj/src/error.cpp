#include "dronemap/error.hpp"

namespace dronemap {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IoError: return "IoError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::FilterTooLarge: return "FilterTooLarge";
    case Errc::WindowOutOfBounds: return "WindowOutOfBounds";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InsufficientMatches: return "InsufficientMatches";
    case Errc::NoConsensus: return "NoConsensus";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::ExcessiveDrift: return "ExcessiveDrift";
    case Errc::DirectionMismatch: return "DirectionMismatch";
    case Errc::SceneTooSmall: return "SceneTooSmall";
    case Errc::RegionMismatch: return "RegionMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace dronemap
