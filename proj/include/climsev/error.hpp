#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace climsev {

enum class ErrorCode {
  MalformedRow,
  DuplicateStationId,
  CoordinateOutOfHardBounds,
  UnknownMonthDay,
  UnknownWindow,
  EmptySamples,
  EmptyStationList,
  InvalidGrid,
  GridTooSmall,
  NonMonotoneLevels,
  NonContiguousState,
  UnjoinableStation,
  DegenerateGroup,
  ZeroWithinVariance,
  EmptyValues,
  InvalidArgument,
  MalformedRaster,
  MalformedMask,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateStationId: return "DuplicateStationId";
    case ErrorCode::CoordinateOutOfHardBounds: return "CoordinateOutOfHardBounds";
    case ErrorCode::UnknownMonthDay: return "UnknownMonthDay";
    case ErrorCode::UnknownWindow: return "UnknownWindow";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::EmptyStationList: return "EmptyStationList";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NonMonotoneLevels: return "NonMonotoneLevels";
    case ErrorCode::NonContiguousState: return "NonContiguousState";
    case ErrorCode::UnjoinableStation: return "UnjoinableStation";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::ZeroWithinVariance: return "ZeroWithinVariance";
    case ErrorCode::EmptyValues: return "EmptyValues";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedRaster: return "MalformedRaster";
    case ErrorCode::MalformedMask: return "MalformedMask";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code and
/// a message with whatever context (line, column, station id, path) applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace climsev
