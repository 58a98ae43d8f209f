#pragma once
#include <stdexcept>
#include <string>

namespace planarpeel {

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonInvolutiveTwin : MapError {
  using MapError::MapError;
};
struct Disconnected : MapError {
  using MapError::MapError;
};
struct NonPlanar : MapError {
  using MapError::MapError;
};
struct NotSimpleBoundary : MapError {
  using MapError::MapError;
};
struct NoInternalFace : MapError {
  using MapError::MapError;
};
struct NotOnBoundary : MapError {
  using MapError::MapError;
};
struct NotInA : MapError {
  using MapError::MapError;
};
struct DomainError : MapError {
  using MapError::MapError;
};
struct PerimeterTooSmall : MapError {
  using MapError::MapError;
};
struct NormalizationFailure : MapError {
  using MapError::MapError;
};
struct DisconnectedTerminals : MapError {
  using MapError::MapError;
};
struct InvariantViolation : MapError {
  using MapError::MapError;
};
struct Unstable : MapError {
  using MapError::MapError;
};
struct ParseError : MapError {
  using MapError::MapError;
};

// carries how far a bounded computation got before the budget ran out
struct BudgetExceeded : MapError {
  long long steps_done;
  explicit BudgetExceeded(const std::string& what, long long steps = -1)
      : MapError(what), steps_done(steps) {}
};

}  // namespace planarpeel
