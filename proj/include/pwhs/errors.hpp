#pragma once

#include <stdexcept>
#include <string>

namespace pwhs {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidFieldSpec : Error {
  using Error::Error;
};

struct EvaluationAtSingularity : Error {
  using Error::Error;
};

struct StencilHitsSingularity : Error {
  using Error::Error;
};

struct NotInSlidingRegion : Error {
  using Error::Error;
};

struct DegenerateDenominator : Error {
  using Error::Error;
};

struct MultiplicityExceedsKMax : Error {
  using Error::Error;
};

struct UnsupportedVariant : Error {
  using Error::Error;
};

struct OrbitUnboundedAtAngle : Error {
  using Error::Error;
};

struct StepSizeUnderflow : Error {
  using Error::Error;
};

struct StartAtDoubleTangency : Error {
  using Error::Error;
};

struct NoReturn : Error {
  using Error::Error;
};

struct HitSingularity : Error {
  using Error::Error;
};

struct DegenerateParameters : Error {
  using Error::Error;
};

struct ConditionViolated : Error {
  using Error::Error;
};

struct NoAdmissibleCycle : Error {
  using Error::Error;
};

struct NoSignChange : Error {
  using Error::Error;
};

struct IntegrationFailure : Error {
  using Error::Error;
};

struct TableRowMismatch : Error {
  using Error::Error;
};

struct NoCriticalPoint : Error {
  using Error::Error;
};

struct ScenarioError : Error {
  using Error::Error;
};

struct IoFailure : Error {
  using Error::Error;
};

}  // namespace pwhs
