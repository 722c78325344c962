#pragma once

#include <stdexcept>
#include <string>

namespace kreinlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidStep : Error { using Error::Error; };
struct InvalidCoupling : Error { using Error::Error; };
struct SchemeMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct StepTooCoarse : Error { using Error::Error; };
struct NoQualifyingPoints : Error { using Error::Error; };
struct BranchAnchorFailure : Error { using Error::Error; };
struct PoleProximity : Error { using Error::Error; };
struct ResolutionInsufficient : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace kreinlab
