#pragma once

#include <stdexcept>

namespace vservo {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct NonFiniteObjective : Error { using Error::Error; };
struct DegenerateMotion : Error { using Error::Error; };
struct InsufficientCorrespondences : Error { using Error::Error; };
struct DegenerateRays : Error { using Error::Error; };
struct NoChainableTimesteps : Error { using Error::Error; };
struct SeedPairNotFound : Error { using Error::Error; };
struct OptimizationDiverged : Error { using Error::Error; };
struct InsufficientDetections : Error { using Error::Error; };
struct AmbiguousPose : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct JointLimitViolation : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

}  // namespace vservo
