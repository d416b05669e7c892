#pragma once

#include <stdexcept>
#include <string>

namespace sgen {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// boiler_plant
struct PressureOutOfTable : Error { using Error::Error; };
struct NonPositivePhi : Error { using Error::Error; };
struct IntegrationDiverged : Error { using Error::Error; };

// local_control
struct NoSettling : Error { using Error::Error; };

// sysid
struct UnstableFit : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };

// hybrid_model
struct InvalidInput : Error { using Error::Error; };
struct BigMTooSmall : Error { using Error::Error; };

// uc_hl / solvers
struct DimensionMismatch : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };

// ensemble_mpc
struct OrderMismatch : Error { using Error::Error; };
struct DegenerateHull : Error { using Error::Error; };
struct InconsistentShares : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SingularSteadyStateMap : Error { using Error::Error; };
struct TransitionStalled : Error { using Error::Error; };

// polytope
struct EmptyResult : Error { using Error::Error; };
struct Unbounded : Error { using Error::Error; };

// simctl
struct SchemaError : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

}  // namespace sgen
