#pragma once

// Seeded random parameter sets for property checks.  Never used by the PDE
// pipeline.

#include <cstdint>
#include <random>

#include "ccm/model.hpp"

namespace ccm {

using Rng = std::mt19937_64;

/// Valid parameter set with rates and diffusivities in [0.2, 3], a and b
/// log-uniform in [0.05, 20], m log-uniform in [0.01, 10] and l in [0, 2].
/// m and l are set to exactly 0 one time in ten each, so that degenerate
/// branches get exercised.
ModelParams random_params(Rng& rng);

double log_uniform(Rng& rng, double lo, double hi);

struct CheckSummary {
  std::size_t samples = 0;
  double max_equilibrium_residual = 0.0;
  double max_speed_mismatch = 0.0;  // closed-form c1 vs numeric minimisation
  std::size_t invadable_cases = 0;
};

/// Equilibrium residuals and linear-speed agreement over random parameter
/// sets drawn from `seed`.
CheckSummary run_random_checks(std::uint64_t seed, std::size_t samples);

}  // namespace ccm
