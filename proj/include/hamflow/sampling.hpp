#pragma once

#include <cstdint>
#include <vector>

#include "hamflow/system.hpp"

namespace hamflow {

// Weighted points on an energy level {H = e}. Weights are proportional to
// 1/||grad H|| (coarea factor of the invariant surface measure) and sum to 1.
struct SurfaceSample {
    std::vector<Phase4> points;
    std::vector<double> weights;
    double energy = 0.0;
};

struct SamplingOptions {
    double projection_tol = 1e-10;  // |H - e| after Newton projection
    int newton_max = 20;
    long max_attempts = 0;          // 0: auto (max(1e5, 2e4 * n))
    Box4 region;                    // sub-box to propose from; defaults to domain
    bool region_set = false;
};

// Uniform rejection in the box, Newton projection to {H=e} along grad H.
// Deterministic given seed. Throws EmptyLevelSetError when the level set is
// not found within the attempt budget.
SurfaceSample sample_energy_surface(const HamiltonianSystem& sys, double e,
                                    int n, std::uint64_t seed,
                                    const SamplingOptions& opt = {});

}  // namespace hamflow
