#include "hamflow/sampling.hpp"

#include <cmath>
#include <random>

namespace hamflow {

SurfaceSample sample_energy_surface(const HamiltonianSystem& sys, double e,
                                    int n, std::uint64_t seed,
                                    const SamplingOptions& opt) {
    if (n < 1) throw EmptyLevelSetError("sample_energy_surface: n >= 1 required");
    const Box4& box = opt.region_set ? opt.region : sys.domain;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    long budget = opt.max_attempts > 0
                      ? opt.max_attempts
                      : std::max<long>(100000L, 20000L * n);

    SurfaceSample out;
    out.energy = e;
    out.points.reserve(n);
    out.weights.reserve(n);

    long attempts = 0;
    while ((int)out.points.size() < n && attempts < budget) {
        ++attempts;
        Phase4 y;
        for (int i = 0; i < 4; ++i)
            y(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * unif(rng);

        // Newton projection along grad H
        bool ok = false;
        for (int it = 0; it < opt.newton_max; ++it) {
            double h = sys.H(y) - e;
            if (std::abs(h) <= opt.projection_tol) {
                ok = true;
                break;
            }
            Vec4 g = sys.grad(y);
            double gn2 = g.squaredNorm();
            if (!(gn2 > sys.crit_threshold * sys.crit_threshold)) break;
            y -= (h / gn2) * g;
        }
        if (!ok) continue;
        if (!sys.domain.contains(y)) continue;
        // a projected point must stay in the proposal region (patch semantics)
        if (opt.region_set && !box.contains(y)) continue;
        double gn = sys.grad(y).norm();
        if (gn < sys.crit_threshold) continue;
        out.points.push_back(y);
        out.weights.push_back(1.0 / gn);
    }

    if ((int)out.points.size() < n)
        throw EmptyLevelSetError("level set {H=" + std::to_string(e) +
                                 "} not found: " +
                                 std::to_string(out.points.size()) + "/" +
                                 std::to_string(n) + " points after " +
                                 std::to_string(attempts) + " attempts");

    double wsum = 0.0;
    for (double w : out.weights) wsum += w;
    for (double& w : out.weights) w /= wsum;
    return out;
}

}  // namespace hamflow
