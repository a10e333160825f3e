#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamflow/lyapunov.hpp"

namespace hamflow {

enum class DominationClass { Dominated, NotDominated };

struct DominationReport {
    int m = 1;                       // domination window, time units
    std::vector<double> ratios;      // one per sampled orbit time
    double worst = 0.0;              // max of ratios
    DominationClass classification = DominationClass::NotDominated;
    bool trivial_splitting = false;  // no splitting: NotDominated by convention
    std::string orbit;               // descriptor
};

struct HyperbolicityCertificate {
    double C = 0.0;
    double theta = 1.0;              // fitted ratio <= C theta^t
    int contraction_m = 0;           // smallest m with uniform ratio <= 1/2
    bool satisfied = false;
    int n_points = 0;
    int n_trivial = 0;
};

struct DominationOptions {
    // window (in units of m) for the finite-window direction estimates
    int direction_window_factor = 4;
    double splitting_threshold = 1e-2;
    // explicitly supplied directions (frame coordinates at each sample time)
    // bypass the estimation; used by the oracle tests
    std::optional<std::pair<Vec2, Vec2>> supplied_directions;
};

// Ratio ||Phi^m n-|| / ||Phi^m n+|| at each integer time t_k <= T - m along
// the orbit of y0; Dominated(m) iff the worst ratio <= 1/2.
DominationReport domination_scan(const HamiltonianSystem& sys, const Phase4& y0,
                                 int m, double T,
                                 const IntegratorConfig& cfg = {},
                                 const DominationOptions& opt = {});

// Relative residual of the 3-volume conservation identity
// sin(g0) ||X(x)|| = sin(g_t) ||X(phi^t x)|| s+ s-.
double conservation_identity_residual(const HamiltonianSystem& sys,
                                      const Phase4& y0, double t,
                                      const IntegratorConfig& cfg = {},
                                      const DominationOptions& opt = {});

// Uniform-hyperbolicity diagnostic over a sampled energy surface: smallest
// m <= m_max with ratio <= 1/2 at every sampled point, then an exponential
// envelope (C, theta) fitted by least squares on log-ratios over integer t.
HyperbolicityCertificate anosov_diagnostic(const HamiltonianSystem& sys,
                                           double e, int m_max, int n, double T,
                                           std::uint64_t seed,
                                           const IntegratorConfig& cfg = {},
                                           const DominationOptions& opt = {},
                                           const SamplingOptions& sopt = {});

}  // namespace hamflow
