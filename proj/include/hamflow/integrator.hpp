#pragma once

#include <vector>

#include "hamflow/system.hpp"

namespace hamflow {

enum class Method { ImplicitMidpoint, Gauss2 };

struct IntegratorConfig {
    double dt = 1e-3;
    Method method = Method::ImplicitMidpoint;
    double newton_tol = 1e-13;
    int newton_max = 30;
    double energy_tol = 1e-8;  // <= 0 disables the per-step energy check
    bool box_abort = true;
};

// Phase point bundled with the fundamental matrix of the variational flow.
struct TangentState {
    Phase4 y = Phase4::Zero();
    Mat4 F = Mat4::Identity();  // D phi^t, symplectic up to tolerance
    double t = 0.0;
};

struct OrbitSegment {
    std::vector<double> times;
    std::vector<TangentState> states;
};

// One-step engine. The tangent matrix is propagated by the exact differential
// of the discrete one-step map (Cayley form for midpoint, internal
// differentiation for gauss2), so F is symplectic by structure.
class Stepper {
public:
    Stepper(const HamiltonianSystem& sys, const IntegratorConfig& cfg);

    // Advance (y, F) by a signed step h. Throws StepError on Newton failure.
    void step(Phase4& y, Mat4& F, double h) const;

    // Advance by time T (either sign) on the uniform |cfg.dt| grid, the last
    // step shortened to land on T exactly. Calls the observer after every
    // step when given. Enforces box/energy policy of cfg.
    template <typename Obs>
    void run(Phase4& y, Mat4& F, double& t, double T, Obs&& obs) const;
    void run(Phase4& y, Mat4& F, double& t, double T) const;

    const HamiltonianSystem& system() const { return *sys_; }
    const IntegratorConfig& config() const { return cfg_; }

private:
    void step_midpoint(Phase4& y, Mat4& F, double h) const;
    void step_gauss2(Phase4& y, Mat4& F, double h) const;

    const HamiltonianSystem* sys_;
    IntegratorConfig cfg_;
};

// Integrate the flow from y0 over [0, T], states sampled at every step.
OrbitSegment integrate(const HamiltonianSystem& sys, const Phase4& y0, double T,
                       const IntegratorConfig& cfg = {});

// Final state only (base point + fundamental matrix).
TangentState integrate_tangent(const HamiltonianSystem& sys, const Phase4& y0,
                               double T, const IntegratorConfig& cfg = {});

template <typename Obs>
void Stepper::run(Phase4& y, Mat4& F, double& t, double T, Obs&& obs) const {
    const double dir = (T >= 0.0) ? 1.0 : -1.0;
    const double dt = cfg_.dt * dir;
    const double H0 = sys_->H(y);
    double remaining = T;
    while (dir * remaining > 0.0) {
        double h = (dir * remaining > cfg_.dt) ? dt : remaining;
        step(y, F, h);
        remaining -= h;
        t += h;
        if (cfg_.box_abort && !sys_->domain.contains(y))
            throw EscapeError("orbit left the domain box", t);
        if (cfg_.energy_tol > 0.0) {
            double drift = std::abs(sys_->H(y) - H0);
            if (drift > cfg_.energy_tol)
                throw StepError("energy drift " + std::to_string(drift) +
                                " exceeds tolerance at t = " + std::to_string(t));
        }
        obs(t, y, F);
    }
}

}  // namespace hamflow
