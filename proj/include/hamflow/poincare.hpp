#pragma once

#include "hamflow/frames.hpp"
#include "hamflow/integrator.hpp"

namespace hamflow {

// Transversal linear Poincare cocycle between the deterministic frames at the
// endpoints: Phi(i,j) = < dst.u_i, F src.u_j >, F = D phi^t.
struct TransversalCocycle {
    TransversalFrame src, dst;
    Mat2 Phi = Mat2::Identity();
    double t = 0.0;

    // | det(Phi) * omega0(dst.u1,dst.u2) / omega0(src.u1,src.u2) - 1 |
    double area_ratio_residual() const;
};

// Linear Poincare cocycle on the 3-dim normal fiber N = span(u1,u2,gdir),
// basis order (u1, u2, gdir). Leaves the 2-dim transversal block invariant:
// block upper-triangular in this basis (rows 3 over columns 1,2 vanish).
struct NormalCocycle {
    TransversalFrame src, dst;
    Mat3 P = Mat3::Identity();
    double t = 0.0;

    double fiber_invariance_residual() const;  // ||P(3,1..2)|| / ||P||
};

TransversalCocycle transversal_cocycle(const HamiltonianSystem& sys,
                                       const Phase4& y0, double T,
                                       const IntegratorConfig& cfg = {});

NormalCocycle normal_cocycle(const HamiltonianSystem& sys, const Phase4& y0,
                             double T, const IntegratorConfig& cfg = {});

// Keeps frames as-is: requires c1.dst == c2.src (same base point and frame
// vectors to 1e-9); Phi = c2.Phi * c1.Phi. Throws FrameMismatchError.
TransversalCocycle compose(const TransversalCocycle& c1,
                           const TransversalCocycle& c2);

// Residual of the projection killing the flow direction:
// || proj_{N(dst)} F X_H(src) || / ||F||.
double flow_direction_kill_residual(const HamiltonianSystem& sys,
                                    const TransversalCocycle& c,
                                    const Mat4& F);

}  // namespace hamflow
