#pragma once

#include "hamflow/system.hpp"

namespace hamflow {

// Orthonormal frame of the transversal fiber N_y = span(X_H)^perp ∩ ker dH
// at a regular point, together with the flow and gradient unit directions.
// X_H ⟂ grad H always holds here (grad' J grad = 0), so (u1,u2,xdir,gdir) is
// an orthonormal basis of R^4 and omega0(u1,u2) > 0 by the orientation rule.
struct TransversalFrame {
    Phase4 base;
    Vec4 u1, u2;   // orthonormal basis of the 2-dim transversal fiber
    Vec4 xdir;     // X_H / ||X_H||
    Vec4 gdir;     // grad H / ||grad H||

    // Coordinates of (the fiber component of) v in the (u1,u2) basis.
    Vec2 project(const Vec4& v) const { return {u1.dot(v), u2.dot(v)}; }
    Vec4 embed(const Vec2& c) const { return c(0) * u1 + c(1) * u2; }

    // Frames agree if base points and frame vectors match to tol.
    bool matches(const TransversalFrame& o, double tol = 1e-9) const;
};

// Deterministic frame construction. Orientation tie-break: u1 is the
// normalized projection onto the fiber of the coordinate axis e_k with the
// largest projection norm (smallest k on ties); u2 completes the basis with
// omega0(u1,u2) > 0. Throws RegularityError near critical points.
TransversalFrame transversal_frame(const HamiltonianSystem& sys, const Phase4& y);

}  // namespace hamflow
