#include "hamflow/frames.hpp"

#include <cmath>

namespace hamflow {

bool TransversalFrame::matches(const TransversalFrame& o, double tol) const {
    return (base - o.base).norm() <= tol && (u1 - o.u1).norm() <= tol &&
           (u2 - o.u2).norm() <= tol;
}

TransversalFrame transversal_frame(const HamiltonianSystem& sys,
                                   const Phase4& y) {
    Vec4 g = sys.gradient(y);
    double gn = g.norm();
    if (gn < sys.crit_threshold)
        throw RegularityError("transversal_frame at near-critical point, ||grad|| = " +
                                  std::to_string(gn),
                              gn);
    Vec4 x = symplectic_J() * g;
    double xn = x.norm();  // = gn in the Euclidean metric, J orthogonal
    if (xn < sys.crit_threshold)
        throw RegularityError("transversal_frame: ||X_H|| below cutoff", xn);

    TransversalFrame f;
    f.base = y;
    f.xdir = x / xn;
    f.gdir = g / gn;

    // projector onto the fiber; grad' J grad = 0 makes xdir ⟂ gdir exact
    auto project = [&](const Vec4& v) -> Vec4 {
        return v - f.xdir.dot(v) * f.xdir - f.gdir.dot(v) * f.gdir;
    };

    // u1: projected coordinate axis of largest norm, smallest index on ties
    int best = 0;
    double best_norm = -1.0;
    Vec4 proj[4];
    for (int k = 0; k < 4; ++k) {
        proj[k] = project(Vec4::Unit(k));
        double nk = proj[k].norm();
        if (nk > best_norm + 1e-14) {
            best_norm = nk;
            best = k;
        }
    }
    f.u1 = proj[best] / best_norm;

    // u2: remaining fiber direction, orthonormalized against u1
    int second = -1;
    double second_norm = -1.0;
    for (int k = 0; k < 4; ++k) {
        if (k == best) continue;
        Vec4 w = proj[k] - f.u1.dot(proj[k]) * f.u1;
        double nk = w.norm();
        if (nk > second_norm + 1e-14) {
            second_norm = nk;
            second = k;
        }
    }
    if (second < 0 || second_norm < 1e-12)
        throw RegularityError("transversal_frame: degenerate fiber", gn);
    Vec4 u2 = (proj[second] - f.u1.dot(proj[second]) * f.u1) / second_norm;

    // orientation: omega0(u1, u2) > 0 (nondegenerate at regular points)
    if (omega0(f.u1, u2) < 0.0) u2 = -u2;
    f.u2 = u2;
    return f;
}

}  // namespace hamflow
