#include "hamflow/poincare.hpp"

#include <cmath>

namespace hamflow {

double TransversalCocycle::area_ratio_residual() const {
    double ws = omega0(src.u1, src.u2);
    double wd = omega0(dst.u1, dst.u2);
    return std::abs(Phi.determinant() * wd / ws - 1.0);
}

double NormalCocycle::fiber_invariance_residual() const {
    double leak = std::hypot(P(2, 0), P(2, 1));
    double scale = P.norm();
    return scale > 0.0 ? leak / scale : 0.0;
}

TransversalCocycle transversal_cocycle(const HamiltonianSystem& sys,
                                       const Phase4& y0, double T,
                                       const IntegratorConfig& cfg) {
    TransversalCocycle c;
    c.src = transversal_frame(sys, y0);
    TangentState ts = integrate_tangent(sys, y0, T, cfg);
    c.dst = transversal_frame(sys, ts.y);
    c.t = T;
    for (int j = 0; j < 2; ++j) {
        Vec4 img = ts.F * (j == 0 ? c.src.u1 : c.src.u2);
        c.Phi(0, j) = c.dst.u1.dot(img);
        c.Phi(1, j) = c.dst.u2.dot(img);
    }
    return c;
}

NormalCocycle normal_cocycle(const HamiltonianSystem& sys, const Phase4& y0,
                             double T, const IntegratorConfig& cfg) {
    NormalCocycle c;
    c.src = transversal_frame(sys, y0);
    TangentState ts = integrate_tangent(sys, y0, T, cfg);
    c.dst = transversal_frame(sys, ts.y);
    c.t = T;
    const Vec4 src_basis[3] = {c.src.u1, c.src.u2, c.src.gdir};
    const Vec4 dst_basis[3] = {c.dst.u1, c.dst.u2, c.dst.gdir};
    for (int j = 0; j < 3; ++j) {
        Vec4 img = ts.F * src_basis[j];
        for (int i = 0; i < 3; ++i) c.P(i, j) = dst_basis[i].dot(img);
    }
    return c;
}

TransversalCocycle compose(const TransversalCocycle& c1,
                           const TransversalCocycle& c2) {
    if (!c1.dst.matches(c2.src))
        throw FrameMismatchError(
            "compose: c1.dst and c2.src frames differ beyond 1e-9");
    TransversalCocycle c;
    c.src = c1.src;
    c.dst = c2.dst;
    c.Phi = c2.Phi * c1.Phi;
    c.t = c1.t + c2.t;
    return c;
}

double flow_direction_kill_residual(const HamiltonianSystem& sys,
                                    const TransversalCocycle& c,
                                    const Mat4& F) {
    Vec4 img = F * sys.field(c.src.base);
    Vec4 proj = img - c.dst.xdir.dot(img) * c.dst.xdir;  // onto N(dst)
    return proj.norm() / F.norm();
}

}  // namespace hamflow
