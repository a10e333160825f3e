#include "hamflow/integrator.hpp"

#include <cmath>

namespace hamflow {

namespace {
// 2-stage Gauss-Legendre tableau (order 4, symplectic)
const double kA11 = 0.25;
const double kA12 = 0.25 - std::sqrt(3.0) / 6.0;
const double kA21 = 0.25 + std::sqrt(3.0) / 6.0;
const double kA22 = 0.25;
const double kC1 = 0.5 - std::sqrt(3.0) / 6.0;
const double kC2 = 0.5 + std::sqrt(3.0) / 6.0;

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
}  // namespace

Stepper::Stepper(const HamiltonianSystem& sys, const IntegratorConfig& cfg)
    : sys_(&sys), cfg_(cfg) {
    if (!(cfg.dt > 0.0)) throw StepError("IntegratorConfig.dt must be > 0");
}

void Stepper::step(Phase4& y, Mat4& F, double h) const {
    if (cfg_.method == Method::ImplicitMidpoint)
        step_midpoint(y, F, h);
    else
        step_gauss2(y, F, h);
}

// y+ = y + h X(m), m the fixed point of m = y + (h/2) X(m). The one-step
// differential is the Cayley transform (I - h/2 A)^{-1} (I + h/2 A) with
// A = DX(m), symplectic whenever A = J S with S symmetric.
void Stepper::step_midpoint(Phase4& y, Mat4& F, double h) const {
    Phase4 m = y + 0.5 * h * sys_->field(y);
    bool converged = false;
    for (int it = 0; it < cfg_.newton_max; ++it) {
        Vec4 r = m - y - 0.5 * h * sys_->field(m);
        Mat4 Jr = Mat4::Identity() - 0.5 * h * sys_->linearized(m);
        Vec4 dm = Jr.partialPivLu().solve(r);
        m -= dm;
        if (dm.norm() <= cfg_.newton_tol * (1.0 + m.norm())) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw StepError("implicit midpoint Newton did not converge");
    Mat4 A = sys_->linearized(m);
    Mat4 Minus = Mat4::Identity() - 0.5 * h * A;
    Mat4 Plus = Mat4::Identity() + 0.5 * h * A;
    Mat4 G = Minus.partialPivLu().solve(Plus);
    y = 2.0 * m - y;
    F = (G * F).eval();
}

void Stepper::step_gauss2(Phase4& y, Mat4& F, double h) const {
    Vec4 f0 = sys_->field(y);
    Phase4 g1 = y + h * kC1 * f0;
    Phase4 g2 = y + h * kC2 * f0;

    bool converged = false;
    for (int it = 0; it < cfg_.newton_max; ++it) {
        Vec4 x1 = sys_->field(g1), x2 = sys_->field(g2);
        Vec8 r;
        r.head<4>() = g1 - y - h * (kA11 * x1 + kA12 * x2);
        r.tail<4>() = g2 - y - h * (kA21 * x1 + kA22 * x2);
        Mat4 A1 = sys_->linearized(g1), A2 = sys_->linearized(g2);
        Mat8 Jr;
        Jr.block<4, 4>(0, 0) = Mat4::Identity() - h * kA11 * A1;
        Jr.block<4, 4>(0, 4) = -h * kA12 * A2;
        Jr.block<4, 4>(4, 0) = -h * kA21 * A1;
        Jr.block<4, 4>(4, 4) = Mat4::Identity() - h * kA22 * A2;
        Vec8 d = Jr.partialPivLu().solve(r);
        g1 -= d.head<4>();
        g2 -= d.tail<4>();
        if (d.norm() <= cfg_.newton_tol * (1.0 + g1.norm() + g2.norm())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw StepError("gauss2 stage Newton did not converge");

    Vec4 x1 = sys_->field(g1), x2 = sys_->field(g2);
    Mat4 A1 = sys_->linearized(g1), A2 = sys_->linearized(g2);

    // internal differentiation: K_i = A_i (I + h sum_j a_ij K_j)
    Mat8 L;
    L.block<4, 4>(0, 0) = Mat4::Identity() - h * kA11 * A1;
    L.block<4, 4>(0, 4) = -h * kA12 * A1;
    L.block<4, 4>(4, 0) = -h * kA21 * A2;
    L.block<4, 4>(4, 4) = Mat4::Identity() - h * kA22 * A2;
    Eigen::Matrix<double, 8, 4> rhs;
    rhs.block<4, 4>(0, 0) = A1;
    rhs.block<4, 4>(4, 0) = A2;
    Eigen::Matrix<double, 8, 4> K = L.partialPivLu().solve(rhs);
    Mat4 G = Mat4::Identity() +
             0.5 * h * (K.block<4, 4>(0, 0) + K.block<4, 4>(4, 0));

    y += 0.5 * h * (x1 + x2);
    F = (G * F).eval();
}

void Stepper::run(Phase4& y, Mat4& F, double& t, double T) const {
    run(y, F, t, T, [](double, const Phase4&, const Mat4&) {});
}

OrbitSegment integrate(const HamiltonianSystem& sys, const Phase4& y0, double T,
                       const IntegratorConfig& cfg) {
    if (!finite(y0)) throw EvaluationError("integrate: non-finite start");
    if (!sys.domain.contains(y0))
        throw EscapeError("integrate: y0 outside the domain box", 0.0);
    Stepper st(sys, cfg);
    OrbitSegment seg;
    Phase4 y = y0;
    Mat4 F = Mat4::Identity();
    double t = 0.0;
    seg.times.push_back(0.0);
    seg.states.push_back({y, F, 0.0});
    st.run(y, F, t, T, [&](double tc, const Phase4& yc, const Mat4& Fc) {
        seg.times.push_back(tc);
        seg.states.push_back({yc, Fc, tc});
    });
    return seg;
}

TangentState integrate_tangent(const HamiltonianSystem& sys, const Phase4& y0,
                               double T, const IntegratorConfig& cfg) {
    if (!finite(y0)) throw EvaluationError("integrate_tangent: non-finite start");
    Stepper st(sys, cfg);
    Phase4 y = y0;
    Mat4 F = Mat4::Identity();
    double t = 0.0;
    st.run(y, F, t, T);
    return {y, F, t};
}

}  // namespace hamflow
