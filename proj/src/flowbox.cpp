#include "hamflow/flowbox.hpp"

#include <cmath>
#include <random>

#include "hamflow/lyapunov.hpp"
#include "hamflow/poincare.hpp"

namespace hamflow {

namespace {

Mat2 rotation2(double a) {
    Mat2 R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return R;
}

// 20-point Gauss-Legendre nodes/weights on [0,1]
struct Gauss20 {
    double x[20], w[20];
    Gauss20() {
        static const double xs[10] = {
            0.0034357004074525, 0.0180140363610431, 0.0438827858743371,
            0.0804415140888906, 0.1268340467699246, 0.1819731596367425,
            0.2445664990245864, 0.3131469556422902, 0.3861070744291775,
            0.4617367394332513};
        static const double ws[10] = {
            0.0088070035695761, 0.0203007149001935, 0.0313360241670545,
            0.0416383707883524, 0.0509650599086202, 0.0590972659807592,
            0.0658443192245883, 0.0710480546591910, 0.0745864932363019,
            0.0763766935653629};
        for (int i = 0; i < 10; ++i) {
            x[i] = xs[i];
            w[i] = ws[i];
            x[19 - i] = 1.0 - xs[i];
            w[19 - i] = ws[i];
        }
    }
};
const Gauss20& gauss20() {
    static const Gauss20 g;
    return g;
}

}  // namespace

double FlowboxChart::G(const Phase4& y) const {
    return -xc_.dot(y - center_) / xc_.squaredNorm();
}

Phase4 FlowboxChart::flow(const Phase4& y, double t) const {
    if (t == 0.0) return y;
    Phase4 z = y;
    Mat4 F = Mat4::Identity();
    double tt = 0.0;
    Stepper st(sys_, cfg_);
    st.run(z, F, tt, t);
    return z;
}

double FlowboxChart::tau(const Phase4& m) const {
    // G(phi^t m) is strictly decreasing while omega(X_H, X_G) > 0, so an
    // undamped Newton walk converges; the walk reuses the integrated point.
    double t = 0.0;
    Phase4 y = m;
    double g = G(y);
    const double max_step = 0.25 * std::max(1.0, tau_span_);
    for (int it = 0; it < 60; ++it) {
        if (std::abs(g) <= 1e-12) return t;
        double w = xc_.dot(sys_.field(y)) / xc_.squaredNorm();
        if (!(w > 0.05))
            throw ChartError("hitting-time solve lost transversality");
        double dt = g / w;  // G decreases along the flow at rate w
        if (dt > max_step) dt = max_step;
        if (dt < -max_step) dt = -max_step;
        if (std::abs(t + dt) > tau_span_ + 0.5)
            throw ChartError("hitting time outside the chart span");
        y = flow(y, dt);
        t += dt;
        g = G(y);
    }
    throw ChartError("hitting-time Newton did not settle below 1e-12");
}

Phase4 FlowboxChart::energy_line_to(const Phase4& y, double target_e) const {
    // straight line along X_G: stays inside Sigma, moves energy monotonically
    Phase4 z = y;
    double sgm = 0.0;
    for (int it = 0; it < 60; ++it) {
        double h = sys_.H(z) - target_e;
        if (std::abs(h) <= 1e-13 * (1.0 + std::abs(target_e))) return z;
        double w = sys_.gradient(z).dot(vg_);  // dH(X_G) = omega(X_H, X_G)
        if (!(std::abs(w) > 0.05))
            throw ChartError("energy line solve lost transversality");
        sgm = -h / w;
        z += sgm * vg_;
    }
    throw ChartError("energy line Newton did not settle");
}

Phase4 FlowboxChart::sigma_point(double a, double b) const {
    // graph chart of Sigma_e over span(u1,u2): offset along the gradient
    Phase4 z = center_ + a * frame_.u1 + b * frame_.u2;
    for (int it = 0; it < 60; ++it) {
        double h = sys_.H(z) - e_;
        if (std::abs(h) <= 1e-13 * (1.0 + std::abs(e_))) return z;
        double w = sys_.gradient(z).dot(frame_.gdir);
        if (!(std::abs(w) > 1e-8))
            throw ChartError("surface graph solve degenerate");
        z -= (h / w) * frame_.gdir;
    }
    throw ChartError("surface graph Newton did not settle");
}

double FlowboxChart::area_density(double a, double b) const {
    Phase4 s = sigma_point(a, b);
    Vec4 gh = sys_.gradient(s);
    double den = gh.dot(frame_.gdir);
    double da = -gh.dot(frame_.u1) / den;
    double db = -gh.dot(frame_.u2) / den;
    Vec4 va = frame_.u1 + da * frame_.gdir;
    Vec4 vb = frame_.u2 + db * frame_.gdir;
    return omega0(va, vb);
}

double FlowboxChart::area_coordinate(double a, double b) const {
    // P(a,b) = int_0^a W(s,b) ds makes the surface chart area-true:
    // d(p) ^ d(b) = W da ^ db = omega_e
    const Gauss20& g = gauss20();
    double sum = 0.0;
    for (int i = 0; i < 20; ++i)
        sum += g.w[i] * area_density(a * g.x[i], b);
    return a * sum;
}

double FlowboxChart::invert_area_coordinate(double p, double b) const {
    double a = p / area_density(0.0, b);
    for (int it = 0; it < 60; ++it) {
        double f = area_coordinate(a, b) - p;
        if (std::abs(f) <= 1e-13 * (1.0 + std::abs(p))) return a;
        a -= f / area_density(a, b);
    }
    throw ChartError("area coordinate inversion did not settle");
}

Phase4 FlowboxChart::map(const Phase4& m) const {
    double t = tau(m);
    Phase4 on_sigma = flow(m, t);
    Phase4 on_surface = energy_line_to(on_sigma, e_);
    double a = frame_.u1.dot(on_surface - center_);
    double b = frame_.u2.dot(on_surface - center_);
    Phase4 z;
    z(0) = -t;
    z(1) = area_coordinate(a, b);
    z(2) = sys_.H(m) - e_;
    z(3) = b;
    return z;
}

Phase4 FlowboxChart::inverse(const Phase4& z) const {
    double b = z(3);
    double a = invert_area_coordinate(z(1), b);
    Phase4 on_surface = sigma_point(a, b);
    Phase4 on_sigma = energy_line_to(on_surface, e_ + z(2));
    return flow(on_sigma, z(0));
}

Mat4 FlowboxChart::differential(const Phase4& m, double fd_step) const {
    Mat4 D;
    for (int i = 0; i < 4; ++i) {
        Phase4 p = m, q = m;
        p(i) += fd_step;
        q(i) -= fd_step;
        D.col(i) = (map(p) - map(q)) / (2.0 * fd_step);
    }
    return D;
}

Mat4 FlowboxChart::inverse_differential(const Phase4& z, double fd_step) const {
    Mat4 D;
    for (int i = 0; i < 4; ++i) {
        Phase4 p = z, q = z;
        p(i) += fd_step;
        q(i) -= fd_step;
        D.col(i) = (inverse(p) - inverse(q)) / (2.0 * fd_step);
    }
    return D;
}

ChartCertificate chart_differential_checks(const FlowboxChart& chart, int n,
                                           std::uint64_t seed) {
    ChartCertificate cert;
    cert.n_samples = n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Mat4& J = symplectic_J();
    for (int k = 0; k < n; ++k) {
        Vec4 d;
        for (int i = 0; i < 4; ++i) d(i) = gauss(rng);
        d.normalize();
        double rr = chart.radius_ * std::pow(unif(rng), 0.25);
        Phase4 m = chart.center_ + rr * d;
        Phase4 z = chart.map(m);
        Mat4 D = chart.differential(m);
        cert.sympl_residual = std::max(
            cert.sympl_residual, (D.transpose() * J * D - J).norm());
        cert.conj_residual = std::max(
            cert.conj_residual,
            std::abs(z(2) + chart.e_ - chart.sys_.H(m)));
        cert.field_residual = std::max(
            cert.field_residual,
            (D * chart.sys_.field(m) - Vec4::Unit(0)).norm());
    }
    return cert;
}

FlowboxChart build_chart(const HamiltonianSystem& sys, const Phase4& center,
                         double radius, const IntegratorConfig& cfg,
                         double tau_span, int cert_samples, std::uint64_t seed) {
    {
        double gn = sys.gradient(center).norm();
        if (gn < sys.crit_threshold)
            throw TransversalityError(
                "flowbox center is a near-critical point: omega(X_H, X_G) "
                "cannot be made nonzero");
    }
    FlowboxChart chart;
    chart.sys_ = sys;
    chart.cfg_ = cfg;
    chart.cfg_.method = Method::Gauss2;  // chart evaluations need 4th order
    chart.cfg_.box_abort = false;
    chart.cfg_.energy_tol = 0.0;
    chart.center_ = center;
    chart.e_ = sys.H(center);
    chart.tau_span_ = tau_span;
    chart.xc_ = sys.field(center);
    chart.vg_ = -(symplectic_J() * chart.xc_) / chart.xc_.squaredNorm();
    chart.frame_ = transversal_frame(sys, center);

    double r = radius;
    for (int attempt = 0; attempt <= 6; ++attempt, r *= 0.5) {
        chart.radius_ = r;
        try {
            chart.cert_ = chart_differential_checks(chart, cert_samples, seed);
            return chart;
        } catch (const ChartError&) {
            continue;  // shrink and retry
        }
    }
    throw ChartError("chart construction failed after 6 radius halvings");
}

// ---------------------------------------------------------------------------

C012 measure_c012_fd(const std::function<double(const Phase4&)>& f,
                     const std::vector<Phase4>& pts, double h) {
    C012 out;
    for (const Phase4& y : pts) {
        double v = f(y);
        out.c0 = std::max(out.c0, std::abs(v));
        for (int i = 0; i < 4; ++i) {
            Phase4 e = Phase4::Zero();
            e(i) = h;
            double fp = f(y + e), fm = f(y - e);
            out.c1 = std::max(out.c1, std::abs((fp - fm) / (2 * h)));
            out.c2 = std::max(out.c2, std::abs((fp - 2 * v + fm) / (h * h)));
        }
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                Phase4 ei = Phase4::Zero(), ej = Phase4::Zero();
                ei(i) = h;
                ej(j) = h;
                double mixed = (f(y + ei + ej) - f(y + ei - ej) -
                                f(y - ei + ej) + f(y - ei - ej)) /
                               (4 * h * h);
                out.c2 = std::max(out.c2, std::abs(mixed));
            }
    }
    return out;
}

std::vector<Phase4> model_tube_points(const BumpProfile& p, int n,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Phase4> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) {
        double y1 = -0.05 + (p.rho_bar + 0.1) * unif(rng);
        double rho = 1.05 * p.r * std::sqrt(unif(rng));
        double ang = 2.0 * M_PI * unif(rng);
        double y3 = 1.05 * p.r * (2.0 * unif(rng) - 1.0);
        pts.emplace_back(y1, rho * std::cos(ang), y3, rho * std::sin(ang));
    }
    return pts;
}

RealizedHamiltonian realize_rotation(const HamiltonianSystem& sys,
                                     const Phase4& x, double alpha, double r,
                                     double epsilon, const RealizeOptions& opt) {
    sys.require_regular(x);

    // non-periodicity over (0.1, 1]: orbit separation must exceed r
    {
        OrbitSegment seg = integrate(sys, x, 1.0, opt.cfg);
        double min_sep = std::numeric_limits<double>::infinity();
        std::vector<Phase4> coarse;
        for (std::size_t i = 0; i < seg.times.size(); ++i) {
            if (seg.times[i] > 0.1)
                min_sep = std::min(min_sep, (seg.states[i].y - x).norm());
            if (std::fmod(seg.times[i], 0.05) < opt.cfg.dt * 0.5)
                coarse.push_back(seg.states[i].y);
        }
        if (!(min_sep > r))
            throw FlowboxOverlapError(
                "realize_rotation: orbit returns within r of its start "
                "(periodic or nearly periodic point)");
        // sampled self-intersection check of the time-1 tube
        for (std::size_t i = 0; i < coarse.size(); ++i)
            for (std::size_t j = i; j < coarse.size(); ++j) {
                double dt_ij = 0.05 * double(j - i);
                if (dt_ij < 0.2) continue;
                if ((coarse[i] - coarse[j]).norm() <= 2.0 * r)
                    throw FlowboxOverlapError(
                        "realize_rotation: time-1 flowbox self-intersects");
            }
    }

    RealizedHamiltonian out;
    IntegratorConfig ccfg = opt.cfg;
    ccfg.dt = opt.chart_dt;
    out.chart = std::make_shared<FlowboxChart>(
        build_chart(sys, x, std::max(2.0 * r, 0.02), ccfg, 1.3, 400, opt.seed));

    // kappa -> inner fraction per the length-1 realization proof
    double kappa_hat = 0.7 * opt.kappa;
    double nu = (opt.nu_override > 0.0)
                    ? opt.nu_override
                    : 0.5 * (1.0 + std::cbrt(1.0 - kappa_hat));
    double radius_ratio = 0.5 * (std::pow(1.0 - kappa_hat, -1.0 / 3.0) + 1.0);

    out.profile = build_bumps(r, nu, alpha);
    HamiltonianSystem model = build_perturbed_hamiltonian(out.profile);

    std::shared_ptr<FlowboxChart> chart = out.chart;
    const BumpProfile prof = out.profile;

    // H~ = H - alpha * (ell ell~ phi) o g; the bump support pulls back into
    // the chart tube, everything else is untouched
    auto bump_of = [prof, chart, x](const Phase4& y) -> double {
        if ((y - x).norm() > 1.6) return 0.0;
        Phase4 z;
        try {
            z = chart->map(y);
        } catch (const ChartError&) {
            return 0.0;  // outside the chart tube: outside the support
        }
        if (z(0) <= 0.0 || z(0) >= prof.rho_bar) return 0.0;
        double rho = std::hypot(z(1), z(3));
        return prof.ell(z(0)) * prof.ell_tilde(z(2)) * prof.phi(rho);
    };
    auto base_H = sys.H;
    double a = alpha;
    HamiltonianSystem realized = finite_difference_system(
        "realized", [base_H, bump_of, a](const Phase4& y) {
            return base_H(y) - a * bump_of(y);
        },
        sys.domain, sys.crit_threshold);
    out.system = realized;

    // --- certificate ---
    RealizationCertificate& cert = out.certificate;
    cert.gamma = opt.gamma;
    cert.disk_radius = r * radius_ratio;
    cert.chart_sympl_residual = chart->residuals().sympl_residual;

    {
        CertifyOptions copt;
        copt.grid_n1 = 24;
        copt.grid_n3 = 12;
        copt.grid_nrho = 12;
        copt.support_samples = 2000;
        copt.boundary_samples = 200;
        copt.rotation_samples = 24;
        copt.flow_checks = 24;
        copt.cu_max = 1e9;  // record-only here; the gate is the realized side
        cert.model = certify(prof, 0.0, copt);
    }

    // C2 distance of the transported difference, same FD estimator on the
    // same model-tube points mapped through the chart
    {
        std::vector<Phase4> zpts = model_tube_points(prof, opt.c2_grid, opt.seed);
        std::vector<Phase4> ypts;
        ypts.reserve(zpts.size());
        for (const Phase4& z : zpts) ypts.push_back(chart->inverse(z));
        auto diff = [&](const Phase4& y) { return -a * bump_of(y); };
        C012 c = measure_c012_fd(diff, ypts, 1e-4);
        cert.c2_distance = std::max({c.c0, c.c1, c.c2});
    }
    if (epsilon > 0.0 && cert.c2_distance > 8.0 * epsilon)
        throw CertificateError(
            "realized C2 distance " + std::to_string(cert.c2_distance) +
                " exceeds c_u * epsilon",
            "realized C2 bound");

    // --- rotation property over the sampled disk (conjugation route) ---
    TransversalCocycle base_cocycle = transversal_cocycle(sys, x, 1.0, opt.cfg);
    Mat2 target = base_cocycle.Phi * rotation2(alpha);

    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int bad = 0;
    double inner_err = 0.0;
    std::vector<Phase4> inner_pts;
    const double r2 = r * radius_ratio;
    for (int k = 0; k < opt.disk_samples; ++k) {
        double rho = r2 * std::sqrt(unif(rng));
        double ang = 2.0 * M_PI * unif(rng);
        double w = r2 * (2.0 * unif(rng) - 1.0);
        bool inner = (rho < 0.95 * r * nu && std::abs(w) < 0.95 * r * nu);
        if ((int)inner_pts.size() < opt.direct_checks && !inner) {
            // steer the first few samples into the good set for the
            // direct-integration cross-check
            rho = 0.5 * r * nu * std::sqrt(unif(rng));
            w = 0.5 * r * nu * (2.0 * unif(rng) - 1.0);
            inner = true;
        }
        Phase4 z(0.0, rho * std::cos(ang), w, rho * std::sin(ang));
        Phase4 y = chart->inverse(z);

        // model flow through the tube from z, conjugated back
        Phase4 zc = z;
        Mat4 Fm = Mat4::Identity();
        double tt = 0.0;
        Stepper st(model, opt.cfg);
        st.run(zc, Fm, tt, 1.0);
        Mat4 Dy = chart->differential(y);
        Mat4 Dback = chart->inverse_differential(zc);
        Mat4 Ftilde = Dback * Fm * Dy;
        Phase4 y_end = chart->inverse(zc);

        TransversalFrame fsrc = transversal_frame(sys, y);
        TransversalFrame fdst = transversal_frame(sys, y_end);
        Mat2 Phi;
        for (int j = 0; j < 2; ++j) {
            Vec4 img = Ftilde * (j == 0 ? fsrc.u1 : fsrc.u2);
            Phi(0, j) = fdst.u1.dot(img);
            Phi(1, j) = fdst.u2.dot(img);
        }
        double err = (Phi - target).norm();
        if (err > opt.gamma) ++bad;
        if (inner) {
            inner_err = std::max(inner_err, err);
            if ((int)inner_pts.size() < opt.direct_checks)
                inner_pts.push_back(y);
        }
    }
    cert.n_disk = opt.disk_samples;
    cert.kappa_measured = double(bad) / double(opt.disk_samples);
    cert.rotation_error = inner_err;

    // --- direct-integration cross-check on a few inner points ---
    {
        IntegratorConfig dcfg;
        dcfg.dt = 5e-3;
        dcfg.method = Method::ImplicitMidpoint;
        dcfg.newton_tol = 1e-11;
        dcfg.energy_tol = 0.0;
        dcfg.box_abort = false;
        double derr = 0.0;
        for (const Phase4& y : inner_pts) {
            TangentState ts = integrate_tangent(out.system, y, 1.0, dcfg);
            TransversalFrame fsrc = transversal_frame(sys, y);
            TransversalFrame fdst = transversal_frame(sys, ts.y);
            Mat2 Phi;
            for (int j = 0; j < 2; ++j) {
                Vec4 img = ts.F * (j == 0 ? fsrc.u1 : fsrc.u2);
                Phi(0, j) = fdst.u1.dot(img);
                Phi(1, j) = fdst.u2.dot(img);
            }
            derr = std::max(derr, (Phi - target).norm());
        }
        cert.rotation_error_direct = derr;
    }
    return out;
}

double RealizationSchedule::kappa_total() const {
    double k = 0.0;
    for (const auto& s : segments) k += s.kappa;
    return k;
}

RealizationSchedule concatenate(const HamiltonianSystem& sys,
                                const RealizationSchedule& s1,
                                const RealizationSchedule& s2,
                                const IntegratorConfig& cfg, double base_tol) {
    if (!s2.segments.empty() || s2.length_T > 0.0) {
        TangentState ts = integrate_tangent(sys, s1.base, s1.length_T, cfg);
        if ((ts.y - s2.base).norm() > base_tol)
            throw ScheduleError(
                "concatenate: s2.base does not match the flowed s1.base");
    }
    double kappa = s1.kappa_total() + s2.kappa_total();
    if (kappa >= 1.0)
        throw ScheduleError("concatenate: kappa budget overflow (kappa = " +
                            std::to_string(kappa) + " >= 1)");
    RealizationSchedule s;
    s.base = s1.base;
    s.length_T = s1.length_T + s2.length_T;
    s.segments = s1.segments;
    for (RealizationSegment seg : s2.segments) {
        seg.start_time += s1.length_T;
        s.segments.push_back(seg);
    }
    s.kappa_budget = std::min(s1.kappa_budget + s2.kappa_budget, 1.0);
    s.epsilon = std::max(s1.epsilon, s2.epsilon);
    return s;
}

std::pair<double, double> transversal_measure_ratio(const HamiltonianSystem& sys,
                                                    const Phase4& x, double t,
                                                    const IntegratorConfig& cfg,
                                                    double fd_step) {
    TransversalFrame f0 = transversal_frame(sys, x);
    TangentState end = integrate_tangent(sys, x, t, cfg);
    TransversalFrame f1 = transversal_frame(sys, end.y);

    // section return map in (u1,u2,gdir) coordinates, differential by FD
    auto section_map = [&](const Vec3& q) -> Vec3 {
        Phase4 y = x + q(0) * f0.u1 + q(1) * f0.u2 + q(2) * f0.gdir;
        Phase4 z = y;
        Mat4 F = Mat4::Identity();
        double tt = 0.0;
        Stepper st(sys, cfg);
        st.run(z, F, tt, t);
        // land exactly on the section through f1.base (Newton on the offset)
        for (int it = 0; it < 40; ++it) {
            double s = f1.xdir.dot(z - f1.base);
            if (std::abs(s) <= 1e-13) break;
            double w = f1.xdir.dot(sys.field(z));
            double dt = -s / w;
            st.run(z, F, tt, dt);
        }
        return Vec3(f1.u1.dot(z - f1.base), f1.u2.dot(z - f1.base),
                    f1.gdir.dot(z - f1.base));
    };
    Mat3 Dp;
    for (int i = 0; i < 3; ++i) {
        Vec3 qp = Vec3::Zero(), qm = Vec3::Zero();
        qp(i) = fd_step;
        qm(i) = -fd_step;
        Dp.col(i) = (section_map(qp) - section_map(qm)) / (2.0 * fd_step);
    }
    double alpha_t = sys.field(end.y).norm() / sys.field(x).norm();
    return {std::abs(Dp.determinant()), alpha_t};
}

}  // namespace hamflow
