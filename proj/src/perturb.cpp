#include "hamflow/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hamflow {

namespace {

// Bump part B(y) = ell(y1) ell~(y3) phi(rho) and its derivatives with the
// full product rule; the rho <= r*nu branch is the exact polynomial rho^2/2,
// so phi'/rho and phi'' never divide by a vanishing rho.
struct BumpTerm {
    const BumpProfile& p;

    double value(const Phase4& y) const {
        double rho = std::hypot(y(1), y(3));
        return p.ell(y(0)) * p.ell_tilde(y(2)) * p.phi(rho);
    }

    Vec4 gradient(const Phase4& y) const {
        double rho = std::hypot(y(1), y(3));
        double l = p.ell(y(0)), l1 = p.ell_d1(y(0));
        double m = p.ell_tilde(y(2)), m1 = p.ell_tilde_d1(y(2));
        double f = p.phi(rho);
        double f1_over = (rho <= p.r * p.nu) ? 1.0 : p.phi_d1(rho) / rho;
        Vec4 g;
        g(0) = l1 * m * f;
        g(1) = l * m * f1_over * y(1);
        g(2) = l * m1 * f;
        g(3) = l * m * f1_over * y(3);
        return g;
    }

    Mat4 hessian(const Phase4& y) const {
        double rho = std::hypot(y(1), y(3));
        double l = p.ell(y(0)), l1 = p.ell_d1(y(0)), l2 = p.ell_d2(y(0));
        double m = p.ell_tilde(y(2)), m1 = p.ell_tilde_d1(y(2)),
               m2 = p.ell_tilde_d2(y(2));
        double f = p.phi(rho);
        bool inner = (rho <= p.r * p.nu);
        double f1_over = inner ? 1.0 : p.phi_d1(rho) / rho;
        double f2 = inner ? 1.0 : p.phi_d2(rho);
        // (phi'' - phi'/rho)/rho^2, zero on the polynomial branch
        double radial = inner ? 0.0 : (f2 - f1_over) / (rho * rho);
        double y2 = y(1), y4 = y(3);
        Mat4 h;
        h(0, 0) = l2 * m * f;
        h(0, 1) = h(1, 0) = l1 * m * f1_over * y2;
        h(0, 2) = h(2, 0) = l1 * m1 * f;
        h(0, 3) = h(3, 0) = l1 * m * f1_over * y4;
        h(1, 1) = l * m * (radial * y2 * y2 + f1_over);
        h(1, 2) = h(2, 1) = l * m1 * f1_over * y2;
        h(1, 3) = h(3, 1) = l * m * radial * y2 * y4;
        h(2, 2) = l * m2 * f;
        h(2, 3) = h(3, 2) = l * m1 * f1_over * y4;
        h(3, 3) = l * m * (radial * y4 * y4 + f1_over);
        return h;
    }
};

// Stratified evaluation grid. The profiles are exactly constant outside the
// ramp/shell strata, so the sup of any derivative lives either on a shell
// (dense pass, small spacing recorded for the Lipschitz margin) or in regions
// where the entry is polynomial of degree <= 2 in the shelled coordinate.
// Angular extremes of every gradient/Hessian entry sit on {0, pi/4, pi/2}
// exactly (each entry depends on the angle through one of 1, cos, cos^2,
// sin cos), so three angles suffice without an angular margin.
struct TubeGrid {
    std::vector<double> y1s, y3s, rhos, angs;
    double h1 = 0, h3_shell = 0, hrho_shell = 0;
};

TubeGrid make_tube_grid(const BumpProfile& p, int n1, int n3, int nrho,
                        int nang) {
    TubeGrid g;
    for (int i = 0; i <= n1; ++i)
        g.y1s.push_back(-0.05 + (p.rho_bar + 0.1) * i / n1);
    g.h1 = (p.rho_bar + 0.15) / n1;

    for (int i = 0; i <= n3; ++i)
        g.y3s.push_back(-1.1 * p.r + 2.2 * p.r * i / n3);
    double s_lo = p.r * p.nu * 0.96, s_hi = p.r * 1.02;
    int n3s = 3 * n3;
    for (int i = 0; i <= n3s; ++i) {
        double v = s_lo + (s_hi - s_lo) * i / n3s;
        g.y3s.push_back(v);
        g.y3s.push_back(-v);
    }
    g.h3_shell = (s_hi - s_lo) / n3s;

    for (int i = 0; i <= nrho; ++i)
        g.rhos.push_back(1.05 * p.r * i / nrho);
    int nrs = 4 * nrho;
    for (int i = 0; i <= nrs; ++i)
        g.rhos.push_back(s_lo + (s_hi - s_lo) * i / nrs);
    g.hrho_shell = (s_hi - s_lo) / nrs;

    if (nang <= 3) {
        g.angs = {0.0, 0.25 * M_PI, 0.5 * M_PI};
    } else {
        for (int i = 0; i < nang; ++i)
            g.angs.push_back(0.5 * M_PI * i / (nang - 1));
    }
    return g;
}

Mat2 rotation2(double a) {
    Mat2 R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return R;
}

}  // namespace

Tube::Tube(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    if (!(a < b) || !(c > 0.0)) throw ParameterError("Tube: need a < b, c > 0");
}

bool Tube::contains(const Phase4& y) const {
    return y(0) > a && y(0) < b && std::hypot(y(1), y(3)) < c &&
           std::abs(y(2)) < c;
}

HamiltonianSystem build_perturbed_hamiltonian(const BumpProfile& profile) {
    HamiltonianSystem sys;
    sys.id = "bump-rotation";
    double alpha = profile.alpha;
    BumpProfile p = profile;
    sys.H = [p, alpha](const Phase4& y) {
        return y(2) - alpha * BumpTerm{p}.value(y);
    };
    sys.grad = [p, alpha](const Phase4& y) {
        return (Vec4::Unit(2) - alpha * BumpTerm{p}.gradient(y)).eval();
    };
    sys.hess = [p, alpha](const Phase4& y) {
        return (-alpha * BumpTerm{p}.hessian(y)).eval();
    };
    return sys;
}

Phase4 closed_form_flow(const BumpProfile& p, const Phase4& y0, double t) {
    double rho = std::hypot(y0(1), y0(3));
    double rnu = p.r * p.nu;
    if (rho >= rnu)
        throw ValidityError("closed_form_flow: rho >= r*nu at the start");
    if (std::abs(y0(2)) >= rnu)
        throw ValidityError("closed_form_flow: |y3| >= r*nu at the start");

    double l0v = p.ell(y0(0));
    double fr = p.phi(rho);
    // y3 stays within the ell~ = 1 slab along the whole span
    const int ns = 256;
    for (int i = 0; i <= ns; ++i) {
        double s = t * i / ns;
        double y3s = y0(2) + p.alpha * fr * (p.ell(y0(0) + s) - l0v);
        if (std::abs(y3s) >= rnu)
            throw ValidityError("closed_form_flow: orbit leaves |y3| < r*nu");
    }

    double theta = std::atan2(y0(3), y0(1));
    double I = ell_integral(p, y0(0), t);
    Phase4 y;
    y(0) = y0(0) + t;
    y(1) = rho * std::cos(theta + p.alpha * I);
    y(2) = y0(2) + p.alpha * fr * (p.ell(y0(0) + t) - l0v);
    y(3) = rho * std::sin(theta + p.alpha * I);
    return y;
}

double perturbation_alpha0(const BumpProfile& p, double epsilon) {
    double cu = std::max(p.c_u, 1.0);
    double a1 = epsilon * (1.0 - p.nu) * (1.0 - p.nu) / cu;
    double a2 = 2.0 / (p.ell_sup * p.r * p.nu);
    return std::min(a1, a2);
}

PerturbationCertificate certify(const BumpProfile& p, double epsilon,
                                const CertifyOptions& opt) {
    PerturbationCertificate cert;
    cert.c_u_family = p.c_u;
    BumpTerm bump{p};
    const double alpha = p.alpha;

    // --- C0/C1/C2 grid suprema over the stratified tube grid ---
    TubeGrid grid = make_tube_grid(p, opt.grid_n1, opt.grid_n3, opt.grid_nrho,
                                   opt.grid_nang);
    double c0 = 0, c1 = 0, c2 = 0;
    int npts = 0;
    for (double y1 : grid.y1s)
        for (double y3 : grid.y3s)
            for (double rho : grid.rhos)
                for (double ang : grid.angs) {
                    Phase4 y(y1, rho * std::cos(ang), y3, rho * std::sin(ang));
                    ++npts;
                    c0 = std::max(c0, alpha * std::abs(bump.value(y)));
                    Vec4 g = alpha * bump.gradient(y);
                    c1 = std::max(c1, g.cwiseAbs().maxCoeff());
                    Mat4 h = alpha * bump.hessian(y);
                    c2 = std::max(c2, h.cwiseAbs().maxCoeff());
                }
    cert.grid_points = npts;
    cert.c0 = c0;
    cert.c1 = c1;

    // Lipschitz safety margin per axis: spacing/2 times the grid bound on the
    // next (third) derivative along that axis. Off the shells the profiles
    // are constant or degree-2 polynomials in the shelled coordinate, so the
    // shell spacings are the ones that matter for y3 and rho; y1 uses its
    // global spacing.
    double c3_axis[3] = {0.0, 0.0, 0.0};  // d/dy1, d/dy3, radial
    {
        auto f = [&](const Phase4& y) { return alpha * bump.value(y); };
        double fd = std::min(p.r * (1.0 - p.nu), p.xi) / 40.0;
        for (std::size_t a = 0; a < grid.y1s.size(); a += 3)
            for (std::size_t b = 0; b < grid.y3s.size(); b += 3)
                for (std::size_t c = 0; c < grid.rhos.size(); c += 3) {
                    Phase4 y(grid.y1s[a], grid.rhos[c], grid.y3s[b], 0.0);
                    const int axes[3] = {0, 2, 1};  // y1, y3, radial (= y2 here)
                    for (int k = 0; k < 3; ++k) {
                        Phase4 e = Phase4::Zero();
                        e(axes[k]) = fd;
                        double d3 = (f(y + 2 * e) - 2 * f(y + e) +
                                     2 * f(y - e) - f(y - 2 * e)) /
                                    (2 * fd * fd * fd);
                        c3_axis[k] = std::max(c3_axis[k], std::abs(d3));
                    }
                }
    }
    cert.c2_margin = 0.5 * (grid.h1 * c3_axis[0] + grid.h3_shell * c3_axis[1] +
                            grid.hrho_shell * c3_axis[2]);
    cert.c2 = c2 + cert.c2_margin;

    // --- support: H = H0 exactly outside V_{0, rho_bar, r} ---
    Tube support(0.0, p.rho_bar, p.r);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double ssum = 0.0;
    int scount = 0;
    while (scount < opt.support_samples) {
        Phase4 y(-0.5 + 2.0 * unif(rng), 4.0 * p.r * (unif(rng) - 0.5),
                 4.0 * p.r * (unif(rng) - 0.5), 4.0 * p.r * (unif(rng) - 0.5));
        if (support.contains(y)) continue;
        ++scount;
        ssum = std::max(ssum, alpha * std::abs(bump.value(y)));
    }
    cert.support_sup = ssum;
    cert.support_ok = (ssum <= 1e-15);

    // --- flatness of DX_H on the slices y1 in {0, rho_bar} ---
    double bsum = 0.0;
    for (int k = 0; k < opt.boundary_samples; ++k) {
        for (double y1 : {0.0, p.rho_bar}) {
            Phase4 y(y1, 2.0 * p.r * (unif(rng) - 0.5),
                     2.0 * p.r * (unif(rng) - 0.5),
                     2.0 * p.r * (unif(rng) - 0.5));
            bsum = std::max(bsum,
                            (alpha * bump.hessian(y)).cwiseAbs().maxCoeff());
        }
    }
    cert.boundary_dx_sup = bsum;
    cert.boundary_dx_ok = (bsum <= 1e-12);

    // --- time-1 rotation property on the inner disk ---
    HamiltonianSystem sys = build_perturbed_hamiltonian(p);
    Mat2 Ralpha = rotation2(alpha);
    double rot_err = 0.0;
    for (int k = 0; k < opt.rotation_samples; ++k) {
        double rho = p.r * p.nu * 0.95 * std::sqrt(unif(rng));
        double ang = 2.0 * M_PI * unif(rng);
        Phase4 y0(0.0, rho * std::cos(ang), 0.0, rho * std::sin(ang));
        TangentState ts = integrate_tangent(sys, y0, 1.0, opt.flow_cfg);
        Mat2 R2;
        R2 << ts.F(1, 1), ts.F(1, 3), ts.F(3, 1), ts.F(3, 3);
        rot_err = std::max(rot_err, (R2 - Ralpha).norm());
    }
    cert.rotation_error = rot_err;

    // --- integrator vs closed-form flow on the validity region ---
    double st_err = 0.0, df_err = 0.0;
    for (int k = 0; k < opt.flow_checks; ++k) {
        double rho = p.r * p.nu * 0.9 * std::sqrt(unif(rng));
        double ang = 2.0 * M_PI * unif(rng);
        double y1 = unif(rng);
        double y3 = 0.4 * p.r * p.nu * (unif(rng) - 0.5);
        Phase4 y0(y1, rho * std::cos(ang), y3, rho * std::sin(ang));
        double t = unif(rng);
        Phase4 yc;
        try {
            yc = closed_form_flow(p, y0, t);
        } catch (const ValidityError&) {
            continue;
        }
        TangentState ts = integrate_tangent(sys, y0, t, opt.flow_cfg);
        st_err = std::max(st_err, (ts.y - yc).norm());
        const double h = 1e-6;
        Mat4 Fc;
        for (int i = 0; i < 4; ++i) {
            Phase4 yp = y0, ym = y0;
            yp(i) += h;
            ym(i) -= h;
            Fc.col(i) =
                (closed_form_flow(p, yp, t) - closed_form_flow(p, ym, t)) /
                (2.0 * h);
        }
        df_err = std::max(df_err, (ts.F - Fc).norm());
    }
    cert.flow_state_error = st_err;
    cert.flow_diff_error = df_err;

    // --- scaling bounds and the C2 smallness assertion ---
    if (alpha > 0.0) {
        cert.cu_c1 = cert.c1 * (1.0 - p.nu) / (alpha * p.r * p.nu);
        cert.cu_c2 = cert.c2 * (1.0 - p.nu) * (1.0 - p.nu) / alpha;
    }
    if (epsilon > 0.0) cert.alpha0_used = perturbation_alpha0(p, epsilon);

    if (p.c_u > opt.cu_max)
        throw CertificateError("profile norm constant c_u = " +
                                   std::to_string(p.c_u) + " > " +
                                   std::to_string(opt.cu_max),
                               "profile c_u");
    if (cert.cu_c1 > opt.cu_max)
        throw CertificateError(
            "C1 bound: c1 = " + std::to_string(cert.c1) +
                " exceeds c_u * alpha r nu/(1-nu) with c_u = " +
                std::to_string(opt.cu_max),
            "C1 bound");
    if (cert.cu_c2 > opt.cu_max)
        throw CertificateError(
            "C2 scaling bound: c2 = " + std::to_string(cert.c2) +
                " exceeds c_u * alpha/(1-nu)^2 with c_u = " +
                std::to_string(opt.cu_max),
            "C2 scaling bound");
    if (epsilon > 0.0) {
        double cnorm = std::max({cert.c0, cert.c1, cert.c2});
        if (!(cnorm < epsilon))
            throw CertificateError("C2 bound: ||H - H0||_C2 = " +
                                       std::to_string(cnorm) + " >= epsilon = " +
                                       std::to_string(epsilon),
                                   "C2 bound");
    }
    return cert;
}

std::vector<GridPointWorst> perturbation_grid_rows(const BumpProfile& p,
                                                   int n1, int n3, int nrho,
                                                   int nang) {
    BumpTerm bump{p};
    TubeGrid grid = make_tube_grid(p, n1, n3, nrho, nang);
    std::vector<GridPointWorst> rows;
    for (double y1 : grid.y1s)
        for (double y3 : grid.y3s)
            for (double rho : grid.rhos)
                for (double ang : grid.angs) {
                    Phase4 y(y1, rho * std::cos(ang), y3, rho * std::sin(ang));
                    GridPointWorst g;
                    g.y = y;
                    g.d0 = p.alpha * std::abs(bump.value(y));
                    g.d1 = (p.alpha * bump.gradient(y)).cwiseAbs().maxCoeff();
                    g.d2 = (p.alpha * bump.hessian(y)).cwiseAbs().maxCoeff();
                    rows.push_back(g);
                }
    return rows;
}

std::vector<std::pair<double, double>> c3_blowup_probe(
    const std::vector<double>& r_list, double nu, double alpha) {
    std::vector<std::pair<double, double>> out;
    for (double r : r_list) {
        BumpProfile p = build_bumps(r, nu, alpha);
        BumpTerm bump{p};
        auto f = [&](const Phase4& y) { return alpha * bump.value(y); };
        TubeGrid grid = make_tube_grid(p, 20, 16, 20, 6);
        double fd = std::min(r * (1.0 - nu), p.xi) / 50.0;
        double c3 = 0.0;
        for (double y1 : grid.y1s)
            for (double y3 : grid.y3s)
                for (double rho : grid.rhos)
                    for (double ang : grid.angs) {
                        Phase4 y(y1, rho * std::cos(ang), y3,
                                 rho * std::sin(ang));
                        for (int i = 0; i < 4; ++i) {
                            Phase4 e = Phase4::Zero();
                            e(i) = fd;
                            double d3 = (f(y + 2 * e) - 2 * f(y + e) +
                                         2 * f(y - e) - f(y - 2 * e)) /
                                        (2 * fd * fd * fd);
                            c3 = std::max(c3, std::abs(d3));
                        }
                    }
        out.emplace_back(r, c3);
    }
    return out;
}

}  // namespace hamflow
