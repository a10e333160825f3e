#include "hamflow/bump.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hamflow {

namespace {

// exp(-1/x) underflows below x ~ 1/708; cutting there avoids 0 * inf in the
// derivative formulas and changes nothing above 1e-300.
constexpr double kSigmaCut = 1.0 / 700.0;

double sigma(double x) {
    if (x <= kSigmaCut) return 0.0;
    return std::exp(-1.0 / x);
}
double sigma_d1(double x) {
    if (x <= kSigmaCut) return 0.0;
    return std::exp(-1.0 / x) / (x * x);
}
double sigma_d2(double x) {
    if (x <= kSigmaCut) return 0.0;
    double ix = 1.0 / x;
    return std::exp(-ix) * (ix * ix * ix * ix - 2.0 * ix * ix * ix);
}

double simpson(double (*f)(const BumpProfile&, double), const BumpProfile& p,
               double a, double b, double fa, double fm, double fb, double tol,
               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(p, lm), frm = f(p, rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, p, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, p, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double adaptive_simpson(double (*f)(const BumpProfile&, double),
                        const BumpProfile& p, double a, double b, double tol) {
    if (a == b) return 0.0;
    double fa = f(p, a), fb = f(p, b), fm = f(p, 0.5 * (a + b));
    return simpson(f, p, a, b, fa, fm, fb, tol, 40);
}

double ell_fn(const BumpProfile& p, double x) { return p.ell(x); }

}  // namespace

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = sigma(x), b = sigma(1.0 - x);
    return a / (a + b);
}

double smoothstep_d1(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double a = sigma(x), b = sigma(1.0 - x);
    double ap = sigma_d1(x), bp = -sigma_d1(1.0 - x);
    double den = a + b;
    if (den == 0.0) return 0.0;
    return (ap * b - a * bp) / (den * den);
}

double smoothstep_d2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double a = sigma(x), b = sigma(1.0 - x);
    double ap = sigma_d1(x), bp = -sigma_d1(1.0 - x);
    double app = sigma_d2(x), bpp = sigma_d2(1.0 - x);
    double den = a + b;
    if (den == 0.0) return 0.0;
    double num = (app * b - a * bpp) * den - 2.0 * (ap * b - a * bp) * (ap + bp);
    return num / (den * den * den);
}

double BumpProfile::ell(double y1) const {
    if (y1 <= 0.0 || y1 >= rho_bar) return 0.0;
    if (y1 < xi) return ell0 * smoothstep(y1 / xi);
    if (y1 <= xi_prime) return ell0;
    return ell0 * smoothstep((rho_bar - y1) / (rho_bar - xi_prime));
}

double BumpProfile::ell_d1(double y1) const {
    if (y1 <= 0.0 || y1 >= rho_bar) return 0.0;
    if (y1 < xi) return ell0 * smoothstep_d1(y1 / xi) / xi;
    if (y1 <= xi_prime) return 0.0;
    double w = rho_bar - xi_prime;
    return -ell0 * smoothstep_d1((rho_bar - y1) / w) / w;
}

double BumpProfile::ell_d2(double y1) const {
    if (y1 <= 0.0 || y1 >= rho_bar) return 0.0;
    if (y1 < xi) return ell0 * smoothstep_d2(y1 / xi) / (xi * xi);
    if (y1 <= xi_prime) return 0.0;
    double w = rho_bar - xi_prime;
    return ell0 * smoothstep_d2((rho_bar - y1) / w) / (w * w);
}

double BumpProfile::ell_tilde(double s) const {
    double as = std::abs(s);
    if (as <= r * nu) return 1.0;
    if (as >= r) return 0.0;
    return smoothstep((r - as) / (r * (1.0 - nu)));
}

double BumpProfile::ell_tilde_d1(double s) const {
    double as = std::abs(s);
    if (as <= r * nu || as >= r) return 0.0;
    double w = r * (1.0 - nu);
    double v = -smoothstep_d1((r - as) / w) / w;
    return s >= 0.0 ? v : -v;
}

double BumpProfile::ell_tilde_d2(double s) const {
    double as = std::abs(s);
    if (as <= r * nu || as >= r) return 0.0;
    double w = r * (1.0 - nu);
    return smoothstep_d2((r - as) / w) / (w * w);
}

double BumpProfile::phi(double rho) const {
    if (rho <= r * nu) return 0.5 * rho * rho;
    if (rho >= r) return 0.0;
    return 0.5 * rho * rho * smoothstep((r - rho) / (r * (1.0 - nu)));
}

double BumpProfile::phi_d1(double rho) const {
    if (rho <= r * nu) return rho;
    if (rho >= r) return 0.0;
    double w = r * (1.0 - nu);
    double u = (r - rho) / w;
    return rho * smoothstep(u) - 0.5 * rho * rho * smoothstep_d1(u) / w;
}

double BumpProfile::phi_d2(double rho) const {
    if (rho <= r * nu) return 1.0;
    if (rho >= r) return 0.0;
    double w = r * (1.0 - nu);
    double u = (r - rho) / w;
    return smoothstep(u) - 2.0 * rho * smoothstep_d1(u) / w +
           0.5 * rho * rho * smoothstep_d2(u) / (w * w);
}

BumpProfile build_bumps(double r, double nu, double alpha, double xi,
                        double xi_prime, double rho_bar) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("need 0 < r < 1");
    if (!(nu > 0.0 && nu < 1.0)) throw ParameterError("need 0 < nu < 1");
    if (!(0.0 < xi && xi < xi_prime && xi_prime < rho_bar && rho_bar < 1.0))
        throw ParameterError("need 0 < xi < xi' < rho_bar < 1");
    if (alpha < 0.0) throw ParameterError("need alpha >= 0");

    BumpProfile p;
    p.xi = xi;
    p.xi_prime = xi_prime;
    p.rho_bar = rho_bar;
    p.r = r;
    p.nu = nu;
    p.alpha = alpha;

    // normalize the plateau by quadrature over the three smooth pieces
    p.ell0 = 1.0;
    double q = adaptive_simpson(ell_fn, p, 0.0, xi, 1e-13) +
               (xi_prime - xi) +
               adaptive_simpson(ell_fn, p, xi_prime, rho_bar, 1e-13);
    if (!(q > 0.0)) throw ParameterError("ell normalization quadrature failed");
    p.ell0 = 1.0 / q;
    p.quadrature_residual = std::abs(ell_integral(p, 0.0, 1.0) - 1.0);
    if (p.quadrature_residual > 1e-10)
        throw ParameterError("ell integral residual " +
                             std::to_string(p.quadrature_residual));

    const int n = 10000;
    auto grid_sup = [n](auto&& f, double a, double b) {
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            double x = a + (b - a) * i / n;
            s = std::max(s, std::abs(f(x)));
        }
        return s;
    };
    p.ell_sup = grid_sup([&](double x) { return p.ell(x); }, 0.0, rho_bar);
    p.ell_d1_sup = grid_sup([&](double x) { return p.ell_d1(x); }, 0.0, rho_bar);
    p.ell_d2_sup = grid_sup([&](double x) { return p.ell_d2(x); }, 0.0, rho_bar);
    p.ell_tilde_d1_sup =
        grid_sup([&](double x) { return p.ell_tilde_d1(x); }, -r, r);
    p.ell_tilde_d2_sup =
        grid_sup([&](double x) { return p.ell_tilde_d2(x); }, -r, r);
    p.phi_sup = grid_sup([&](double x) { return p.phi(x); }, 0.0, r);
    p.phi_d1_sup = grid_sup([&](double x) { return p.phi_d1(x); }, 0.0, r);
    p.phi_d2_sup = grid_sup([&](double x) { return p.phi_d2(x); }, 0.0, r);

    double h = (1.0 - nu) * r;
    double cu1 = p.ell_tilde_d1_sup / (2.0 / h);
    double cu2 = p.ell_tilde_d2_sup / (4.0 / (h * h));
    double cu3 = p.phi_sup / (r * nu * r * nu);
    double cu4 = p.phi_d1_sup / (2.0 * r * nu * nu / (1.0 - nu));
    double cu5 = p.phi_d2_sup / ((2.0 * nu / (1.0 - nu)) * (2.0 * nu / (1.0 - nu)));
    p.c_u = std::max({cu1, cu2, cu3, cu4, cu5});
    return p;
}

double ell_integral(const BumpProfile& p, double y1, double t, double tol) {
    double a = y1, b = y1 + t;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    // split at the breakpoints so every piece is smooth
    std::vector<double> cuts{a, b};
    for (double c : {0.0, p.xi, p.xi_prime, p.rho_bar})
        if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (hi <= 0.0 || lo >= p.rho_bar) continue;  // ell vanishes there
        if (lo >= p.xi && hi <= p.xi_prime) {
            total += p.ell0 * (hi - lo);  // plateau, exact
        } else {
            total += adaptive_simpson(ell_fn, p, lo, hi, tol);
        }
    }
    return sign * total;
}

}  // namespace hamflow
