#include "hamflow/catalog.hpp"

#include <cmath>
#include <sstream>

#include "hamflow/flowbox.hpp"
#include "hamflow/io.hpp"
#include "hamflow/perturb.hpp"

namespace hamflow {

namespace {

std::vector<double> parse_reals(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        out.push_back(v);
    }
    return out;
}

// "name(arg)" -> arg, or empty when id is not of that shape
bool match_call(const std::string& id, const std::string& name,
                std::string& args) {
    if (id.rfind(name + "(", 0) != 0 || id.back() != ')') return false;
    args = id.substr(name.size() + 1, id.size() - name.size() - 2);
    return true;
}

}  // namespace

HamiltonianSystem finite_difference_system(std::string id,
                                           std::function<double(const Phase4&)> H,
                                           Box4 domain, double crit_threshold) {
    HamiltonianSystem sys;
    sys.id = std::move(id);
    sys.H = H;
    sys.domain = domain;
    sys.crit_threshold = crit_threshold;
    sys.grad = [H](const Phase4& y) {
        double h = 1e-5 * (1.0 + y.norm());
        Vec4 g;
        for (int i = 0; i < 4; ++i) {
            Phase4 yp = y, ym = y;
            yp(i) += h;
            ym(i) -= h;
            g(i) = (H(yp) - H(ym)) / (2.0 * h);
        }
        return g;
    };
    auto grad = sys.grad;
    sys.hess = [grad](const Phase4& y) {
        double h = 1e-5 * (1.0 + y.norm());
        Mat4 m;
        for (int i = 0; i < 4; ++i) {
            Phase4 yp = y, ym = y;
            yp(i) += h;
            ym(i) -= h;
            Vec4 gp = grad(yp), gm = grad(ym);
            m.col(i) = (gp - gm) / (2.0 * h);
        }
        return ((m + m.transpose()) / 2.0).eval();
    };
    return sys;
}

HamiltonianSystem make_translation() {
    HamiltonianSystem sys;
    sys.id = "translation";
    sys.H = [](const Phase4& y) { return y(2); };
    sys.grad = [](const Phase4&) { return Vec4::Unit(2).eval(); };
    sys.hess = [](const Phase4&) { return Mat4::Zero().eval(); };
    return sys;
}

HamiltonianSystem make_quadratic_with_drift(const std::string& id,
                                            const Mat4& S, const Vec4& c) {
    HamiltonianSystem sys;
    sys.id = id;
    sys.H = [S, c](const Phase4& y) { return c.dot(y) + 0.5 * y.dot(S * y); };
    sys.grad = [S, c](const Phase4& y) { return (c + S * y).eval(); };
    sys.hess = [S](const Phase4&) { return S; };
    return sys;
}

HamiltonianSystem make_hyperbolic_drift() {
    Mat4 S = Mat4::Zero();
    S(1, 1) = 1.0;
    S(3, 3) = -1.0;
    return make_quadratic_with_drift("hyperbolic-drift", S, Vec4::Unit(2));
}

HamiltonianSystem make_elliptic_drift() {
    Mat4 S = Mat4::Zero();
    S(1, 1) = 1.0;
    S(3, 3) = 1.0;
    return make_quadratic_with_drift("elliptic-drift", S, Vec4::Unit(2));
}

HamiltonianSystem make_quadratic(const Mat4& S) {
    Mat4 sym = 0.5 * (S + S.transpose());
    std::ostringstream id;
    id << "quadratic(";
    const int ii[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
    const int jj[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};
    for (int k = 0; k < 10; ++k)
        id << format_double(sym(ii[k], jj[k])) << (k + 1 < 10 ? "," : ")");
    return make_quadratic_with_drift(id.str(), sym, Vec4::Zero());
}

HamiltonianSystem make_bump_rotation(double alpha, double r, double nu) {
    BumpProfile p = build_bumps(r, nu, alpha);
    HamiltonianSystem sys = build_perturbed_hamiltonian(p);
    sys.id = "bump-rotation(" + format_double(alpha) + "," + format_double(r) +
             "," + format_double(nu) + ")";
    return sys;
}

HamiltonianSystem catalog_system(const std::string& id) {
    if (id == "translation") return make_translation();
    if (id == "hyperbolic-drift") return make_hyperbolic_drift();
    if (id == "elliptic-drift") return make_elliptic_drift();
    std::string args;
    if (match_call(id, "quadratic", args)) {
        auto v = parse_reals(args, ',');
        if (v.size() != 10)
            throw ConfigError("quadratic(...) needs 10 upper-triangle entries");
        Mat4 S;
        const int ii[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
        const int jj[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};
        for (int k = 0; k < 10; ++k) {
            S(ii[k], jj[k]) = v[k];
            S(jj[k], ii[k]) = v[k];
        }
        return make_quadratic(S);
    }
    if (match_call(id, "bump-rotation", args)) {
        auto v = parse_reals(args, ',');
        if (v.size() != 3)
            throw ConfigError("bump-rotation(alpha,r,nu) needs 3 parameters");
        return make_bump_rotation(v[0], v[1], v[2]);
    }
    if (match_call(id, "realized", args)) {
        // realized(base-id, x1:x2:x3:x4, alpha, r)
        std::vector<std::string> parts;
        std::stringstream ss(args);
        std::string tok;
        while (std::getline(ss, tok, ',')) parts.push_back(tok);
        if (parts.size() != 4)
            throw ConfigError("realized(base, x1:x2:x3:x4, alpha, r)");
        auto xs = parse_reals(parts[1], ':');
        if (xs.size() != 4) throw ConfigError("realized: x needs 4 components");
        HamiltonianSystem base = catalog_system(
            parts[0].substr(parts[0].find_first_not_of(' ')));
        Phase4 x(xs[0], xs[1], xs[2], xs[3]);
        double alpha = std::stod(parts[2]);
        double r = std::stod(parts[3]);
        // catalog route: fixed nu, no C2 gate, light sampling; the certified
        // route is realize_rotation with explicit options
        RealizeOptions opt;
        opt.nu_override = 0.5;
        opt.disk_samples = 40;
        opt.direct_checks = 1;
        opt.c2_grid = 200;
        RealizedHamiltonian rh = realize_rotation(base, x, alpha, r, 0.0, opt);
        rh.system.id = id;
        return rh.system;
    }
    throw ConfigError("unknown catalog id: " + id);
}

std::vector<std::string> catalog_ids() {
    return {"translation",
            "hyperbolic-drift",
            "elliptic-drift",
            "quadratic(s11,...,s44)",
            "bump-rotation(alpha,r,nu)",
            "realized(base, x1:x2:x3:x4, alpha, r)"};
}

}  // namespace hamflow
