// hamflow command-line harness: batch runs of the library pipelines with
// reproducible config and CSV / plot-data emission.
//
// Exit codes: 0 success, 1 contract or certificate failure, 2 usage/config.

#include <CLI11.hpp>
#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hamflow/catalog.hpp"
#include "hamflow/config.hpp"
#include "hamflow/domination.hpp"
#include "hamflow/exchange.hpp"
#include "hamflow/flowbox.hpp"
#include "hamflow/io.hpp"
#include "hamflow/lyapunov.hpp"
#include "hamflow/perturb.hpp"
#include "hamflow/reference.hpp"
#include "hamflow/sampling.hpp"

using namespace hamflow;

namespace {

Phase4 parse_vec4(const std::string& s) {
    std::stringstream ss(s);
    std::string tok;
    Phase4 v = Phase4::Zero();
    int i = 0;
    while (std::getline(ss, tok, ',') && i < 4) v(i++) = std::stod(tok);
    if (i != 4) throw ConfigError("expected 4 comma-separated reals: " + s);
    return v;
}

// table emitter shared by csv and plot-data
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    void header(std::vector<std::string> cols) { columns = std::move(cols); }
    void row(const std::vector<std::string>& r) { rows.push_back(r); }
    void write(std::ostream& os, const std::string& format,
               bool timestamp) const {
        if (timestamp) {
            std::time_t t = std::time(nullptr);
            char buf[64];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
            os << "# generated " << buf << "Z\n";
        }
        const char* sep = (format == "csv") ? "," : " ";
        if (format == "csv") {
            for (std::size_t i = 0; i < columns.size(); ++i)
                os << (i ? "," : "") << columns[i];
            os << "\n";
        } else {
            os << "#";
            for (const auto& c : columns) os << " " << c;
            os << "\n";
        }
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                os << (i ? sep : "") << r[i];
            os << "\n";
        }
    }
};

void emit(const Table& t, const RunConfig& cfg) {
    if (cfg.output.empty()) {
        t.write(std::cout, cfg.format, cfg.timestamp);
    } else {
        std::ofstream os(cfg.output);
        if (!os) throw ConfigError("cannot open output file " + cfg.output);
        t.write(os, cfg.format, cfg.timestamp);
    }
}

std::string classify_point(const HamiltonianSystem& sys, const Phase4& y,
                           const RunConfig& rc, const IntegratorConfig& icfg,
                           double& lambda, int& m_found, double& worst) {
    lambda = 0.0;
    m_found = 0;
    worst = 0.0;
    try {
        ExponentEstimate est = upper_exponent(sys, y, rc.T, icfg);
        lambda = est.lambda_plus;
    } catch (const EscapeError&) {
        return "escaped";
    } catch (const TrivialSplittingError&) {
        return "Z-candidate";
    }
    if (lambda <= 1e-3) return "Z-candidate";
    for (int m = 1; m <= rc.m_max; ++m) {
        DominationReport rep;
        try {
            rep = domination_scan(sys, y, m, rc.T, icfg);
        } catch (const Error&) {
            continue;
        }
        if (m == 1 || rep.worst > worst) worst = rep.worst;
        if (rep.classification == DominationClass::Dominated &&
            !rep.trivial_splitting) {
            m_found = m;
            worst = rep.worst;
            return "D(" + std::to_string(m) + ")";
        }
    }
    return "Z-candidate";
}

int cmd_integrate(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    OrbitSegment seg = integrate(sys, rc.y0, rc.T, icfg);
    const TangentState& last = seg.states.back();
    if (!rc.output.empty()) {
        bool binary = rc.output.size() > 5 &&
                      rc.output.substr(rc.output.size() - 5) == ".hflx";
        std::ofstream os(rc.output,
                         binary ? std::ios::binary : std::ios::out);
        if (!os) throw ConfigError("cannot open " + rc.output);
        if (binary) {
            write_checkpoint(os, seg);
        } else if (rc.format == "csv") {
            write_orbit_csv(os, seg, sys);
        } else {
            Table t;
            t.header({"t", "y1", "y2", "y3", "y4", "H"});
            for (const auto& s : seg.states)
                t.row({format_double(s.t), format_double(s.y(0)),
                       format_double(s.y(1)), format_double(s.y(2)),
                       format_double(s.y(3)), format_double(sys.H(s.y))});
            t.write(os, rc.format, rc.timestamp);
        }
    }
    std::cout << "integrate " << rc.system << " T=" << format_double(rc.T)
              << " final=(" << format_double(last.y(0)) << ","
              << format_double(last.y(1)) << "," << format_double(last.y(2))
              << "," << format_double(last.y(3))
              << ") |dH|=" << format_double(std::abs(sys.H(last.y) - sys.H(rc.y0)))
              << " sympl=" << format_double(symplectic_residual(last.F)) << "\n";
    return 0;
}

int cmd_exponents(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.energy_tol = 0.0;
    ExponentEstimate est = upper_exponent(sys, rc.y0, rc.T, icfg);
    std::cout << "lambda_plus = " << format_double(est.lambda_plus)
              << "  (window T=" << format_double(rc.T)
              << ", half-window value " << format_double(est.lambda_half)
              << ", renorms " << est.renorm_count << ")\n";
    if (!rc.output.empty()) {
        Table t;
        t.header({"seed", "y1", "y2", "y3", "y4", "T", "lambda_plus",
                  "renorm_count", "escaped"});
        t.row({std::to_string(rc.seed), format_double(rc.y0(0)),
               format_double(rc.y0(1)), format_double(rc.y0(2)),
               format_double(rc.y0(3)), format_double(rc.T),
               format_double(est.lambda_plus), std::to_string(est.renorm_count),
               "0"});
        emit(t, rc);
    }
    return 0;
}

int cmd_splitting(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.energy_tol = 0.0;
    SplittingEstimate sp = oseledets_splitting(sys, rc.y0, rc.T, icfg);
    std::cout << "n_plus = (" << format_double(sp.n_plus(0)) << ","
              << format_double(sp.n_plus(1)) << ")  n_minus = ("
              << format_double(sp.n_minus(0)) << ","
              << format_double(sp.n_minus(1))
              << ")  angle = " << format_double(sp.angle) << "\n";
    // angle-decay diagnostic (reported, not asserted)
    std::cout << "angle-decay diagnostic: (1/T) log sin(angle) = "
              << format_double(std::log(std::max(1e-300, std::sin(sp.angle))) /
                               rc.T)
              << " per unit time\n";
    if (!rc.output.empty()) {
        // cocycle dump along the orbit at unit times
        std::vector<TransversalCocycle> cs;
        Phase4 y = rc.y0;
        for (int k = 0; k < (int)rc.T; ++k) {
            TransversalCocycle c = transversal_cocycle(sys, y, 1.0, icfg);
            c.t = k;
            cs.push_back(c);
            y = c.dst.base;
        }
        std::ofstream os(rc.output);
        if (!os) throw ConfigError("cannot open " + rc.output);
        write_cocycle_csv(os, cs);
        std::cout << "cocycle dump written to " << rc.output << "\n";
    }
    return 0;
}

int cmd_dominate(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.energy_tol = 0.0;
    DominationReport rep = domination_scan(sys, rc.y0, rc.m, rc.T, icfg);
    std::cout << "m=" << rc.m << " worst_ratio="
              << format_double(rep.worst) << " classification="
              << (rep.classification == DominationClass::Dominated
                      ? ("Dominated(" + std::to_string(rc.m) + ")")
                      : "NotDominated")
              << (rep.trivial_splitting ? " [trivial splitting]" : "") << "\n";
    if (!rc.output.empty()) {
        Table t;
        t.header({"t", "ratio"});
        for (std::size_t k = 0; k < rep.ratios.size(); ++k)
            t.row({std::to_string(k), format_double(rep.ratios[k])});
        emit(t, rc);
    }
    return 0;
}

int cmd_surface_scan(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.energy_tol = 0.0;
    SamplingOptions sopt;
    Box4 patch;
    patch.lo = rc.y0 - Phase4::Constant(rc.patch_radius);
    patch.hi = rc.y0 + Phase4::Constant(rc.patch_radius);
    sopt.region = patch;
    sopt.region_set = true;
    SurfaceSample sample;
    try {
        sample = sample_energy_surface(sys, rc.energy, rc.n, rc.seed, sopt);
    } catch (const EmptyLevelSetError& e) {
        std::cerr << "warning: " << e.what() << "\n";
        Table t;
        t.header({"y1", "y2", "y3", "y4", "m", "worst_ratio", "classification",
                  "lambda_plus", "escaped"});
        emit(t, rc);
        std::cout << "surface-scan: empty region, header-only output\n";
        return 0;
    }

    int n = (int)sample.points.size();
    std::vector<std::array<std::string, 9>> rows(n);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const Phase4& y = sample.points[i];
            double lambda = 0, worst = 0;
            int m_found = 0;
            std::string cls =
                classify_point(sys, y, rc, icfg, lambda, m_found, worst);
            rows[i] = {format_double(y(0)),
                       format_double(y(1)),
                       format_double(y(2)),
                       format_double(y(3)),
                       m_found > 0 ? std::to_string(m_found) : "NotDominated",
                       format_double(worst),
                       cls,
                       format_double(lambda),
                       cls == "escaped" ? "1" : "0"};
        }
    };
    int jobs = std::max(1, rc.jobs);
    if (jobs == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            int lo = j * chunk, hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    Table t;
    t.header({"y1", "y2", "y3", "y4", "m", "worst_ratio", "classification",
              "lambda_plus", "escaped"});
    for (const auto& r : rows)
        t.row(std::vector<std::string>(r.begin(), r.end()));
    emit(t, rc);
    int nd = 0, nz = 0, ne = 0;
    for (const auto& r : rows) {
        if (r[6] == "escaped")
            ++ne;
        else if (r[6] == "Z-candidate")
            ++nz;
        else
            ++nd;
    }
    std::cout << "surface-scan: " << n << " points, " << nd << " dominated, "
              << nz << " Z-candidates, " << ne << " escaped\n";
    return 0;
}

int cmd_perturb_verify(const RunConfig& rc) {
    double nu = rc.nu > 0.0 ? rc.nu : 0.5;
    BumpProfile p = build_bumps(rc.r, nu, rc.alpha);
    PerturbationCertificate cert = certify(p, rc.epsilon);
    KeyValueBlock b;
    b.add("certificate", "perturb");
    b.add("alpha", p.alpha);
    b.add("r", p.r);
    b.add("nu", p.nu);
    b.add("xi", p.xi);
    b.add("xi_prime", p.xi_prime);
    b.add("rho_bar", p.rho_bar);
    b.add("ell0", p.ell0);
    b.add("c_u_family", p.c_u);
    b.add("c0", cert.c0);
    b.add("c1", cert.c1);
    b.add("c2", cert.c2);
    b.add("c2_margin", cert.c2_margin);
    b.add("cu_c1", cert.cu_c1);
    b.add("cu_c2", cert.cu_c2);
    b.add("support_ok", cert.support_ok);
    b.add("support_sup", cert.support_sup);
    b.add("boundary_dx_ok", cert.boundary_dx_ok);
    b.add("boundary_dx_sup", cert.boundary_dx_sup);
    b.add("rotation_error", cert.rotation_error);
    b.add("flow_state_error", cert.flow_state_error);
    b.add("flow_diff_error", cert.flow_diff_error);
    b.add("alpha0_used", cert.alpha0_used);
    b.add("grid_points", cert.grid_points);
    if (rc.output.empty()) {
        b.write(std::cout);
    } else {
        std::ofstream os(rc.output);
        b.write(os);
        std::ofstream gs(rc.output + ".grid.csv");
        gs << "y1,y2,y3,y4,worst_d0,worst_d1,worst_d2\n";
        for (const GridPointWorst& g : perturbation_grid_rows(p)) {
            for (int i = 0; i < 4; ++i)
                gs << format_double(g.y(i)) << ",";
            gs << format_double(g.d0) << "," << format_double(g.d1) << ","
               << format_double(g.d2) << "\n";
        }
        std::cout << "perturb-verify: certificate written to " << rc.output
                  << " (+ .grid.csv)\n";
    }
    return 0;
}

int cmd_flowbox_verify(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.method = Method::Gauss2;
    icfg.energy_tol = 0.0;
    icfg.box_abort = false;
    FlowboxChart chart = build_chart(sys, rc.y0, rc.radius, icfg);
    ChartCertificate fresh = chart_differential_checks(chart, rc.n, rc.seed);
    KeyValueBlock b;
    b.add("certificate", "flowbox");
    b.add("system", rc.system);
    b.add("radius", chart.radius());
    b.add("sympl_residual", fresh.sympl_residual);
    b.add("conj_residual", fresh.conj_residual);
    b.add("field_residual", fresh.field_residual);
    b.add("n_samples", fresh.n_samples);
    if (rc.output.empty()) {
        b.write(std::cout);
    } else {
        std::ofstream os(rc.output);
        b.write(os);
        std::cout << "flowbox-verify: certificate written to " << rc.output
                  << "\n";
    }
    if (fresh.sympl_residual > rc.tol || fresh.field_residual > rc.tol)
        throw CertificateError(
            "chart residual exceeds tol = " + format_double(rc.tol),
            "chart residual");
    return 0;
}

int cmd_realize(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    RealizeOptions opt;
    opt.seed = rc.seed;
    if (rc.nu > 0.0) opt.nu_override = rc.nu;
    RealizedHamiltonian rh =
        realize_rotation(sys, rc.y0, rc.alpha, rc.r, rc.epsilon, opt);
    KeyValueBlock b;
    b.add("certificate", "realize");
    b.add("system", rc.system);
    b.add("alpha", rc.alpha);
    b.add("r", rc.r);
    b.add("nu", rh.profile.nu);
    b.add("epsilon", rc.epsilon);
    b.add("gamma", rh.certificate.gamma);
    b.add("disk_radius", rh.certificate.disk_radius);
    b.add("rotation_error", rh.certificate.rotation_error);
    b.add("rotation_error_direct", rh.certificate.rotation_error_direct);
    b.add("kappa_measured", rh.certificate.kappa_measured);
    b.add("c2_distance", rh.certificate.c2_distance);
    b.add("chart_sympl_residual", rh.certificate.chart_sympl_residual);
    b.add("n_disk", rh.certificate.n_disk);
    if (rc.output.empty()) {
        b.write(std::cout);
    } else {
        std::ofstream os(rc.output);
        b.write(os);
        std::cout << "realize: certificate written to " << rc.output << "\n";
    }
    return 0;
}

int cmd_exchange_demo(const RunConfig& rc) {
    HamiltonianSystem sys = catalog_system(rc.system);
    IntegratorConfig icfg = rc.integrator();
    icfg.energy_tol = 0.0;
    int t = (int)rc.T;
    std::vector<Mat2> blocks = cocycle_blocks(sys, rc.y0, double(t), icfg);
    SplittingEstimate sp =
        oseledets_splitting(sys, rc.y0, std::min(20.0, double(t)), icfg);
    DecayDemoResult res = decay_demo(blocks, sp, rc.tol, rc.alpha);
    std::cout << "decay-demo " << rc.system << " t=" << t
              << ": raw rate = " << format_double(res.raw_rate)
              << ", modified rate = " << format_double(res.rate)
              << " (delta = " << format_double(rc.tol) << ")\n";
    if (res.exchange_length > 0) {
        std::cout << "exchange window: start " << res.exchange_start
                  << ", length " << res.exchange_length << ", angles";
        for (double a : res.angles) std::cout << " " << format_double(a);
        std::cout << "\n";
    } else {
        std::cout << "no exchange needed (raw rate below delta)\n";
    }
    return res.rate < rc.tol ? 0 : 1;
}

int cmd_catalog() {
    for (const auto& id : catalog_ids()) std::cout << id << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hamflow: Hamiltonian flows on (R^4, omega0), Poincare "
                 "cocycles, Lyapunov exponents, dominated splitting, and "
                 "certified local perturbations"};
    app.require_subcommand(1);

    RunConfig rc;
    rc.nu = 0.0;  // CLI default: realize derives nu from kappa unless given
    std::string config_path, y0_str = "0,0,0,0";

    if (const char* env = std::getenv("HAMFLOW_SEED"))
        rc.seed = std::strtoull(env, nullptr, 10);

    app.add_option("--config", config_path, "key=value config file");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--system", rc.system, "catalog id");
        sub->add_option("--y0,--x,--center", y0_str, "phase point a,b,c,d");
        sub->add_option("--T", rc.T, "time window");
        sub->add_option("--dt", rc.dt, "integrator step");
        sub->add_option("--method", rc.method, "implicit-midpoint or gauss2");
        sub->add_option("--m", rc.m, "domination window");
        sub->add_option("--m-max", rc.m_max, "largest domination window");
        sub->add_option("--n", rc.n, "sample count");
        sub->add_option("--seed", rc.seed, "RNG seed (HAMFLOW_SEED fallback)");
        sub->add_option("--energy", rc.energy, "energy level e");
        sub->add_option("--alpha", rc.alpha, "rotation angle / budget");
        sub->add_option("--r", rc.r, "bump radius");
        sub->add_option("--nu", rc.nu, "bump inner fraction");
        sub->add_option("--epsilon", rc.epsilon, "C2 closeness budget");
        sub->add_option("--radius", rc.radius, "chart radius");
        sub->add_option("--tol", rc.tol, "tolerance / delta");
        sub->add_option("--patch-radius", rc.patch_radius,
                        "surface patch half-width");
        sub->add_option("--jobs", rc.jobs, "parallel workers");
        sub->add_option("--output", rc.output, "output path");
        sub->add_option("--format", rc.format, "csv or plot-data");
        sub->add_flag_callback(
            "--no-timestamp", [&rc]() { rc.timestamp = false; },
            "suppress the timestamped header line");
    };

    CLI::App* s_int = app.add_subcommand("integrate", "integrate the flow");
    CLI::App* s_exp = app.add_subcommand("exponents", "finite-time exponent");
    CLI::App* s_spl = app.add_subcommand("splitting", "Oseledets directions");
    CLI::App* s_dom = app.add_subcommand("dominate", "m-domination scan");
    CLI::App* s_scan = app.add_subcommand(
        "surface-scan", "exponent/domination grid over a sampled surface");
    CLI::App* s_pv =
        app.add_subcommand("perturb-verify", "certify the local perturbation");
    CLI::App* s_fv =
        app.add_subcommand("flowbox-verify", "build and certify a chart");
    CLI::App* s_rz =
        app.add_subcommand("realize", "transport the rotation perturbation");
    CLI::App* s_xd =
        app.add_subcommand("exchange-demo", "direction-exchange decay demo");
    CLI::App* s_cat = app.add_subcommand("catalog", "list system ids");
    for (CLI::App* sub :
         {s_int, s_exp, s_spl, s_dom, s_scan, s_pv, s_fv, s_rz, s_xd, s_cat})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot read config " + config_path);
            std::stringstream buf;
            buf << is.rdbuf();
            rc = RunConfig::parse(buf.str());
        }
        if (config_path.empty() || y0_str != "0,0,0,0")
            rc.y0 = parse_vec4(y0_str);

        if (app.got_subcommand(s_int)) return cmd_integrate(rc);
        if (app.got_subcommand(s_exp)) return cmd_exponents(rc);
        if (app.got_subcommand(s_spl)) return cmd_splitting(rc);
        if (app.got_subcommand(s_dom)) return cmd_dominate(rc);
        if (app.got_subcommand(s_scan)) return cmd_surface_scan(rc);
        if (app.got_subcommand(s_pv)) return cmd_perturb_verify(rc);
        if (app.got_subcommand(s_fv)) return cmd_flowbox_verify(rc);
        if (app.got_subcommand(s_rz)) return cmd_realize(rc);
        if (app.got_subcommand(s_xd)) return cmd_exchange_demo(rc);
        if (app.got_subcommand(s_cat)) return cmd_catalog();
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CertificateError& e) {
        std::cerr << "certificate failure [" << e.violated_bound
                  << "]: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
