#include "hamflow/domination.hpp"

#include <cmath>

namespace hamflow {

namespace {

// Forward unit-time blocks along [-W, T+W] about y0 (index k maps the frame
// at integer time k - W relative to the backward-shifted start).
struct BlockLine {
    std::vector<Mat2> blocks;  // blocks[k]: time (k - W) -> (k - W + 1)
    int W = 0;                 // backward extension

    Mat2 window(int from, int len) const {  // product over [from, from+len]
        Mat2 P = Mat2::Identity();
        for (int k = 0; k < len; ++k) P = (blocks[from + W + k] * P).eval();
        return P;
    }
};

BlockLine build_block_line(const HamiltonianSystem& sys, const Phase4& y0,
                           int W, int T_int, const IntegratorConfig& cfg) {
    BlockLine line;
    line.W = W;
    Phase4 start = y0;
    if (W > 0) {
        TangentState back = integrate_tangent(sys, y0, -double(W), cfg);
        start = back.y;
    }
    line.blocks = cocycle_blocks(sys, start, double(T_int + 2 * W), cfg);
    return line;
}

// most expanded source direction (top right-singular vector)
Vec2 top_source(const Mat2& P) {
    Eigen::JacobiSVD<Mat2> svd(P, Eigen::ComputeFullV);
    return svd.matrixV().col(0);
}
// least expanded image direction (left-singular vector of sigma_min)
Vec2 bottom_image(const Mat2& P) {
    Eigen::JacobiSVD<Mat2> svd(P, Eigen::ComputeFullU);
    return svd.matrixU().col(1);
}

// direction-estimate window, halved while the extended orbit escapes the box
SplittingEstimate splitting_with_window(const HamiltonianSystem& sys,
                                        const Phase4& x, int& W,
                                        const IntegratorConfig& cfg,
                                        double threshold) {
    LyapunovOptions lopt;
    lopt.splitting_threshold = threshold;
    while (true) {
        try {
            return oseledets_splitting(sys, x, double(W), cfg, lopt);
        } catch (const EscapeError&) {
            if (W <= 2) throw;
            W = std::max(2, W / 2);
        }
    }
}

}  // namespace

DominationReport domination_scan(const HamiltonianSystem& sys, const Phase4& y0,
                                 int m, double T, const IntegratorConfig& cfg,
                                 const DominationOptions& opt) {
    if (m < 1) throw ParameterError("domination_scan: m >= 1 required");
    DominationReport rep;
    rep.m = m;
    rep.orbit = sys.id + " from (" + std::to_string(y0(0)) + "," +
                std::to_string(y0(1)) + "," + std::to_string(y0(2)) + "," +
                std::to_string(y0(3)) + ")";

    int T_int = (int)std::floor(T + 1e-12);
    int n_times = T_int - m + 1;
    if (n_times < 1)
        throw ParameterError("domination_scan: T must allow at least one window");

    int W = opt.direction_window_factor * m;

    if (!opt.supplied_directions.has_value()) {
        // trivial-splitting policy: classified NotDominated, flagged
        try {
            ExponentEstimate est = upper_exponent(sys, y0, std::max(T, 4.0), cfg);
            if (est.lambda_plus <= opt.splitting_threshold) {
                rep.trivial_splitting = true;
                rep.classification = DominationClass::NotDominated;
                return rep;
            }
        } catch (const TrivialSplittingError&) {
            rep.trivial_splitting = true;
            rep.classification = DominationClass::NotDominated;
            return rep;
        }
    }

    BlockLine line;
    while (true) {
        try {
            line = build_block_line(sys, y0, W, T_int, cfg);
            break;
        } catch (const EscapeError&) {
            if (W <= 2) throw;
            W = std::max(2, W / 2);  // shrink the direction window, not the scan
        }
    }

    for (int tk = 0; tk < n_times; ++tk) {
        Vec2 np, nm;
        if (opt.supplied_directions) {
            np = opt.supplied_directions->first.normalized();
            nm = opt.supplied_directions->second.normalized();
        } else {
            np = top_source(line.window(tk, W));
            nm = bottom_image(line.window(tk - W, W));
        }
        Mat2 Pm = line.window(tk, m);
        double ratio = (Pm * nm).norm() / (Pm * np).norm();
        rep.ratios.push_back(ratio);
    }
    rep.worst = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.classification = (rep.worst <= 0.5) ? DominationClass::Dominated
                                            : DominationClass::NotDominated;
    return rep;
}

double conservation_identity_residual(const HamiltonianSystem& sys,
                                      const Phase4& y0, double t,
                                      const IntegratorConfig& cfg,
                                      const DominationOptions& opt) {
    Vec2 np, nm;
    if (opt.supplied_directions) {
        np = opt.supplied_directions->first.normalized();
        nm = opt.supplied_directions->second.normalized();
    } else {
        int W = std::max(8, (int)std::ceil(t));
        SplittingEstimate sp =
            splitting_with_window(sys, y0, W, cfg, opt.splitting_threshold);
        np = sp.n_plus;
        nm = sp.n_minus;
    }
    if (t == 0.0) return 0.0;
    TransversalCocycle c = transversal_cocycle(sys, y0, t, cfg);
    Vec2 ip = c.Phi * np, im = c.Phi * nm;
    double splus = ip.norm(), sminus = im.norm();
    double gamma0 = line_angle(np, nm);
    double gammat = line_angle(ip, im);
    double x0 = sys.field(y0).norm();
    double xt = sys.field(c.dst.base).norm();
    double lhs = std::sin(gamma0) * x0;
    double rhs = std::sin(gammat) * xt * splus * sminus;
    return std::abs(lhs - rhs) / lhs;
}

HyperbolicityCertificate anosov_diagnostic(const HamiltonianSystem& sys,
                                           double e, int m_max, int n, double T,
                                           std::uint64_t seed,
                                           const IntegratorConfig& cfg,
                                           const DominationOptions& opt,
                                           const SamplingOptions& sopt) {
    if (n < 1) throw EmptyLevelSetError("anosov_diagnostic: n >= 1 required");
    if (m_max < 1) throw ParameterError("anosov_diagnostic: m_max >= 1");
    SurfaceSample sample = sample_energy_surface(sys, e, n, seed, sopt);

    HyperbolicityCertificate cert;
    cert.n_points = n;
    int t_fit = std::max(m_max, (int)std::floor(T + 1e-12));
    std::vector<std::vector<double>> ratios(n);  // ratios[i][t-1]

    for (int i = 0; i < n; ++i) {
        const Phase4& x = sample.points[i];
        Vec2 np, nm;
        bool trivial = false;
        if (opt.supplied_directions) {
            np = opt.supplied_directions->first.normalized();
            nm = opt.supplied_directions->second.normalized();
        } else {
            try {
                int W = opt.direction_window_factor * std::max(1, m_max);
                SplittingEstimate sp = splitting_with_window(
                    sys, x, W, cfg, opt.splitting_threshold);
                np = sp.n_plus;
                nm = sp.n_minus;
            } catch (const TrivialSplittingError&) {
                trivial = true;
            }
        }
        ratios[i].assign(t_fit, 1.0);  // trivial convention: ratio 1
        if (trivial) {
            ++cert.n_trivial;
            continue;
        }
        std::vector<Mat2> blocks = cocycle_blocks(sys, x, double(t_fit), cfg);
        Mat2 P = Mat2::Identity();
        for (int t = 1; t <= t_fit; ++t) {
            P = (blocks[t - 1] * P).eval();
            ratios[i][t - 1] = (P * nm).norm() / (P * np).norm();
        }
    }

    // smallest m <= m_max with uniform ratio <= 1/2 over all sampled points
    for (int m = 1; m <= m_max; ++m) {
        bool all = true;
        for (int i = 0; i < n; ++i)
            if (!(ratios[i][m - 1] <= 0.5)) {
                all = false;
                break;
            }
        if (all) {
            cert.contraction_m = m;
            cert.satisfied = true;
            break;
        }
    }

    // least-squares fit of log ratio = log C + t log theta over integer t
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long cnt = 0;
    for (int i = 0; i < n; ++i)
        for (int t = 1; t <= t_fit; ++t) {
            double lr = std::log(std::max(1e-300, ratios[i][t - 1]));
            sx += t;
            sy += lr;
            sxx += double(t) * t;
            sxy += t * lr;
            ++cnt;
        }
    double denom = cnt * sxx - sx * sx;
    if (denom > 0) {
        double slope = (cnt * sxy - sx * sy) / denom;
        double icept = (sy - slope * sx) / cnt;
        cert.theta = std::exp(slope);
        cert.C = std::exp(icept);
    }
    return cert;
}

}  // namespace hamflow
