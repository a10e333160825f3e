#include "hamflow/lyapunov.hpp"

#include <cmath>
#include <sstream>
#include <thread>

namespace hamflow {

std::vector<Mat2> cocycle_blocks(const HamiltonianSystem& sys, const Phase4& y0,
                                 double T, const IntegratorConfig& cfg) {
    const double dir = (T >= 0.0) ? 1.0 : -1.0;
    int nblocks = (int)std::floor(std::abs(T) + 1e-12);
    std::vector<Mat2> blocks;
    blocks.reserve(nblocks);
    Phase4 y = y0;
    TransversalFrame f = transversal_frame(sys, y);
    Stepper st(sys, cfg);
    for (int k = 0; k < nblocks; ++k) {
        Mat4 F = Mat4::Identity();
        double t = 0.0;
        st.run(y, F, t, dir * 1.0);
        TransversalFrame g = transversal_frame(sys, y);
        Mat2 B;
        for (int j = 0; j < 2; ++j) {
            Vec4 img = F * (j == 0 ? f.u1 : f.u2);
            B(0, j) = g.u1.dot(img);
            B(1, j) = g.u2.dot(img);
        }
        blocks.push_back(B);
        f = g;
    }
    return blocks;
}

namespace {

struct ExponentRun {
    ScaledProduct<2> prod;
    double lambda = 0.0, lambda_half = 0.0;
    Phase4 end = Phase4::Zero();
};

ExponentRun run_exponent(const HamiltonianSystem& sys, const Phase4& y0,
                         double T, const IntegratorConfig& cfg) {
    const double dir = (T >= 0.0) ? 1.0 : -1.0;
    int nblocks = (int)std::floor(std::abs(T) + 1e-12);
    if (nblocks < 1) nblocks = 1;
    ExponentRun out;
    Phase4 y = y0;
    TransversalFrame f = transversal_frame(sys, y);
    Stepper st(sys, cfg);
    double span = std::abs(T);
    for (int k = 0; k < nblocks; ++k) {
        double step = std::min(1.0, span - k);
        Mat4 F = Mat4::Identity();
        double t = 0.0;
        st.run(y, F, t, dir * step);
        TransversalFrame g = transversal_frame(sys, y);
        Mat2 B;
        for (int j = 0; j < 2; ++j) {
            Vec4 img = F * (j == 0 ? f.u1 : f.u2);
            B(0, j) = g.u1.dot(img);
            B(1, j) = g.u2.dot(img);
        }
        out.prod.push(B);
        f = g;
        if (2 * (k + 1) == nblocks)
            out.lambda_half = out.prod.log_norm() / (0.5 * std::abs(T));
    }
    out.lambda = out.prod.log_norm() / std::abs(T);
    out.end = y;
    return out;
}

}  // namespace

ExponentEstimate upper_exponent(const HamiltonianSystem& sys, const Phase4& y0,
                                double T, const IntegratorConfig& cfg,
                                const LyapunovOptions&) {
    ExponentRun run = run_exponent(sys, y0, T, cfg);
    ExponentEstimate est;
    est.lambda_plus = run.lambda;
    est.lambda_half = run.lambda_half;
    est.T = T;
    est.renorm_count = run.prod.renorm_count;
    est.base = y0;
    if (est.lambda_plus < -1e-9)
        throw TrivialSplittingError(
            "upper exponent " + std::to_string(est.lambda_plus) +
                " below the area-preservation floor",
            est.lambda_plus);
    return est;
}

SplittingEstimate oseledets_splitting(const HamiltonianSystem& sys,
                                      const Phase4& y0, double T,
                                      const IntegratorConfig& cfg,
                                      const LyapunovOptions& opt) {
    ExponentRun fwd = run_exponent(sys, y0, T, cfg);
    if (fwd.lambda <= opt.splitting_threshold)
        throw TrivialSplittingError(
            "exponent " + std::to_string(fwd.lambda) +
                " below splitting threshold: trivial Oseledets splitting",
            fwd.lambda);
    ExponentRun bwd = run_exponent(sys, y0, -T, cfg);
    SplittingEstimate est;
    est.n_plus = fwd.prod.top_right_singular();
    est.n_minus = bwd.prod.top_right_singular();
    est.angle = line_angle(est.n_plus, est.n_minus);
    est.forward_T = T;
    est.backward_T = -T;
    return est;
}

std::pair<double, double> exponent_equality_check(const HamiltonianSystem& sys,
                                                  const Phase4& y0, double T,
                                                  const IntegratorConfig& cfg) {
    // tangent route: growth of D phi^T on vectors started in the transversal
    // fiber, measured in the full tangent space (no endpoint projection)
    TransversalFrame f0 = transversal_frame(sys, y0);
    const double dir = (T >= 0.0) ? 1.0 : -1.0;
    int nblocks = (int)std::floor(std::abs(T) + 1e-12);
    Eigen::Matrix<double, 4, 2> M;
    M.col(0) = f0.u1;
    M.col(1) = f0.u2;
    double log_scale = 0.0;
    Phase4 y = y0;
    Stepper st(sys, cfg);
    ScaledProduct<2> trans;
    TransversalFrame f = f0;
    for (int k = 0; k < nblocks; ++k) {
        Mat4 F = Mat4::Identity();
        double t = 0.0;
        st.run(y, F, t, dir * 1.0);
        M = (F * M).eval();
        double m = M.lpNorm<Eigen::Infinity>();
        if (m > 0.0) {
            M /= m;
            log_scale += std::log(m);
        }
        TransversalFrame g = transversal_frame(sys, y);
        Mat2 B;
        for (int j = 0; j < 2; ++j) {
            Vec4 img = F * (j == 0 ? f.u1 : f.u2);
            B(0, j) = g.u1.dot(img);
            B(1, j) = g.u2.dot(img);
        }
        trans.push(B);
        f = g;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(M);
    double lam_tangent =
        (log_scale + std::log(svd.singularValues()(0))) / std::abs(T);
    double lam_transversal = trans.log_norm() / std::abs(T);
    return {lam_tangent, lam_transversal};
}

IntegratedLE integrated_le(const HamiltonianSystem& sys, const SurfaceRegion& rg,
                           double T, int n, std::uint64_t seed,
                           const IntegratorConfig& cfg,
                           const LyapunovOptions& opt, int jobs) {
    if (n < 2) throw EmptyLevelSetError("integrated_le: n >= 2 required");
    SamplingOptions sopt;
    sopt.region = rg.box;
    sopt.region_set = true;
    SurfaceSample sample = sample_energy_surface(sys, rg.e, n, seed, sopt);

    std::vector<double> vals(n, 0.0);
    std::vector<char> ok(n, 0);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            try {
                ExponentEstimate est =
                    upper_exponent(sys, sample.points[i], T, cfg, opt);
                vals[i] = est.lambda_plus;
                ok[i] = 1;
            } catch (const Error&) {
                ok[i] = 0;  // escaped / irregular: dropped, counted
            }
        }
    };
    if (jobs <= 1) {
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

    IntegratedLE res;
    res.T = T;
    res.region = rg.label.empty()
                     ? ("surface e=" + std::to_string(rg.e))
                     : rg.label;
    double wsum = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) {
            ++res.n_escaped;
            continue;
        }
        wsum += sample.weights[i];
        ++res.n_samples;
    }
    if (res.n_samples == 0)
        throw EmptyLevelSetError("integrated_le: no valid samples in region " +
                                 res.region);
    for (int i = 0; i < n; ++i)
        if (ok[i]) mean += sample.weights[i] / wsum * vals[i];
    // weighted variance with effective sample size 1 / sum(w^2)
    double var = 0.0, w2 = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) continue;
        double w = sample.weights[i] / wsum;
        var += w * (vals[i] - mean) * (vals[i] - mean);
        w2 += w * w;
    }
    res.value = mean;
    res.std_error = std::sqrt(std::max(0.0, var * w2));
    return res;
}

}  // namespace hamflow
