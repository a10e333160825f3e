#include "hamflow/exchange.hpp"

#include <cmath>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {

const double kPi = M_PI;

double mod_pi(double x) {
    double y = std::fmod(x, kPi);
    if (y < 0.0) y += kPi;
    return y;
}

// signed difference from -> to on the projective circle, in (-pi/2, pi/2]
double signed_diff(double from, double to) {
    double d = std::fmod(to - from, kPi);
    if (d > 0.5 * kPi) d -= kPi;
    if (d <= -0.5 * kPi) d += kPi;
    return d;
}

double dist_pi(double a, double b) { return std::abs(signed_diff(a, b)); }

double theta_of(const Vec2& v) { return mod_pi(std::atan2(v(1), v(0))); }

// action of an invertible 2x2 block on a direction (line)
double line_map(const Mat2& B, double theta) {
    Vec2 v(std::cos(theta), std::sin(theta));
    Vec2 w = B * v;
    return theta_of(w);
}

// arc on the projective circle: center c, half width w; w >= pi/2 is full
struct Arc {
    double c = 0.0, w = 0.0;
    bool full() const { return w >= 0.5 * kPi - 1e-15; }
    bool contains(double theta, double tol = 0.0) const {
        return full() || dist_pi(theta, c) <= w + tol;
    }
    double clamp(double theta) const {
        if (contains(theta)) return theta;
        double d = signed_diff(c, theta);
        return mod_pi(c + (d > 0 ? w : -w));
    }
    double distance(double theta) const {
        if (full()) return 0.0;
        return std::max(0.0, dist_pi(theta, c) - w);
    }
};

Arc widen(const Arc& a, double alpha) {
    Arc b = a;
    b.w = std::min(0.5 * kPi, a.w + std::min(alpha, 0.5 * kPi));
    return b;
}

// image of an arc under the monotone circle map induced by B
Arc push(const Mat2& B, const Arc& a) {
    if (a.full()) return Arc{0.0, 0.5 * kPi};
    double lo = a.c - a.w, hi = a.c + a.w;
    double flo = line_map(B, lo), fhi = line_map(B, hi);
    double len;
    double start;
    if (B.determinant() >= 0.0) {
        len = mod_pi(fhi - flo);
        start = flo;
    } else {
        len = mod_pi(flo - fhi);
        start = fhi;
    }
    if (a.w == 0.0) len = 0.0;
    Arc out;
    out.w = 0.5 * len;
    out.c = mod_pi(start + out.w);
    return out;
}

struct Propagation {
    std::vector<Arc> pre;   // widened arcs, before each block
    std::vector<Arc> post;  // after each block
    double best = 0.0;      // distance from the target to the final arc
    double target = 0.0;
};

Propagation propagate(const std::vector<Mat2>& blocks, const Vec2& n_plus,
                      const Vec2& n_minus, double alpha0) {
    Propagation pr;
    Arc arc{theta_of(n_plus), 0.0};
    Vec2 target_vec = n_minus;
    for (const Mat2& B : blocks) {
        Arc w = widen(arc, alpha0);
        pr.pre.push_back(w);
        arc = push(B, w);
        pr.post.push_back(arc);
        target_vec = (B * target_vec).normalized();  // transported splitting
    }
    pr.target = theta_of(target_vec);
    pr.best = pr.post.empty() ? dist_pi(theta_of(n_plus), pr.target)
                              : pr.post.back().distance(pr.target);
    return pr;
}

}  // namespace

double exchange_best_angle(const std::vector<Mat2>& blocks, const Vec2& n_plus,
                           const Vec2& n_minus, double alpha0) {
    return propagate(blocks, n_plus, n_minus, alpha0).best;
}

ExchangeSchedule exchange_schedule(const std::vector<Mat2>& blocks,
                                   const Vec2& n_plus, const Vec2& n_minus,
                                   double alpha0, const ExchangeOptions& opt) {
    if (blocks.empty())
        throw ParameterError("exchange_schedule: no cocycle blocks");
    const int m = (int)blocks.size();

    Mat2 Phi = Mat2::Identity();
    for (const Mat2& B : blocks) Phi = (B * Phi).eval();
    ExchangeSchedule sch;
    sch.hypothesis_ratio =
        (Phi * n_minus.normalized()).norm() / (Phi * n_plus.normalized()).norm();

    Propagation pr = propagate(blocks, n_plus, n_minus, alpha0);
    if (opt.require_hypothesis && sch.hypothesis_ratio < 0.5)
        throw NoExchangeError(
            "exchange hypothesis ||Phi^m n-||/||Phi^m n+|| = " +
                std::to_string(sch.hypothesis_ratio) + " < 1/2",
            pr.best);
    if (pr.best > opt.target_tol)
        throw NoExchangeError("no exchange schedule within alpha0 = " +
                                  std::to_string(alpha0) +
                                  ", best final angle " + std::to_string(pr.best),
                              pr.best);

    // backtrack for the angles
    std::vector<double> angles(m, 0.0);
    double cur = pr.post.back().clamp(pr.target);
    for (int i = m - 1; i >= 0; --i) {
        Mat2 Binv = blocks[i].inverse();
        double psi = pr.pre[i].clamp(line_map(Binv, cur));
        double prev = (i == 0) ? theta_of(n_plus) : pr.post[i - 1].clamp(psi);
        double a = signed_diff(prev, psi);
        if (a > alpha0) a = alpha0;
        if (a < -alpha0) a = -alpha0;
        angles[i] = a;
        cur = prev;
    }

    Mat2 L = Mat2::Identity();
    for (int i = 0; i < m; ++i) {
        Mat2 R;
        R << std::cos(angles[i]), -std::sin(angles[i]), std::sin(angles[i]),
            std::cos(angles[i]);
        L = (blocks[i] * R * L).eval();
    }
    sch.angles = angles;
    sch.L = L;
    Vec2 end_minus = (Phi * n_minus.normalized()).normalized();
    sch.final_angle = line_angle(L * n_plus.normalized(), end_minus);
    return sch;
}

DecayDemoResult decay_demo(const std::vector<Mat2>& blocks,
                           const SplittingEstimate& splitting, double delta,
                           double alpha0, int m_max) {
    const int t = (int)blocks.size();
    if (t < 2) throw ParameterError("decay_demo: need at least 2 blocks");

    DecayDemoResult res;
    {
        ScaledProduct<2> raw;
        for (const Mat2& B : blocks) raw.push(B);
        res.raw_rate = raw.log_norm() / t;
    }
    if (res.raw_rate < delta) {  // nothing to do, empty schedule
        res.rate = res.raw_rate;
        return res;
    }

    NoExchangeError last("decay_demo: no exchange attempted", 0.0);
    bool have_error = false;
    double best_rate = res.raw_rate;
    DecayDemoResult best = res;
    for (int m = 1; m <= std::min(m_max, t); ++m) {
        int s = (t - m) / 2;  // exchange window centered near t/2
        // transport the expanding direction forward (stable); the contracting
        // direction at the window start comes from the future blocks (the
        // least-expanded source direction of the remaining product), since
        // forward transport of n- amplifies noise by the domination gap
        Vec2 np = splitting.n_plus.normalized();
        for (int k = 0; k < s; ++k) np = (blocks[k] * np).normalized();
        Vec2 nm;
        if (s + 1 < t) {
            ScaledProduct<2> rest;
            for (int k = s; k < t; ++k) rest.push(blocks[k]);
            Eigen::JacobiSVD<Mat2> svd(rest.M, Eigen::ComputeFullV);
            nm = svd.matrixV().col(1);
        } else {
            nm = splitting.n_minus.normalized();
        }
        std::vector<Mat2> window(blocks.begin() + s, blocks.begin() + s + m);
        ExchangeOptions eopt;
        eopt.require_hypothesis = false;  // the demo forces the mechanism
        ExchangeSchedule sch;
        try {
            sch = exchange_schedule(window, np, nm, alpha0, eopt);
        } catch (const NoExchangeError& e) {
            last = e;
            have_error = true;
            continue;
        }
        ScaledProduct<2> prod;
        for (int k = 0; k < s; ++k) prod.push(blocks[k]);
        for (int i = 0; i < m; ++i) {
            Mat2 R;
            R << std::cos(sch.angles[i]), -std::sin(sch.angles[i]),
                std::sin(sch.angles[i]), std::cos(sch.angles[i]);
            prod.push((window[i] * R).eval());
        }
        for (int k = s + m; k < t; ++k) prod.push(blocks[k]);
        double rate = prod.log_norm() / t;
        if (rate < best_rate) {
            best_rate = rate;
            best.rate = rate;
            best.raw_rate = res.raw_rate;
            best.exchange_start = s;
            best.exchange_length = m;
            best.angles = sch.angles;
        }
        if (rate < delta) return best;
    }
    if (best.exchange_length == 0 && have_error) throw last;
    return best;  // caller asserts rate < delta
}

}  // namespace hamflow
