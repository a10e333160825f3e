#pragma once

#include <vector>

#include "hamflow/linalg.hpp"
#include "hamflow/lyapunov.hpp"

namespace hamflow {

// Direction-exchange at the linear-cocycle level: given the unit-time blocks
// B_1..B_m along an orbit and the splitting (n+, n-) attached at the start,
// find per-step rotation angles |a_i| <= alpha0 such that
// L^m = (B_m R_{a_m}) ... (B_1 R_{a_1}) maps the n+ line onto the n- line at
// the endpoint (the image lines n±_end are the transported splitting).
struct ExchangeSchedule {
    std::vector<double> angles;
    Mat2 L = Mat2::Identity();      // the composed matrix
    double final_angle = 0.0;       // angle(L n+, n-_end), 0 on success
    double hypothesis_ratio = 0.0;  // ||Phi^m n-|| / ||Phi^m n+||
};

struct ExchangeOptions {
    double target_tol = 1e-9;       // success threshold on the final angle
    bool require_hypothesis = true; // enforce ratio >= 1/2 precondition
};

// Exact feasibility by reachable-interval propagation on the projective line
// (each step widens the reachable direction interval by alpha0 and pushes it
// through the block's circle map); the schedule is recovered by backtracking.
// Throws NoExchangeError carrying the best achievable final angle.
ExchangeSchedule exchange_schedule(const std::vector<Mat2>& blocks,
                                   const Vec2& n_plus, const Vec2& n_minus,
                                   double alpha0,
                                   const ExchangeOptions& opt = {});

// Best achievable final angle without throwing (used by feasibility tests).
double exchange_best_angle(const std::vector<Mat2>& blocks, const Vec2& n_plus,
                           const Vec2& n_minus, double alpha0);

struct DecayDemoResult {
    double rate = 0.0;           // (1/t) log ||L^t||
    double raw_rate = 0.0;       // (1/t) log ||Phi^t|| of the unmodified product
    int exchange_start = 0;      // step index where the exchange window begins
    int exchange_length = 0;     // m, 0 when no exchange was needed
    std::vector<double> angles;  // the rotation schedule inside the window
};

// The norm-decay mechanism: identity rotations outside one exchange window
// near t/2; returns (1/t) log ||L^t||. When the raw rate is already < delta
// the empty schedule is returned. Exchange failures propagate.
DecayDemoResult decay_demo(const std::vector<Mat2>& blocks,
                           const SplittingEstimate& splitting, double delta,
                           double alpha0, int m_max = 8);

}  // namespace hamflow
