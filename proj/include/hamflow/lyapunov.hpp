#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamflow/poincare.hpp"
#include "hamflow/sampling.hpp"

namespace hamflow {

// Product of unit-time cocycle blocks kept in scaled form so that
// log ||product|| is available without overflow (blocks renormalized by
// their max entry each unit of time, log scale accumulated).
template <int N>
struct ScaledProduct {
    Eigen::Matrix<double, N, N> M = Eigen::Matrix<double, N, N>::Identity();
    double log_scale = 0.0;
    int renorm_count = 0;

    void push(const Eigen::Matrix<double, N, N>& block) {
        M = (block * M).eval();
        double m = M.template lpNorm<Eigen::Infinity>();
        if (m > 0.0) {
            M /= m;
            log_scale += std::log(m);
        }
        ++renorm_count;
    }
    double log_norm() const {  // log of the top singular value
        Eigen::JacobiSVD<Eigen::Matrix<double, N, N>> svd(M);
        return log_scale + std::log(svd.singularValues()(0));
    }
    Eigen::Matrix<double, 2, 1> top_right_singular() const
        requires(N == 2)
    {
        Eigen::JacobiSVD<Mat2> svd(M, Eigen::ComputeFullV);
        return svd.matrixV().col(0);
    }
};

struct ExponentEstimate {
    double lambda_plus = 0.0;  // (1/T) log ||Phi^T||, >= 0 up to conditioning
    double lambda_half = 0.0;  // same at window T/2 (two-window diagnostic)
    double T = 0.0;
    int renorm_count = 0;
    Phase4 base = Phase4::Zero();
};

struct SplittingEstimate {
    Vec2 n_plus = Vec2::UnitX();   // most-expanded direction, forward window
    Vec2 n_minus = Vec2::UnitY();  // most-expanded direction, backward window
    double angle = 0.0;            // arccos |<n+, n->| between the lines
    double forward_T = 0.0, backward_T = 0.0;
};

struct IntegratedLE {
    double value = 0.0;      // weighted mean of (1/T) log ||Phi^T||
    double T = 0.0;
    int n_samples = 0;       // contributing samples
    int n_escaped = 0;       // dropped (reported, never imputed)
    double std_error = 0.0;  // weighted standard error
    std::string region;
};

struct LyapunovOptions {
    double splitting_threshold = 1e-2;  // per unit time; below: Oseledets case (1)
    double renorm_period = 1.0;         // cadence of the QR/scale renormalization
};

// Unit-time transversal cocycle blocks along the orbit of y0 (block k maps the
// frame at time k to the frame at time k+1); assembled sequentially, one
// tangent integration per unit, frames re-built (and re-orthogonalized) at
// every block boundary.
std::vector<Mat2> cocycle_blocks(const HamiltonianSystem& sys, const Phase4& y0,
                                 double T, const IntegratorConfig& cfg = {});

ExponentEstimate upper_exponent(const HamiltonianSystem& sys, const Phase4& y0,
                                double T, const IntegratorConfig& cfg = {},
                                const LyapunovOptions& opt = {});

// Oseledets directions by the most-expanded singular directions of the
// forward and backward window products, both expressed in the frame at y0.
// Throws TrivialSplittingError when the exponent sits below the threshold.
SplittingEstimate oseledets_splitting(const HamiltonianSystem& sys,
                                      const Phase4& y0, double T,
                                      const IntegratorConfig& cfg = {},
                                      const LyapunovOptions& opt = {});

// Exponent-equality check: (lambda from Dphi^T applied to the transversal
// fiber at y0 without endpoint projection, lambda from Phi^T).
std::pair<double, double> exponent_equality_check(const HamiltonianSystem& sys,
                                                  const Phase4& y0, double T,
                                                  const IntegratorConfig& cfg = {});

struct SurfaceRegion {
    double e = 0.0;        // energy level
    Box4 box;              // proposal sub-box
    std::string label;
};

// Monte Carlo finite-time upper bound for the integrated exponent over a
// surface region: weighted mean of (1/T) log||Phi^T|| over a surface sample.
// Escaped orbits are dropped and counted.
IntegratedLE integrated_le(const HamiltonianSystem& sys, const SurfaceRegion& rg,
                           double T, int n, std::uint64_t seed,
                           const IntegratorConfig& cfg = {},
                           const LyapunovOptions& opt = {}, int jobs = 1);

}  // namespace hamflow
