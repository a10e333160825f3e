#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hamflow/frames.hpp"
#include "hamflow/integrator.hpp"
#include "hamflow/perturb.hpp"

namespace hamflow {

struct ChartCertificate {
    double sympl_residual = 0.0;  // max || Dg' J Dg - J ||, Dg by central FD
    double conj_residual = 0.0;   // max | (g3 + e) - H |
    double field_residual = 0.0;  // max || Dg X_H - e1 ||
    int n_samples = 0;
};

// Symplectic flowbox chart at a regular point: g straightens the flow so the
// model Hamiltonian H0(z) = z3 satisfies H0 o g = H - e, g(center) = 0 and
// g_* X_H = d/dz1. Built from a linear transversal G, a Newton-solved hitting
// time tau, a line flow along X_G for the energy coordinate, and an
// area-corrected graph parameterization of the 2-dim surface Sigma_e.
class FlowboxChart {
public:
    Phase4 center() const { return center_; }
    double radius() const { return radius_; }
    double energy() const { return e_; }

    double G(const Phase4& y) const;       // transversal functional, G(center)=0
    double tau(const Phase4& m) const;     // hitting time onto Sigma = G^{-1}(0)
    Phase4 map(const Phase4& m) const;     // g
    Phase4 inverse(const Phase4& z) const; // g^{-1}
    Mat4 differential(const Phase4& m, double fd_step = 1e-4) const;
    Mat4 inverse_differential(const Phase4& z, double fd_step = 1e-4) const;

    const ChartCertificate& residuals() const { return cert_; }

    // max |tau| the hitting-time solver will bracket (chart tube length)
    double tau_span() const { return tau_span_; }

    friend FlowboxChart build_chart(const HamiltonianSystem& sys,
                                    const Phase4& center, double radius,
                                    const IntegratorConfig& cfg, double tau_span,
                                    int cert_samples, std::uint64_t seed);
    friend ChartCertificate chart_differential_checks(const FlowboxChart& chart,
                                                      int n, std::uint64_t seed);

private:
    HamiltonianSystem sys_;
    IntegratorConfig cfg_;
    Phase4 center_ = Phase4::Zero();
    double radius_ = 0.0;
    double e_ = 0.0;
    double tau_span_ = 0.3;
    Vec4 xc_ = Vec4::Zero();   // X_H(center)
    Vec4 vg_ = Vec4::Zero();   // X_G (constant)
    TransversalFrame frame_;   // (u1,u2) spans T_center Sigma_e
    ChartCertificate cert_;

    Phase4 flow(const Phase4& y, double t) const;
    Phase4 energy_line_to(const Phase4& y, double target_e) const;
    Phase4 sigma_point(double a, double b) const;     // graph chart of Sigma_e
    double area_density(double a, double b) const;    // omega_e in (a,b)
    double area_coordinate(double a, double b) const; // P(a,b) = int_0^a W(s,b) ds
    double invert_area_coordinate(double p, double b) const;
};

// Build a chart with residuals certified on >= cert_samples ball samples.
// Auto-shrinks the radius (halving, <= 6 times) when the hitting-time Newton
// fails; throws TransversalityError at critical centers, ChartError when no
// radius works.
FlowboxChart build_chart(const HamiltonianSystem& sys, const Phase4& center,
                         double radius, const IntegratorConfig& cfg = {},
                         double tau_span = 0.3, int cert_samples = 1000,
                         std::uint64_t seed = 1);

// Recompute the residuals on n fresh samples.
ChartCertificate chart_differential_checks(const FlowboxChart& chart, int n,
                                           std::uint64_t seed);

struct RealizationCertificate {
    PerturbationCertificate model;   // raw certificate of the transported bump
    double c2_distance = 0.0;        // grid estimate of ||H~ - H||_C2
    double rotation_error = 0.0;     // sup over the good set K
    double rotation_error_direct = 0.0;  // direct-integration cross-check
    double kappa_measured = 0.0;     // fraction of disk samples with error > gamma
    double gamma = 0.0;
    double disk_radius = 0.0;        // sampled ball radius in the normal section
    double chart_sympl_residual = 0.0;
    int n_disk = 0;
};

struct RealizeOptions {
    double kappa = 0.1;         // measure-deficit budget
    double gamma = 1e-3;        // rotation-error threshold defining the good set
    double nu_override = 0.0;   // > 0: fix the bump nu instead of the
                                // kappa-coupled value from the length-1 proof
    int disk_samples = 200;
    int direct_checks = 3;      // expensive direct integrations of H~
    int c2_grid = 2000;
    std::uint64_t seed = 7;
    IntegratorConfig cfg{1e-3, Method::Gauss2, 1e-13, 30, 0.0, false};
    double chart_dt = 1e-2;     // step for the chart-internal short flows
};

// C0/C1/C2 suprema of a scalar field by central differences over given
// points; shared by the raw and the transported certificates so the two are
// comparable estimator-for-estimator.
struct C012 {
    double c0 = 0, c1 = 0, c2 = 0;
};
C012 measure_c012_fd(const std::function<double(const Phase4&)>& f,
                     const std::vector<Phase4>& pts, double h);
std::vector<Phase4> model_tube_points(const BumpProfile& p, int n,
                                      std::uint64_t seed);

struct RealizedHamiltonian {
    HamiltonianSystem system;            // H~ (FD-backed derivatives)
    std::shared_ptr<FlowboxChart> chart;
    BumpProfile profile;
    RealizationCertificate certificate;
};

// Transport of the local rotation perturbation to the point x of sys: returns
// H~ = H outside the chart preimage of the bump tube and
// H~ = (H0 - alpha ell ell~ phi) o g inside, with the measured certificate.
// Checks non-periodicity and flowbox self-intersection first.
RealizedHamiltonian realize_rotation(const HamiltonianSystem& sys,
                                     const Phase4& x, double alpha, double r,
                                     double epsilon,
                                     const RealizeOptions& opt = {});

// Bookkeeping for concatenations of unit-length realizations.
struct RealizationSegment {
    double start_time = 0.0;
    double alpha = 0.0;
    double r = 0.0;
    double nu = 0.0;
    double kappa = 0.0;
};

struct RealizationSchedule {
    Phase4 base = Phase4::Zero();
    double length_T = 0.0;
    std::vector<RealizationSegment> segments;
    double kappa_budget = 1.0;
    double epsilon = 0.0;

    double kappa_total() const;
};

// Concatenation of realizations: requires s2.base = phi^{T1}(s1.base) and
// kappa1 + kappa2 < 1. Throws ScheduleError.
RealizationSchedule concatenate(const HamiltonianSystem& sys,
                                const RealizationSchedule& s1,
                                const RealizationSchedule& s2,
                                const IntegratorConfig& cfg = {},
                                double base_tol = 1e-6);

// Diagnostic for the time evolution of the transversal (section) measure:
// returns (det of the section-to-section return differential, alpha(t) =
// ||X_H(phi^t x)|| / ||X_H(x)||). Volume invariance makes det ~ 1/alpha(t).
std::pair<double, double> transversal_measure_ratio(const HamiltonianSystem& sys,
                                                    const Phase4& x, double t,
                                                    const IntegratorConfig& cfg = {},
                                                    double fd_step = 1e-6);

}  // namespace hamflow
