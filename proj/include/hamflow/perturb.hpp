#pragma once

#include <cstdint>
#include <vector>

#include "hamflow/bump.hpp"
#include "hamflow/integrator.hpp"
#include "hamflow/system.hpp"

namespace hamflow {

// V_{a,b,c} = { a < y1 < b, sqrt(y2^2+y4^2) < c, |y3| < c }.
struct Tube {
    double a, b, c;
    Tube(double a_, double b_, double c_);
    bool contains(const Phase4& y) const;
};

// Grid certificates for H = H0 - alpha * ell(y1) ell~(y3) phi(rho), H0 = y3.
struct PerturbationCertificate {
    double c0 = 0, c1 = 0, c2 = 0;   // grid sup of |d^sigma (H - H0)|, |sigma| <= 2
    double c2_margin = 0;            // Lipschitz safety margin added into c2
    bool support_ok = false;         // H = H0 at all samples outside V_{0,rho_bar,r}
    bool boundary_dx_ok = false;     // DX_H = 0 on the slices y1 in {0, rho_bar}
    double boundary_dx_sup = 0;
    double support_sup = 0;
    double rotation_error = 0;       // sup || (pi0 Dphi^1)|_{(e2,e4)} - R_alpha ||
    double flow_state_error = 0;     // integrator vs closed form, state
    double flow_diff_error = 0;      // integrator vs closed form, differential
    double alpha0_used = 0;
    double cu_c1 = 0, cu_c2 = 0;     // measured constants of the scaling bounds
    double c_u_family = 0;           // from the profile construction
    int grid_points = 0;
};

// The rotation-perturbed Hamiltonian as a catalog-grade system
// (analytic gradient/Hessian via the full product rule; exact zero outside
// the support tube).
HamiltonianSystem build_perturbed_hamiltonian(const BumpProfile& profile);

// Closed-form flow on the inner tube V_{0,1,r nu}:
//   (y1+t, rho cos(th + alpha I(t)), y3 + alpha phi(rho)[ell(y1+t)-ell(y1)],
//    rho sin(th + alpha I(t))),  I(t) = int_0^t ell(y1+s) ds.
// Throws ValidityError when the orbit leaves the validity region.
Phase4 closed_form_flow(const BumpProfile& profile, const Phase4& y0, double t);

// alpha0 = min( eps (1-nu)^2 / c_u , 2 / (||ell|| r nu) ).
double perturbation_alpha0(const BumpProfile& profile, double epsilon);

struct CertifyOptions {
    int grid_n1 = 64;       // y1 resolution
    int grid_n3 = 16;       // y3 resolution (shell passes use 3x this)
    int grid_nrho = 18;     // radial resolution (shell passes use 4x this)
    int grid_nang = 3;      // 3 means the exact extreme angles {0, pi/4, pi/2}
    int support_samples = 10000;
    int boundary_samples = 1000;
    int rotation_samples = 64;
    int flow_checks = 100;
    double cu_max = 8.0;    // acceptance threshold for measured constants
    std::uint64_t seed = 20071217;
    IntegratorConfig flow_cfg{1e-3, Method::Gauss2, 1e-13, 30, 0.0, false};
};

// Full perturbation certificate: C0/C1/C2 grid suprema with Lipschitz margin,
// support and boundary flatness checks, the time-1 rotation property
// (integrate_tangent cross-checked against the closed-form flow), and the
// scaling-bound assertions. Throws CertificateError naming the violated
// bound; epsilon <= 0 skips the ||H-H0||_C2 < epsilon assertion.
PerturbationCertificate certify(const BumpProfile& profile, double epsilon,
                                const CertifyOptions& opt = {});

// C3 grid norms (third-order central differences of H - H0) for a decreasing
// list of radii at fixed nu, alpha. The caller asserts the ~alpha/r growth.
std::vector<std::pair<double, double>> c3_blowup_probe(
    const std::vector<double>& r_list, double nu, double alpha);

// Per-grid-point worst derivatives of H - H0 (certificate CSV payload).
struct GridPointWorst {
    Phase4 y;
    double d0, d1, d2;  // |H-H0|, max |grad|, max |Hessian entry|
};
std::vector<GridPointWorst> perturbation_grid_rows(const BumpProfile& profile,
                                                   int n1 = 16, int n3 = 8,
                                                   int nrho = 8, int nang = 3);

}  // namespace hamflow
