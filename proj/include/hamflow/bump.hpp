#pragma once

#include "hamflow/errors.hpp"

namespace hamflow {

// C-infinity step: 0 for x<=0, 1 for x>=1, sigma(x)/(sigma(x)+sigma(1-x))
// with sigma(x) = exp(-1/x). Exactly flat (all derivatives zero) at both ends.
double smoothstep(double x);
double smoothstep_d1(double x);
double smoothstep_d2(double x);

// The bump triple of the local rotation perturbation:
//   ell:      plateau ell0 on [xi, xi'], support (0, rho_bar), integral 1
//   ell_tilde: 1 on |s| <= r*nu, support (-r, r)
//   phi:      rho^2/2 on [0, r*nu], support [0, r)
// together with grid-measured sup norms and the family constant c_u that
// certifies the stated (r, nu)-scaling bounds.
struct BumpProfile {
    double xi = 0.2, xi_prime = 0.6, rho_bar = 0.9;  // universal constants
    double r = 0.1;
    double nu = 0.5;
    double alpha = 0.0;
    double ell0 = 0.0;  // plateau height fixed by the integral normalization

    double ell(double y1) const;
    double ell_d1(double y1) const;
    double ell_d2(double y1) const;
    double ell_tilde(double s) const;
    double ell_tilde_d1(double s) const;
    double ell_tilde_d2(double s) const;
    double phi(double rho) const;
    double phi_d1(double rho) const;
    double phi_d2(double rho) const;

    // grid-measured sup norms (10^4 points per function)
    double ell_sup = 0, ell_d1_sup = 0, ell_d2_sup = 0;
    double ell_tilde_d1_sup = 0, ell_tilde_d2_sup = 0;
    double phi_sup = 0, phi_d1_sup = 0, phi_d2_sup = 0;
    double quadrature_residual = 0;  // | int_0^1 ell - 1 |

    // measured universal constant: max over the stated bounds of
    // (measured sup) / (stated bound)
    double c_u = 0;

    double inner_radius() const { return r * nu; }
};

// Build and certify a profile. Throws ParameterError when the parameter
// ordering constraints fail or the normalization quadrature does not settle.
BumpProfile build_bumps(double r, double nu, double alpha,
                        double xi = 0.2, double xi_prime = 0.6,
                        double rho_bar = 0.9);

// int_0^t ell(y1 + s) ds by adaptive quadrature split at the ell breakpoints.
double ell_integral(const BumpProfile& p, double y1, double t,
                    double tol = 1e-12);

}  // namespace hamflow
