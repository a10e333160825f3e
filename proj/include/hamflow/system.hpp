#pragma once

#include <functional>
#include <string>
#include <utility>

#include "hamflow/errors.hpp"
#include "hamflow/linalg.hpp"

namespace hamflow {

// A Hamiltonian given as energy + analytic gradient + Hessian callables on a
// working box. The vector field is X_H = J * grad (iota_{X_H} omega0 = dH).
struct HamiltonianSystem {
    std::string id;  // catalog id, "" for ad hoc systems
    std::function<double(const Phase4&)> H;
    std::function<Vec4(const Phase4&)> grad;
    std::function<Mat4(const Phase4&)> hess;
    Box4 domain;
    double crit_threshold = 1e-8;  // regularity cutoff on ||grad||

    double energy(const Phase4& y) const { return H(y); }

    Vec4 gradient(const Phase4& y) const {
        Vec4 g = grad(y);
        if (!finite(g)) throw EvaluationError("non-finite gradient of " + id);
        return g;
    }

    Mat4 hessian(const Phase4& y) const {
        Mat4 h = hess(y);
        if (!finite(h)) throw EvaluationError("non-finite Hessian of " + id);
        return h;
    }

    // X_H(y) = J grad H(y); tangent to the energy level by construction.
    Vec4 field(const Phase4& y) const { return symplectic_J() * gradient(y); }

    // DX_H(y) = J Hess H(y); trace-free (Hamiltonian fields are divergence-free).
    Mat4 linearized(const Phase4& y) const { return symplectic_J() * hessian(y); }

    bool regular(const Phase4& y) const {
        return gradient(y).norm() >= crit_threshold;
    }

    void require_regular(const Phase4& y) const {
        double gn = gradient(y).norm();
        if (gn < crit_threshold)
            throw RegularityError("near-critical point of " + id +
                                      ": ||grad|| = " + std::to_string(gn),
                                  gn);
    }
};

// Build the gradient/Hessian by central finite differences of H (fallback for
// user-supplied energies; step 1e-5 * (1 + ||y||)).
HamiltonianSystem finite_difference_system(std::string id,
                                           std::function<double(const Phase4&)> H,
                                           Box4 domain,
                                           double crit_threshold = 1e-8);

}  // namespace hamflow
