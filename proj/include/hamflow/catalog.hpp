#pragma once

#include <string>
#include <vector>

#include "hamflow/system.hpp"

namespace hamflow {

// Named reference systems addressable by string id:
//   "translation"                      H = y3
//   "hyperbolic-drift"                 H = y3 + (y2^2 - y4^2)/2
//   "elliptic-drift"                   H = y3 + (y2^2 + y4^2)/2
//   "quadratic(s11,s12,...,s44)"       H = y'Sy/2, S symmetric (10 upper entries,
//                                      row-major s11,s12,s13,s14,s22,...,s44)
//   "bump-rotation(alpha,r,nu)"        the perturbed model of module perturb
//   "realized(base-id, x1:x2:x3:x4, alpha, r)"  module flowbox transport
HamiltonianSystem catalog_system(const std::string& id);

// Programmatic constructors (the string forms above parse into these).
HamiltonianSystem make_translation();
HamiltonianSystem make_hyperbolic_drift();
HamiltonianSystem make_elliptic_drift();
HamiltonianSystem make_quadratic(const Mat4& S);
HamiltonianSystem make_bump_rotation(double alpha, double r, double nu);

std::vector<std::string> catalog_ids();

}  // namespace hamflow
