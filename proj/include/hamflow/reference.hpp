#pragma once

#include <string>
#include <utility>

#include "hamflow/linalg.hpp"

namespace hamflow {

// Closed-form flow and differential for catalog ids that have one
// (translation, hyperbolic-drift, elliptic-drift, quadratic(...),
// bump-rotation(...)). The differential of bump-rotation is obtained by
// central differences (step 1e-6) of the closed-form map; the others are
// analytic. Throws UnsupportedError otherwise.
std::pair<Phase4, Mat4> reference_flow(const std::string& id, const Phase4& y0,
                                       double t);

}  // namespace hamflow
