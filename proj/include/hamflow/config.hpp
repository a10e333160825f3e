#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "hamflow/integrator.hpp"

namespace hamflow {

// Flat key=value run configuration with typed parsing and decimal-string
// round-trip for reals. Unknown keys are rejected.
struct RunConfig {
    std::string system = "translation";
    std::string operation;
    Phase4 y0 = Phase4::Zero();
    double T = 10.0;
    double dt = 1e-3;
    std::string method = "implicit-midpoint";  // or "gauss2"
    int m = 1;
    int m_max = 10;
    int n = 100;
    std::uint64_t seed = 1;
    double energy = 0.0;
    double alpha = 0.01;
    double r = 0.1;
    double nu = 0.5;
    double epsilon = 0.5;
    double radius = 0.05;
    double tol = 1e-6;
    double patch_radius = 1e-3;
    int jobs = 1;
    std::string output;
    std::string format = "csv";  // or "plot-data"
    bool timestamp = true;

    IntegratorConfig integrator() const;

    std::string serialize() const;                       // lossless text form
    static RunConfig parse(const std::string& text);     // rejects unknown keys
};

}  // namespace hamflow
