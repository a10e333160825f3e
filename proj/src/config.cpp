#include "hamflow/config.hpp"

#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/io.hpp"

namespace hamflow {

IntegratorConfig RunConfig::integrator() const {
    IntegratorConfig cfg;
    cfg.dt = dt;
    if (method == "implicit-midpoint")
        cfg.method = Method::ImplicitMidpoint;
    else if (method == "gauss2")
        cfg.method = Method::Gauss2;
    else
        throw ConfigError("unknown method: " + method);
    return cfg;
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    KeyValueBlock b;
    b.add("system", system);
    b.add("operation", operation);
    {
        std::string s;
        for (int i = 0; i < 4; ++i)
            s += (i ? "," : "") + format_double(y0(i));
        b.add("y0", s);
    }
    b.add("T", T);
    b.add("dt", dt);
    b.add("method", method);
    b.add("m", m);
    b.add("m_max", m_max);
    b.add("n", n);
    b.add("seed", std::to_string(seed));
    b.add("energy", energy);
    b.add("alpha", alpha);
    b.add("r", r);
    b.add("nu", nu);
    b.add("epsilon", epsilon);
    b.add("radius", radius);
    b.add("tol", tol);
    b.add("patch_radius", patch_radius);
    b.add("jobs", jobs);
    b.add("output", output);
    b.add("format", format);
    b.add("timestamp", timestamp);
    b.write(os);
    return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
    std::istringstream is(text);
    KeyValueBlock b = parse_key_value(is);
    RunConfig c;
    for (const auto& [k, v] : b.entries) {
        if (k == "system")
            c.system = v;
        else if (k == "operation")
            c.operation = v;
        else if (k == "y0") {
            std::stringstream ss(v);
            std::string tok;
            int i = 0;
            while (std::getline(ss, tok, ',') && i < 4) c.y0(i++) = std::stod(tok);
            if (i != 4) throw ConfigError("y0 needs 4 comma-separated reals");
        } else if (k == "T")
            c.T = std::stod(v);
        else if (k == "dt")
            c.dt = std::stod(v);
        else if (k == "method")
            c.method = v;
        else if (k == "m")
            c.m = std::stoi(v);
        else if (k == "m_max")
            c.m_max = std::stoi(v);
        else if (k == "n")
            c.n = std::stoi(v);
        else if (k == "seed")
            c.seed = std::stoull(v);
        else if (k == "energy")
            c.energy = std::stod(v);
        else if (k == "alpha")
            c.alpha = std::stod(v);
        else if (k == "r")
            c.r = std::stod(v);
        else if (k == "nu")
            c.nu = std::stod(v);
        else if (k == "epsilon")
            c.epsilon = std::stod(v);
        else if (k == "radius")
            c.radius = std::stod(v);
        else if (k == "tol")
            c.tol = std::stod(v);
        else if (k == "patch_radius")
            c.patch_radius = std::stod(v);
        else if (k == "jobs")
            c.jobs = std::stoi(v);
        else if (k == "output")
            c.output = v;
        else if (k == "format")
            c.format = v;
        else if (k == "timestamp")
            c.timestamp = (v == "1" || v == "true");
        else
            throw ConfigError("unknown config key: " + k);
    }
    if (c.format != "csv" && c.format != "plot-data")
        throw ConfigError("format must be csv or plot-data");
    return c;
}

}  // namespace hamflow
