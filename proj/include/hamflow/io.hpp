#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hamflow/integrator.hpp"

namespace hamflow {

// Shortest decimal string that round-trips a double bit-exactly.
std::string format_double(double v);

// Orbit dump CSV: t, y1..y4, H, F11..F44 (row-major), sympl_residual.
void write_orbit_csv(std::ostream& os, const OrbitSegment& seg,
                     const HamiltonianSystem& sys);

// Cocycle dump CSV: t, base point, frame vectors, Phi entries, det residual.
struct TransversalCocycle;  // poincare.hpp
void write_cocycle_csv(std::ostream& os,
                       const std::vector<TransversalCocycle>& cocycles);

// Binary checkpoint, magic "HFLX1", little-endian 64-bit floats.
void write_checkpoint(std::ostream& os, const OrbitSegment& seg);
OrbitSegment read_checkpoint(std::istream& is);

// Structured text block: "key = value" lines, keys emitted in given order.
struct KeyValueBlock {
    std::vector<std::pair<std::string, std::string>> entries;
    void add(const std::string& k, const std::string& v);
    void add(const std::string& k, const char* v);
    void add(const std::string& k, double v);
    void add(const std::string& k, int v);
    void add(const std::string& k, bool v);
    void write(std::ostream& os) const;
};
KeyValueBlock parse_key_value(std::istream& is);

}  // namespace hamflow
