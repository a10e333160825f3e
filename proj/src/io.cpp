#include "hamflow/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>

#include "hamflow/errors.hpp"
#include "hamflow/poincare.hpp"

namespace hamflow {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v || (v != v && back != back)) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_orbit_csv(std::ostream& os, const OrbitSegment& seg,
                     const HamiltonianSystem& sys) {
    os << "t,y1,y2,y3,y4,H";
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) os << ",F" << i << j;
    os << ",sympl_residual\n";
    for (std::size_t k = 0; k < seg.states.size(); ++k) {
        const TangentState& s = seg.states[k];
        os << format_double(s.t);
        for (int i = 0; i < 4; ++i) os << "," << format_double(s.y(i));
        os << "," << format_double(sys.H(s.y));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) os << "," << format_double(s.F(i, j));
        os << "," << format_double(symplectic_residual(s.F)) << "\n";
    }
}

void write_cocycle_csv(std::ostream& os,
                       const std::vector<TransversalCocycle>& cocycles) {
    os << "t,y1,y2,y3,y4";
    for (const char* u : {"u1", "u2"})
        for (int i = 1; i <= 4; ++i) os << "," << u << "_" << i;
    os << ",Phi11,Phi12,Phi21,Phi22,det_residual\n";
    for (const TransversalCocycle& c : cocycles) {
        os << format_double(c.t);
        for (int i = 0; i < 4; ++i) os << "," << format_double(c.src.base(i));
        for (int i = 0; i < 4; ++i) os << "," << format_double(c.src.u1(i));
        for (int i = 0; i < 4; ++i) os << "," << format_double(c.src.u2(i));
        os << "," << format_double(c.Phi(0, 0)) << ","
           << format_double(c.Phi(0, 1)) << "," << format_double(c.Phi(1, 0))
           << "," << format_double(c.Phi(1, 1)) << ","
           << format_double(c.area_ratio_residual()) << "\n";
    }
}

namespace {
void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xff;  // little-endian
    os.write(reinterpret_cast<char*>(b), 8);
}
double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}
}  // namespace

void write_checkpoint(std::ostream& os, const OrbitSegment& seg) {
    os.write("HFLX1", 5);
    std::uint64_t n = seg.states.size();
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (n >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<char*>(b), 8);
    for (const TangentState& s : seg.states) {
        put_f64(os, s.t);
        for (int i = 0; i < 4; ++i) put_f64(os, s.y(i));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) put_f64(os, s.F(i, j));
    }
}

OrbitSegment read_checkpoint(std::istream& is) {
    char magic[5];
    is.read(magic, 5);
    if (!is || std::strncmp(magic, "HFLX1", 5) != 0)
        throw ConfigError("checkpoint: bad magic, expected HFLX1");
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= std::uint64_t(b[i]) << (8 * i);
    OrbitSegment seg;
    for (std::uint64_t k = 0; k < n; ++k) {
        TangentState s;
        s.t = get_f64(is);
        for (int i = 0; i < 4; ++i) s.y(i) = get_f64(is);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s.F(i, j) = get_f64(is);
        if (!is) throw ConfigError("checkpoint: truncated stream");
        seg.times.push_back(s.t);
        seg.states.push_back(s);
    }
    return seg;
}

void KeyValueBlock::add(const std::string& k, const std::string& v) {
    entries.emplace_back(k, v);
}
void KeyValueBlock::add(const std::string& k, const char* v) {
    entries.emplace_back(k, std::string(v));
}
void KeyValueBlock::add(const std::string& k, double v) {
    entries.emplace_back(k, format_double(v));
}
void KeyValueBlock::add(const std::string& k, int v) {
    entries.emplace_back(k, std::to_string(v));
}
void KeyValueBlock::add(const std::string& k, bool v) {
    entries.emplace_back(k, v ? "1" : "0");
}

void KeyValueBlock::write(std::ostream& os) const {
    for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
}

KeyValueBlock parse_key_value(std::istream& is) {
    KeyValueBlock block;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("key=value line without '=': " + line);
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        block.entries.emplace_back(trim(line.substr(0, eq)),
                                   trim(line.substr(eq + 1)));
    }
    return block;
}

}  // namespace hamflow
