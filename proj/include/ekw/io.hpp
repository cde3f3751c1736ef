#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "ekw/errors.hpp"
#include "ekw/series.hpp"

namespace ekw {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Text form: header "degree=<N> rho=<rho>", then "i j c_ij" for each nonzero
// coefficient, i ascending then j ascending, 17 significant digits.
inline std::string serialize_series(const series2<double>& s) {
    std::ostringstream out;
    out << "degree=" << s.degree() << " rho=" << format_real(s.rho()) << "\n";
    for (int i = 0; i <= s.degree(); ++i)
        for (int j = 0; i + j <= s.degree(); ++j)
            if (s.at(i, j) != 0.0)
                out << i << " " << j << " " << format_real(s.at(i, j)) << "\n";
    return out.str();
}

// Reads the header and coefficient lines; stops (without consuming) at the
// first line that is not "i j value", so footers can follow.
inline series2<double> parse_series(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw config_error("series parse: empty input");
    int deg = -1;
    double rho = 0.0;
    if (std::sscanf(line.c_str(), "degree=%d rho=%lf", &deg, &rho) != 2)
        throw config_error("series parse: bad header: " + line);
    if (deg < 0 || rho <= 0.0) throw config_error("series parse: invalid header values");
    series2<double> s(deg, rho);
    while (in) {
        auto pos = in.tellg();
        if (!std::getline(in, line)) break;
        if (line.empty()) continue;
        int i = 0, j = 0;
        double c = 0.0;
        if (std::sscanf(line.c_str(), "%d %d %lf", &i, &j, &c) != 3) {
            in.clear();
            in.seekg(pos);
            break;
        }
        if (i < 0 || j < 0 || i + j > deg) throw config_error("series parse: index outside triangle");
        s.at(i, j) = c;
    }
    return s;
}

inline series2<double> parse_series(const std::string& text) {
    std::istringstream in(text);
    return parse_series(in);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open for write: " + path);
    f << content;
    if (!f) throw config_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void save_series(const std::string& path, const series2<double>& s) {
    write_file(path, serialize_series(s));
}

inline series2<double> load_series(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open: " + path);
    return parse_series(f);
}

inline std::uint64_t fnv1a64(std::string_view sv) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : sv) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::string_view sv) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(sv)));
    return buf;
}

inline std::string file_hash(const std::string& path) { return hash_hex(read_file(path)); }

inline bool file_exists(const std::string& path) {
    std::ifstream f(path);
    return static_cast<bool>(f);
}

} // namespace ekw
