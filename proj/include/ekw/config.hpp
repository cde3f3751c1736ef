#pragma once

// Run configuration for the command-line driver: key=value config files with
// flag overrides, deterministic report headers (no timestamps), and a JSON
// mirror for every CSV artifact.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ekw/errors.hpp"
#include "ekw/io.hpp"
#include "ekw/version.hpp"

namespace ekw {

inline const std::string lab_version = std::string("ekw-lab ") + version_string;

struct run_config {
    std::string precision = "double";  // double | dd
    int degree = 40;                   // operator truncation degree
    std::vector<int> levels;           // meaning per command: projection degrees,
                                       // renormalization depths, or orbit levels
    std::vector<double> eps_list;      // family parameters for the regularity runs
    int t_grid = 512;                  // circle samples per modulus probe
    std::vector<int> bins;             // histogram resolutions
    int iters = 20000;                 // Birkhoff iterate count
    std::string out_dir = "reports";
    std::string cache;                 // fixed-point cache path; empty = derived
    bool json = false;
};

inline std::string cache_path(const run_config& cfg) {
    if (!cfg.cache.empty()) return cfg.cache;
    return "ekw_fp" + std::to_string(cfg.degree) + "_cache.txt";
}

// --- value parsing -------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw config_error(what + ": not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw config_error(what + ": not an integer: '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const std::string& what) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw config_error(what + ": not a number: '" + s + "'");
    }
    if (pos != s.size()) throw config_error(what + ": not a number: '" + s + "'");
    return v;
}

} // namespace detail

// "3:12" expands to the inclusive range, "10,15,20" is an explicit list.
inline std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    if (detail::trim(text).empty()) return out;
    if (text.find(':') != std::string::npos) {
        auto parts = detail::split(text, ':');
        if (parts.size() != 2) throw config_error(what + ": bad range '" + text + "'");
        int lo = detail::parse_int(parts[0], what);
        int hi = detail::parse_int(parts[1], what);
        if (lo > hi) throw config_error(what + ": empty range '" + text + "'");
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    for (const auto& tok : detail::split(text, ','))
        if (!tok.empty()) out.push_back(detail::parse_int(tok, what));
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : detail::split(text, ','))
        if (!tok.empty()) out.push_back(detail::parse_double(tok, what));
    return out;
}

inline void apply_kv(run_config& cfg, const std::string& key, const std::string& value) {
    if (key == "precision") {
        cfg.precision = value;
    } else if (key == "degree") {
        cfg.degree = detail::parse_int(value, "degree");
    } else if (key == "levels") {
        cfg.levels = parse_int_list(value, "levels");
    } else if (key == "eps") {
        cfg.eps_list = parse_double_list(value, "eps");
    } else if (key == "angles") {
        cfg.t_grid = detail::parse_int(value, "angles");
    } else if (key == "bins") {
        cfg.bins = parse_int_list(value, "bins");
    } else if (key == "iters") {
        cfg.iters = detail::parse_int(value, "iters");
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "cache") {
        cfg.cache = value;
    } else if (key == "json") {
        if (value == "true" || value == "1")
            cfg.json = true;
        else if (value == "false" || value == "0")
            cfg.json = false;
        else
            throw config_error("json: expected true/false, got '" + value + "'");
    } else {
        throw config_error("config: unknown key '" + key + "'");
    }
}

// Line-based key=value file; '#' starts a comment, blank lines are skipped.
inline void load_config_file(run_config& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_kv(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

inline void validate_config(const run_config& cfg) {
    if (cfg.precision != "double" && cfg.precision != "dd")
        throw config_error("precision must be 'double' or 'dd', got '" + cfg.precision + "'");
    if (cfg.degree < 4 || cfg.degree > 80)
        throw config_error("degree out of range [4,80]: " + std::to_string(cfg.degree));
    if (cfg.t_grid < 2) throw config_error("angles: need at least 2 samples");
    if (cfg.iters < 1) throw config_error("iters: need at least 1");
    for (int n : cfg.levels)
        if (n < 1) throw config_error("levels: entries must be positive");
    for (int b : cfg.bins)
        if (b < 1) throw config_error("bins: entries must be positive");
}

// --- report plumbing -----------------------------------------------------------

// Fixed header block embedded in every artifact. Deliberately free of
// timestamps and host data so reruns are byte-identical.
inline std::vector<std::string> report_meta(const run_config& cfg, const std::string& cache_file) {
    std::vector<std::string> m;
    m.push_back(lab_version);
    m.push_back("precision=" + cfg.precision + " degree=" + std::to_string(cfg.degree));
    if (!cache_file.empty() && file_exists(cache_file))
        m.push_back("cache=" + cache_file + " fnv1a=" + file_hash(cache_file));
    m.push_back("note: dyadic word bit 1 = innermost scaling factor");
    m.push_back("note: spectra are gauge-stripped (normalization eigenvalue 1/mu removed)");
    m.push_back("note: modulus offsets use theta=0.272, exponent 2.042, euclidean point norm");
    m.push_back("note: angle histograms use uniform bins on [0,2pi)");
    return m;
}

inline nlohmann::json csv_to_json(const std::vector<std::string>& meta, const std::string& csv) {
    nlohmann::json j;
    j["meta"] = meta;
    auto lines = detail::split(csv, '\n');
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw config_error("csv_to_json: empty table");
    j["columns"] = detail::split(lines[0], ',');
    auto rows = nlohmann::json::array();
    for (size_t i = 1; i < lines.size(); ++i) rows.push_back(detail::split(lines[i], ','));
    j["rows"] = rows;
    return j;
}

// Writes <out>/<name>.csv (meta as '#' comment lines, then the table) and,
// when requested, the JSON mirror <out>/<name>.json.
inline void write_report(const run_config& cfg, const std::string& name,
                         const std::vector<std::string>& meta, const std::string& csv) {
    std::filesystem::create_directories(cfg.out_dir);
    std::string text;
    for (const auto& line : meta) text += "# " + line + "\n";
    text += csv;
    write_file(cfg.out_dir + "/" + name + ".csv", text);
    if (cfg.json) write_file(cfg.out_dir + "/" + name + ".json", csv_to_json(meta, csv).dump(2) + "\n");
}

// Plain-text summaries (fixed-point, lyapunov) share the same meta block.
inline void write_text_report(const run_config& cfg, const std::string& name,
                              const std::vector<std::string>& meta, const std::string& body) {
    std::filesystem::create_directories(cfg.out_dir);
    std::string text;
    for (const auto& line : meta) text += "# " + line + "\n";
    text += body;
    write_file(cfg.out_dir + "/" + name + ".txt", text);
}

} // namespace ekw
