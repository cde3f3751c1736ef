// ekw-lab: command-line driver for the renormalization laboratory.
//
// Subcommands: fixed-point, spectrum, holder, cocycle, orbit.  Every report
// is a CSV (plus a JSON mirror behind --json) under --out, prefixed with a
// deterministic header block; reruns with the same inputs are byte-identical.
// Exit codes: 0 success, 2 configuration/usage, 3 numeric failure, 4 domain
// escape.

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ekw/cocycle.hpp"
#include "ekw/config.hpp"
#include "ekw/fixed_point.hpp"
#include "ekw/holder.hpp"
#include "ekw/spectrum.hpp"
#include "ekw/twist_map.hpp"

namespace {

using namespace ekw;

struct cli_flags {
    std::string config_file;
    std::string precision, levels, eps, bins, out, cache;
    int degree = 0, angles = 0, iters = 0;
    bool json = false;
    CLI::Option *o_precision{}, *o_degree{}, *o_levels{}, *o_eps{}, *o_angles{}, *o_bins{},
        *o_iters{}, *o_out{}, *o_cache{}, *o_json{};
};

void attach_flags(CLI::App* cmd, cli_flags& f) {
    cmd->add_option("--config", f.config_file, "key=value config file (# comments)");
    f.o_out = cmd->add_option("--out", f.out, "output directory (default: reports)");
    f.o_precision = cmd->add_option("--precision", f.precision, "double | dd");
    f.o_degree = cmd->add_option("--degree", f.degree, "operator truncation degree (default: 40)");
    f.o_levels = cmd->add_option("--levels", f.levels, "list 'a,b,c' or range 'lo:hi'");
    f.o_eps = cmd->add_option("--eps", f.eps, "comma-separated family parameters");
    f.o_angles = cmd->add_option("--angles", f.angles, "circle samples per modulus probe");
    f.o_bins = cmd->add_option("--bins", f.bins, "histogram bin counts, list");
    f.o_iters = cmd->add_option("--iters", f.iters, "Birkhoff iterate count");
    f.o_cache = cmd->add_option("--cache", f.cache, "fixed-point cache path");
    f.o_json = cmd->add_flag("--json", f.json, "also write a JSON mirror of each CSV");
}

// Config file first, explicit flags override.
run_config build_config(const cli_flags& f) {
    run_config cfg;
    if (!f.config_file.empty()) load_config_file(cfg, f.config_file);
    if (f.o_precision->count()) cfg.precision = f.precision;
    if (f.o_degree->count()) cfg.degree = f.degree;
    if (f.o_levels->count()) cfg.levels = parse_int_list(f.levels, "levels");
    if (f.o_eps->count()) cfg.eps_list = parse_double_list(f.eps, "eps");
    if (f.o_angles->count()) cfg.t_grid = f.angles;
    if (f.o_bins->count()) cfg.bins = parse_int_list(f.bins, "bins");
    if (f.o_iters->count()) cfg.iters = f.iters;
    if (f.o_out->count()) cfg.out_dir = f.out;
    if (f.o_cache->count()) cfg.cache = f.cache;
    if (f.o_json->count()) cfg.json = true;
    validate_config(cfg);
    return cfg;
}

void require_double_mode(const run_config& cfg, const char* cmd) {
    if (cfg.precision != "double")
        throw config_error(std::string(cmd) +
                           ": double-double mode applies to fixed-point and holder only");
}

// Loads the cache when present, otherwise solves and writes it.
fixed_point_record obtain_record(const run_config& cfg, bool must_exist) {
    const std::string path = cache_path(cfg);
    if (file_exists(path)) {
        auto rec = load_fixed_point(path);
        validate_record(rec);
        return rec;
    }
    if (must_exist)
        throw config_error("fixed-point cache not found: " + path + " (run 'fixed-point' first)");
    auto rec = find_fixed_point(std::nullopt, cfg.degree);
    validate_record(rec);
    save_fixed_point(path, rec);
    return rec;
}

int cmd_fixed_point(const run_config& cfg) {
    const std::string path = cache_path(cfg);
    const bool hit = file_exists(path);
    fixed_point_record rec;
    if (hit) {
        rec = load_fixed_point(path);
    } else {
        rec = find_fixed_point(std::nullopt, cfg.degree);
    }
    validate_record(rec);
    if (!hit) save_fixed_point(path, rec);

    std::string body;
    body += "degree = " + std::to_string(rec.degree) + "\n";
    body += "lambda = " + format_real(rec.lambda) + "\n";
    body += "mu = " + format_real(rec.mu) + "\n";
    body += "one_over_mu = " + format_real(1.0 / rec.mu) + "\n";
    body += "s(0,1) = " + format_real(eval(rec.s, 0.0, 1.0)) + "\n";
    body += "residual = " + format_real(rec.residual) + "\n";
    body += std::string("lambda_in_enclosure = ") + (rec.lambda_in_enclosure ? "true" : "false") +
            "\n";
    if (cfg.precision == "dd") {
        auto dd = lift_to_dd(rec);
        body += "lambda_dd = " + format_real(dd.lambda.hi) + " + " + format_real(dd.lambda.lo) +
                "\n";
        body += "mu_dd = " + format_real(dd.mu.hi) + " + " + format_real(dd.mu.lo) + "\n";
        body += "residual_dd = " + format_real(dd.residual) + "\n";
    }
    write_text_report(cfg, "fixed_point", report_meta(cfg, path), body);
    std::fputs(body.c_str(), stdout);
    std::printf("cache: %s\n", path.c_str());
    return 0;
}

int cmd_spectrum(const run_config& cfg) {
    require_double_mode(cfg, "spectrum");
    const std::string path = cache_path(cfg);
    auto rec = obtain_record(cfg, /*must_exist=*/true);
    const auto levels = cfg.levels.empty() ? std::vector<int>{10, 15, 20} : cfg.levels;
    const auto meta = report_meta(cfg, path);
    for (int n : levels) {
        auto rep = spectrum_at(rec, n);
        auto m = meta;
        m.push_back("projection N=" + std::to_string(n));
        write_report(cfg, "spectrum_N" + std::to_string(n), m, spectrum_csv(rep));
        std::printf("N=%d: %zu eigenvalues -> %s/spectrum_N%d.csv\n", n, rep.entries.size(),
                    cfg.out_dir.c_str(), n);
    }
    return 0;
}

int cmd_orbit(const run_config& cfg) {
    require_double_mode(cfg, "orbit");
    const int n = cfg.levels.empty() ? 10 : cfg.levels.front();
    auto rec = obtain_record(cfg, /*must_exist=*/false);
    auto orb = periodic_orbit_of(rec, n, std::max(16, n));
    auto m = report_meta(cfg, cache_path(cfg));
    m.push_back("orbit level n=" + std::to_string(n));
    write_report(cfg, "orbit_n" + std::to_string(n), m, orbit_csv(orb));
    std::printf("n=%d: %zu points -> %s/orbit_n%d.csv\n", n, orb.points.size(),
                cfg.out_dir.c_str(), n);
    return 0;
}

int cmd_holder(const run_config& cfg) {
    if (cfg.eps_list.empty())
        throw config_error("holder: no family parameters given; pass --eps e1,e2,...");
    auto levels = cfg.levels.empty() ? parse_int_list("3:12", "levels") : cfg.levels;
    for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] != levels[i - 1] + 1)
            throw config_error("holder: levels must form a contiguous ascending range");

    auto rec = obtain_record(cfg, /*must_exist=*/false);
    const auto meta0 = report_meta(cfg, cache_path(cfg));
    std::vector<std::pair<double, fit_params>> fits;

    for (double eps : cfg.eps_list) {
        std::vector<holder_measurement> meas;
        if (cfg.precision == "dd") {
            auto ddrec = lift_to_dd(rec);
            auto fam = make_eps_family(ddrec, eps, levels.back());
            for (int n : levels) meas.push_back(level_alpha(fam, ddrec, n, cfg.t_grid));
        } else {
            auto fam = make_eps_family(rec, eps, levels.back());
            for (int n : levels) meas.push_back(level_alpha(fam, rec, n, cfg.t_grid));
        }
        auto fit = fit_extrapolate(meas, levels.front(), levels.back());
        fits.emplace_back(eps, fit);

        char tag[48];
        std::snprintf(tag, sizeof tag, "%g", eps);
        auto m = meta0;
        m.push_back("eps=" + std::string(tag) + " levels=" + std::to_string(levels.front()) + ":" +
                    std::to_string(levels.back()) + " t_grid=" + std::to_string(cfg.t_grid));
        write_report(cfg, std::string("alpha_eps_") + tag, m, alpha_csv(eps, meas, fit));
        std::printf("eps=%s: alpha=%.9g rel_lsq=%.3g -> %s/alpha_eps_%s.csv\n", tag, fit.a_eps,
                    fit.rel_lsq_error, cfg.out_dir.c_str(), tag);
    }
    auto m = meta0;
    m.push_back("levels=" + std::to_string(levels.front()) + ":" + std::to_string(levels.back()) +
                " t_grid=" + std::to_string(cfg.t_grid));
    write_report(cfg, "fit", m, fit_csv(fits));
    return 0;
}

int cmd_cocycle(const run_config& cfg) {
    require_double_mode(cfg, "cocycle");
    auto rec = obtain_record(cfg, /*must_exist=*/false);
    const auto levels = cfg.levels.empty() ? std::vector<int>{12, 14, 16} : cfg.levels;
    const auto bins = cfg.bins.empty() ? std::vector<int>{1000, 5000, 15000} : cfg.bins;
    const auto meta = report_meta(cfg, cache_path(cfg));
    const int max_level = *std::max_element(levels.begin(), levels.end());

    for (int n : levels) {
        auto field = direction_field(rec, n, /*stable=*/true);
        auto h = make_histogram(field, bins.front());
        auto m = meta;
        m.push_back("orbit level n=" + std::to_string(n) + " bins=" +
                    std::to_string(bins.front()) + " field=stable");
        write_report(cfg, "histogram_n" + std::to_string(n), m, histogram_csv(h));
    }

    const std::vector<cocycle_probe> probes = {{angle_fn::sin2, {1.0, 0.0}},
                                               {angle_fn::cos4, {1.0, 0.0}},
                                               {angle_fn::sin2, {0.0, 1.0}},
                                               {angle_fn::cos4, {0.0, 1.0}}};
    auto tables = make_cocycle_suite(rec, cfg.iters, levels, bins, probes);
    for (const auto& t : tables) {
        auto csv = ergodic_table_csv(t);
        auto nl = csv.find('\n');
        auto m = meta;
        m.push_back(csv.substr(0, nl));
        const std::string vtag = (t.v.x != 0.0) ? "v10" : "v01";
        const std::string name = "cocycle_" + t.f_tag + "_" + vtag;
        write_report(cfg, name, m, csv.substr(nl + 1));
        std::printf("f=%s v=%s -> %s/%s.csv\n", t.f_tag.c_str(), vtag.c_str(),
                    cfg.out_dir.c_str(), name.c_str());
    }

    const double chi10 = lyapunov_estimate(rec, cfg.iters, {1.0, 0.0});
    const double chi01 = lyapunov_estimate(rec, cfg.iters, {0.0, 1.0});
    std::string body;
    body += "lyapunov M=" + std::to_string(cfg.iters) + " v=(1,0): " + format_real(chi10) + "\n";
    body += "lyapunov M=" + std::to_string(cfg.iters) + " v=(0,1): " + format_real(chi01) + "\n";
    auto m = meta;
    m.push_back("max orbit level n=" + std::to_string(max_level));
    write_text_report(cfg, "lyapunov", m, body);
    std::fputs(body.c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the period-doubling renormalization of "
                 "area-preserving twist maps"};
    app.set_version_flag("--version", ekw::lab_version);
    app.require_subcommand(1);

    struct sub {
        CLI::App* cmd = nullptr;
        cli_flags f;
    };
    std::array<sub, 5> subs;
    const char* names[5] = {"fixed-point", "spectrum", "holder", "cocycle", "orbit"};
    const char* briefs[5] = {"solve the operator fixed point and write the cache",
                             "gauge-stripped spectra of the linearized operator",
                             "regularity exponents of the conjugacy along a family",
                             "direction-field histograms and ergodic averages",
                             "periodic orbit of the renormalization presentation"};
    for (int i = 0; i < 5; ++i) {
        subs[size_t(i)].cmd = app.add_subcommand(names[i], briefs[i]);
        attach_flags(subs[size_t(i)].cmd, subs[size_t(i)].f);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : ekw::config_error::exit_code;
    }

    try {
        for (auto& s : subs) {
            if (!s.cmd->parsed()) continue;
            auto cfg = build_config(s.f);
            const std::string name = s.cmd->get_name();
            if (name == "fixed-point") return cmd_fixed_point(cfg);
            if (name == "spectrum") return cmd_spectrum(cfg);
            if (name == "holder") return cmd_holder(cfg);
            if (name == "cocycle") return cmd_cocycle(cfg);
            if (name == "orbit") return cmd_orbit(cfg);
        }
        return ekw::config_error::exit_code;
    } catch (const ekw::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return ekw::config_error::exit_code;
    } catch (const ekw::domain_escape& e) {
        std::fprintf(stderr, "domain escape: %s\n", e.what());
        return ekw::domain_escape::exit_code;
    } catch (const ekw::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return ekw::numeric_error::exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
