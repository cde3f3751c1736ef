#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ekw/twist_map.hpp"

namespace ekw {

inline constexpr double two_pi_v = 6.283185307179586476925286766559;

// --- test functions on angles -------------------------------------------------

enum class angle_fn { one, sin2, cos2, cos4 };

inline const char* angle_fn_tag(angle_fn f) {
    switch (f) {
        case angle_fn::one: return "one";
        case angle_fn::sin2: return "sin2";
        case angle_fn::cos2: return "cos2";
        default: return "cos4";
    }
}

inline angle_fn angle_fn_of(const std::string& tag) {
    if (tag == "one" || tag == "1") return angle_fn::one;
    if (tag == "sin2") return angle_fn::sin2;
    if (tag == "cos2") return angle_fn::cos2;
    if (tag == "cos4") return angle_fn::cos4;
    throw config_error("unknown test function: " + tag + " (use one|sin2|cos2|cos4)");
}

inline double eval_angle_fn(angle_fn f, double t) {
    switch (f) {
        case angle_fn::one: return 1.0;
        case angle_fn::sin2: {
            double s = std::sin(t);
            return s * s;
        }
        case angle_fn::cos2: {
            double c = std::cos(t);
            return c * c;
        }
        default: {
            double c = std::cos(t);
            return c * c * c * c;
        }
    }
}

// Angle of a vector against the positive x-axis, in [0, 2pi). Vectors, not
// lines mod pi: the distribution distinguishes the peaks at 0 and pi.
inline double vec_angle(const vec2<double>& v) {
    if (v.x == 0.0 && v.y == 0.0) throw numeric_error("vec_angle: zero vector");
    double a = std::atan2(v.y, v.x);
    if (a < 0.0) a += two_pi_v;
    return a;
}

// Angle of Lambda* applied to a unit vector at angle a; realizes the twist
// relation tan a' = (mu/lambda) tan a without the tan poles.
inline double prepend0_angle(double a, double lambda, double mu) {
    return vec_angle({lambda * std::cos(a), mu * std::sin(a)});
}

// --- invariant direction fields ------------------------------------------------

struct direction_field_result {
    int n = 0;
    bool stable = true;
    std::vector<double> angles;  // indexed by k(omega)
};

// s_omega = DPsi_omega(p*) s^F (resp. u_omega = DPsi_omega(p*) u^F).
inline direction_field_result direction_field(const periodic_orbit& orb,
                                              const hyperbolic_point<double>& deep, bool stable) {
    direction_field_result out;
    out.n = orb.n;
    out.stable = stable;
    const vec2<double> base = stable ? deep.v_stable : deep.v_unstable;
    out.angles.reserve(orb.chains.size());
    for (const auto& c : orb.chains) out.angles.push_back(vec_angle(c * base));
    return out;
}

inline direction_field_result direction_field(const fixed_point_record& rec, int n, bool stable) {
    auto orb = periodic_orbit_of(rec, n);
    auto hp = hyperbolic_fixed_point(make_twist_map(rec));
    return direction_field(orb, hp, stable);
}

// --- angle histogram -------------------------------------------------------

struct angle_histogram {
    int n = 0;     // orbit level the angles came from
    int bins = 0;  // uniform partition theta_i = 2 pi i / bins
    bool stable = true;
    std::vector<double> counts;  // relative frequencies, sum 1
};

inline angle_histogram make_histogram(const direction_field_result& field, int bins) {
    if (bins < 1) throw config_error("histogram: need at least one bin");
    if (field.angles.empty()) throw config_error("histogram: empty direction field");
    angle_histogram h;
    h.n = field.n;
    h.bins = bins;
    h.stable = field.stable;
    h.counts.assign(std::size_t(bins), 0.0);
    const double w = 1.0 / double(field.angles.size());
    for (double a : field.angles) {
        auto i = std::size_t(a / two_pi_v * bins);
        if (i >= std::size_t(bins)) i = std::size_t(bins) - 1;  // a == 2pi after rounding
        h.counts[i] += w;
    }
    return h;
}

// R = sum f((theta_i + theta_{i+1})/2) K_i  (midpoint rule against the counts)
inline double measure_average(const angle_histogram& h, angle_fn f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        acc += eval_angle_fn(f, two_pi_v * (double(i) + 0.5) / double(h.bins)) * h.counts[i];
    return acc;
}

inline std::string histogram_csv(const angle_histogram& h) {
    std::string out = "bin_center,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out += format_real(two_pi_v * (double(i) + 0.5) / double(h.bins)) + "," +
               format_real(h.counts[i]) + "\n";
    return out;
}

// --- Birkhoff averages of the normalized derivative cocycle --------------------

struct birkhoff_result {
    double average = 0.0;   // L = (1/M) sum f(angle(A_k v)), A_0 = id
    double lyapunov = 0.0;  // chi_M = (1/M) log |DF^M v|
    vec2<double> v_final{};
};

inline birkhoff_result birkhoff_run(const twist_map<double>& m, angle_fn f, int iters,
                                    vec2<double> v, map_point<double> x0 = {0.0, 0.0}) {
    if (iters < 1) throw config_error("birkhoff: need at least one iterate");
    double nv = norm2(v);
    if (!(nv > 0.0)) throw config_error("birkhoff: zero initial vector");
    v = (1.0 / nv) * v;

    birkhoff_result out;
    double acc = 0.0, log_acc = 0.0;
    map_point<double> x = x0;
    for (int k = 0; k < iters; ++k) {
        acc += eval_angle_fn(f, vec_angle(v));
        auto st = apply_map_jac(m, x);
        vec2<double> w = st.jac * v;
        double nw = norm2(w);
        if (!(nw > 0.0)) throw numeric_error("birkhoff: cocycle collapsed to zero");
        log_acc += std::log(nw);
        v = (1.0 / nw) * w;
        x = st.image;
    }
    out.average = acc / double(iters);
    out.lyapunov = log_acc / double(iters);
    out.v_final = v;
    return out;
}

inline double birkhoff_average(const fixed_point_record& rec, angle_fn f, int iters,
                               vec2<double> v, map_point<double> x0 = {0.0, 0.0}) {
    return birkhoff_run(make_twist_map(rec), f, iters, v, x0).average;
}

inline double lyapunov_estimate(const fixed_point_record& rec, int iters, vec2<double> v) {
    return birkhoff_run(make_twist_map(rec), angle_fn::one, iters, v).lyapunov;
}

// --- ergodic comparison ------------------------------------------------------

struct cocycle_report {
    std::string f_tag;
    int m_iters = 0;
    vec2<double> v{};
    int n = 0;     // histogram orbit level
    int bins = 0;  // histogram resolution N
    double left = 0.0;
    double right = 0.0;
    double rel_diff = 0.0;  // |2(L - R)/(L + R)|
};

inline cocycle_report assemble_report(angle_fn f, int iters, const vec2<double>& v,
                                      const angle_histogram& h, double left) {
    double right = measure_average(h, f);
    if (left + right == 0.0) throw numeric_error("ergodic compare: L + R = 0");
    cocycle_report rep;
    rep.f_tag = angle_fn_tag(f);
    rep.m_iters = iters;
    rep.v = v;
    rep.n = h.n;
    rep.bins = h.bins;
    rep.left = left;
    rep.right = right;
    rep.rel_diff = std::fabs(2.0 * (left - right) / (left + right));
    return rep;
}

inline cocycle_report ergodic_compare(const fixed_point_record& rec, angle_fn f, int iters,
                                      vec2<double> v, int n, int bins) {
    auto h = make_histogram(direction_field(rec, n, true), bins);
    double left = birkhoff_average(rec, f, iters, v);
    return assemble_report(f, iters, v, h, left);
}

// One table: rows = orbit levels, columns = bin counts, fixed (f, v).
struct ergodic_table {
    std::string f_tag;
    vec2<double> v{};
    int m_iters = 0;
    std::vector<int> levels;
    std::vector<int> bin_counts;
    std::vector<std::vector<double>> rel_diff;  // [level][bin]
};

struct cocycle_probe {
    angle_fn f;
    vec2<double> v;
};

// All tables share the expensive orbit/field builds across (f, v) pairs.
inline std::vector<ergodic_table> make_cocycle_suite(const fixed_point_record& rec, int iters,
                                                     const std::vector<int>& levels,
                                                     const std::vector<int>& bin_counts,
                                                     const std::vector<cocycle_probe>& probes) {
    if (levels.empty() || bin_counts.empty() || probes.empty())
        throw config_error("cocycle suite: empty axis");
    std::vector<std::vector<angle_histogram>> hists;  // [level][bin]
    hists.reserve(levels.size());
    for (int n : levels) {
        auto field = direction_field(rec, n, true);
        std::vector<angle_histogram> row;
        row.reserve(bin_counts.size());
        for (int b : bin_counts) row.push_back(make_histogram(field, b));
        hists.push_back(std::move(row));
    }
    auto m = make_twist_map(rec);
    std::vector<ergodic_table> tables;
    tables.reserve(probes.size());
    for (const auto& pr : probes) {
        ergodic_table t;
        t.f_tag = angle_fn_tag(pr.f);
        t.v = pr.v;
        t.m_iters = iters;
        t.levels = levels;
        t.bin_counts = bin_counts;
        double left = birkhoff_run(m, pr.f, iters, pr.v).average;
        for (std::size_t li = 0; li < levels.size(); ++li) {
            std::vector<double> row;
            row.reserve(bin_counts.size());
            for (std::size_t bi = 0; bi < bin_counts.size(); ++bi)
                row.push_back(assemble_report(pr.f, iters, pr.v, hists[li][bi], left).rel_diff);
            t.rel_diff.push_back(std::move(row));
        }
        tables.push_back(std::move(t));
    }
    return tables;
}

inline std::string ergodic_table_csv(const ergodic_table& t) {
    std::string out = "f=" + t.f_tag + " v=(" + format_real(t.v.x) + "," + format_real(t.v.y) +
                      ") M=" + std::to_string(t.m_iters) + "\nn";
    for (int b : t.bin_counts) out += ",N" + std::to_string(b);
    out += "\n";
    for (std::size_t li = 0; li < t.levels.size(); ++li) {
        out += std::to_string(t.levels[li]);
        for (double r : t.rel_diff[li]) out += "," + format_real(r);
        out += "\n";
    }
    return out;
}

} // namespace ekw
