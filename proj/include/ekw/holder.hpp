#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ekw/spectrum.hpp"
#include "ekw/twist_map.hpp"

namespace ekw {

// One-parameter family around the fixed point, one generating function per
// renormalization depth: level k carries s_hat(eps * lambda*^k) with its own
// scaling pair, matching the level rule of the presentation chains.
template <class R>
struct eps_family_t {
    double eps = 0.0;
    double lambda_star = 0.0;
    std::vector<twist_map<R>> levels;
};

using eps_family = eps_family_t<double>;

template <class R>
inline eps_family_t<R> make_eps_family_at(const series2<R>& s_star, double lambda_star, double eps,
                                          int n_levels, renorm_options opt, int trunc_degree) {
    if (!(std::fabs(eps) <= 1e-3)) throw config_error("eps family: |eps| exceeds the gate 1e-3");
    if (n_levels < 1) throw config_error("eps family: need at least one level");
    opt.gates = false;  // family members are normalized only to O(eps^2)
    opt.check_mu_routes = false;
    series2<R> base = (trunc_degree > 0 && trunc_degree < s_star.degree())
                          ? s_star.with_degree(trunc_degree)
                          : s_star;
    eps_family_t<R> fam;
    fam.eps = eps;
    fam.lambda_star = lambda_star;
    fam.levels.reserve(std::size_t(n_levels));
    double ek = eps;
    for (int k = 0; k < n_levels; ++k) {
        auto sk = s_hat(base, ek);
        auto rr = renormalize(sk, opt);
        fam.levels.push_back(make_twist_map(sk, rr.lambda, rr.mu));
        ek *= lambda_star;
    }
    return fam;
}

// Dynamics tolerances sit far above the dropped series tail (0.26^29), so the
// default truncation only buys evaluation speed.
inline eps_family make_eps_family(const fixed_point_record& rec, double eps, int n_levels,
                                  int trunc_degree = 28) {
    return make_eps_family_at(rec.s, rec.lambda, eps, n_levels, renorm_options{}, trunc_degree);
}

inline eps_family_t<dd_real> make_eps_family(const fixed_point_dd& rec, double eps, int n_levels) {
    renorm_options opt;
    opt.tol_mid = 1e-26;
    opt.max_mid_iters = 60;
    opt.root_tol = 1e-28;
    return make_eps_family_at(rec.s, to_double(rec.lambda), eps, n_levels, opt, -1);
}

template <class R>
inline std::vector<twist_map<R>> star_family(const twist_map<R>& star, int n) {
    return std::vector<twist_map<R>>(std::size_t(std::max(n, 1)), star);
}

// (Psi_omega)^{-1} stepwise: the top factor is undone first; Lambda^{-1} is
// exact, F^{-1} = T o F o T.
template <class R>
inline map_point<R> invert_presentation(const std::vector<twist_map<R>>& family,
                                        const dyadic_word& w, map_point<R> p) {
    if (int(family.size()) < w.level())
        throw config_error("invert_presentation: family has fewer levels than the word");
    for (int i = 0; i < w.level(); ++i) {
        const auto& m = family[std::size_t(i)];
        if (w.bits[std::size_t(i)]) p = apply_inverse(m, p);
        p = {p.x / m.lambda, p.u / m.mu};
    }
    return p;
}

struct dh_options {
    bool frobenius = false;    // default matrix norm: spectral (operator 2-norm)
    double theta = 0.272;      // delta(omega) = theta^{exponent * n} * |p_omega|
    double exponent = 2.042;
    double delta_scale = 1.0;  // extra factor on delta (scale-covariance studies)
    int max_level = 12;        // double-precision cap; the dd path unlocks 15
};

template <class R>
inline double mat_norm(const mat2<R>& m, bool frobenius) {
    return to_double(frobenius ? frobenius_norm(m) : spectral_norm(m));
}

// Dh^eps_omega(p) = DPsi^eps_omega(q) * [DPsi*_omega(q)]^{-1} at q = (Psi*_omega)^{-1}(p).
template <class R>
inline mat2<R> dh_derivative_at(const eps_family_t<R>& fam, const twist_map<R>& star,
                                const dyadic_word& w, const map_point<R>& p) {
    if (int(fam.levels.size()) < w.level())
        throw config_error("dh derivative: eps family has fewer levels than the word");
    auto sf = star_family(star, w.level());
    auto q = invert_presentation(sf, w, p);
    auto cs = presentation(sf, w, q);
    auto ce = presentation(fam.levels, w, q);
    return ce.dpsi * inverse(cs.dpsi);
}

inline mat2<double> dh_derivative(const eps_family& fam, const fixed_point_record& rec,
                                  const dyadic_word& w, const map_point<double>& p) {
    return dh_derivative_at(fam, make_twist_map(rec), w, p);
}

// the conjugacy itself: h^eps_omega(p) = Psi^eps_omega((Psi*_omega)^{-1}(p))
template <class R>
inline map_point<R> h_conjugacy_at(const eps_family_t<R>& fam, const twist_map<R>& star,
                                   const dyadic_word& w, const map_point<R>& p) {
    if (int(fam.levels.size()) < w.level())
        throw config_error("conjugacy: eps family has fewer levels than the word");
    auto sf = star_family(star, w.level());
    auto q = invert_presentation(sf, w, p);
    return presentation(fam.levels, w, q).p;
}

inline double delta_of(const dh_options& opts, int n, double p_norm) {
    return opts.delta_scale * std::pow(opts.theta, opts.exponent * n) * p_norm;
}

// N_n(eps, omega, t) for one angle.
inline double measure_N(const eps_family& fam, const fixed_point_record& rec, const dyadic_word& w,
                        double t, const dh_options& opts = {}) {
    auto star = make_twist_map(rec);
    auto hp = hyperbolic_fixed_point(star);
    auto sf = star_family(star, w.level());
    auto cs0 = presentation(sf, w, hp.p);
    auto ce0 = presentation(fam.levels, w, hp.p);
    mat2<double> dh0 = ce0.dpsi * inverse(cs0.dpsi);
    double delta = delta_of(opts, w.level(), std::hypot(cs0.p.x, cs0.p.u));
    map_point<double> pp{cs0.p.x + delta * std::cos(t), cs0.p.u + delta * std::sin(t)};
    auto dh1 = dh_derivative_at(fam, star, w, pp);
    return mat_norm(dh1 - dh0, opts.frobenius);
}

struct holder_measurement {
    int n = 0;
    int t_grid = 0;
    double alpha_n = 0.0;
    std::uint64_t argmin_word = 0;
    std::vector<double> m_of_word;     // M_n(eps, omega), indexed by k(omega)
    std::vector<double> t_argmax;
    std::vector<double> delta_of_word;
};

// Exhaustive max over the t grid and min over all 2^n words.
template <class R>
inline holder_measurement level_alpha_at(const eps_family_t<R>& fam, const twist_map<R>& star,
                                         int n, int t_grid, const dh_options& opts) {
    if (n < 1 || n > opts.max_level)
        throw config_error("level_alpha: level out of range for this precision mode");
    if (int(fam.levels.size()) < n) throw config_error("level_alpha: eps family too shallow");
    if (t_grid < 2) throw config_error("level_alpha: t grid too small");

    auto hp = hyperbolic_fixed_point(star);
    auto sf = star_family(star, n);
    const double two_pi = 6.283185307179586476925286766559;

    holder_measurement out;
    out.n = n;
    out.t_grid = t_grid;
    const std::uint64_t count = std::uint64_t(1) << n;
    out.m_of_word.resize(std::size_t(count));
    out.t_argmax.resize(std::size_t(count));
    out.delta_of_word.resize(std::size_t(count));

    double alpha = std::numeric_limits<double>::infinity();
    std::uint64_t argmin = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
        auto w = word_of(k, n);
        try {
            auto cs0 = presentation(sf, w, hp.p);
            auto ce0 = presentation(fam.levels, w, hp.p);
            mat2<R> dh0 = ce0.dpsi * inverse(cs0.dpsi);
            double delta = delta_of(opts, n, std::hypot(to_double(cs0.p.x), to_double(cs0.p.u)));
            if (!(delta > 0.0)) throw numeric_error("degenerate perturbation size");
            double m_best = -1.0;
            double t_best = 0.0;
            for (int j = 0; j < t_grid; ++j) {
                double t = two_pi * double(j) / double(t_grid);
                map_point<R> pp{cs0.p.x + R(delta * std::cos(t)), cs0.p.u + R(delta * std::sin(t))};
                auto q = invert_presentation(sf, w, pp);
                auto cs = presentation(sf, w, q);
                auto ce = presentation(fam.levels, w, q);
                double nn = mat_norm(mat2<R>(ce.dpsi * inverse(cs.dpsi) - dh0), opts.frobenius);
                if (nn > m_best) {
                    m_best = nn;
                    t_best = t;
                }
            }
            out.m_of_word[std::size_t(k)] = m_best;
            out.t_argmax[std::size_t(k)] = t_best;
            out.delta_of_word[std::size_t(k)] = delta;
            // the all-zeros word composes only linear scalings: Dh is constant,
            // M vanishes exactly and the word sits at alpha = +inf, off the min
            if (!(m_best > 0.0)) continue;
            double a = std::log(m_best) / std::log(delta);
            if (a < alpha) {
                alpha = a;
                argmin = k;
            }
        } catch (const error& e) {
            throw numeric_error("level_alpha: word " + w.str() + " failed: " + e.what());
        }
    }
    if (!std::isfinite(alpha))
        throw numeric_error("level_alpha: no word with a finite exponent (degenerate family?)");
    out.alpha_n = alpha;
    out.argmin_word = argmin;
    return out;
}

inline holder_measurement level_alpha(const eps_family& fam, const fixed_point_record& rec, int n,
                                      int t_grid = 512, const dh_options& opts = {}) {
    // truncate the star side to the family's working degree
    int fd = fam.levels.empty() ? rec.degree : fam.levels[0].s.degree();
    auto star = fd < rec.degree ? make_twist_map(rec.s.with_degree(fd), rec.lambda, rec.mu)
                                : make_twist_map(rec);
    return level_alpha_at(fam, star, n, t_grid, opts);
}

inline holder_measurement level_alpha(const eps_family_t<dd_real>& fam, const fixed_point_dd& rec,
                                      int n, int t_grid = 512, dh_options opts = {}) {
    if (opts.max_level < 15) opts.max_level = 15;
    auto star = make_twist_map(rec.s, rec.lambda, rec.mu);
    return level_alpha_at(fam, star, n, t_grid, opts);
}

// --- extrapolation fit ------------------------------------------------------

struct fit_params {
    double a_eps = 0.0;  // the extrapolated alpha(eps)
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double rel_lsq_error = 0.0;
};

inline double fit_model(const fit_params& f, double n) {
    double inv = 1.0 / n;
    return f.a_eps * std::exp(inv * (f.k1 + inv * (f.k2 + inv * (f.k3 + inv * f.k4))));
}

// Linear least squares on log alpha_n = log a + sum k^i / n^i (the exact
// linearization of the model); the residual column uses the relative
// per-level formula, normalized by the number of levels in range.
inline fit_params fit_extrapolate(const std::vector<holder_measurement>& meas, int n_lo, int n_hi) {
    std::vector<std::pair<int, double>> rows;
    for (const auto& m : meas)
        if (m.n >= n_lo && m.n <= n_hi) {
            if (!(m.alpha_n > 0.0))
                throw numeric_error("fit: nonpositive alpha_n at n=" + std::to_string(m.n));
            rows.emplace_back(m.n, m.alpha_n);
        }
    if (rows.size() < 6) throw config_error("fit: need at least 6 levels in range");

    Eigen::MatrixXd a(long(rows.size()), 5);
    Eigen::VectorXd b(long(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double inv = 1.0 / rows[i].first;
        a(long(i), 0) = 1.0;
        for (int p = 1; p <= 4; ++p) a(long(i), p) = std::pow(inv, p);
        b(long(i)) = std::log(rows[i].second);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 5) throw numeric_error("fit: rank-deficient design (levels too clustered)");
    Eigen::VectorXd c = qr.solve(b);

    fit_params f;
    f.a_eps = std::exp(c(0));
    f.k1 = c(1);
    f.k2 = c(2);
    f.k3 = c(3);
    f.k4 = c(4);
    double acc = 0.0;
    for (const auto& [n, alpha] : rows) {
        double r = (alpha - fit_model(f, n)) / alpha;
        acc += r * r;
    }
    f.rel_lsq_error = std::sqrt(acc) / double(rows.size());
    return f;
}

// --- reports ----------------------------------------------------------------

inline std::string alpha_csv(double eps, const std::vector<holder_measurement>& meas,
                             const fit_params& fit) {
    std::string out = "eps,n,alpha_n,fit_alpha\n";
    for (const auto& m : meas)
        out += format_real(eps) + "," + std::to_string(m.n) + "," + format_real(m.alpha_n) + "," +
               format_real(fit_model(fit, m.n)) + "\n";
    return out;
}

inline std::string fit_csv(const std::vector<std::pair<double, fit_params>>& fits) {
    std::string out = "eps,a,k1,k2,k3,k4,rel_lsq_error\n";
    for (const auto& [eps, f] : fits)
        out += format_real(eps) + "," + format_real(f.a_eps) + "," + format_real(f.k1) + "," +
               format_real(f.k2) + "," + format_real(f.k3) + "," + format_real(f.k4) + "," +
               format_real(f.rel_lsq_error) + "\n";
    return out;
}

} // namespace ekw
