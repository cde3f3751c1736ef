#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ekw/fixed_point.hpp"
#include "ekw/mat2.hpp"
#include "ekw/series.hpp"

namespace ekw {

template <class R>
struct map_point {
    R x{};
    R u{};
};

// Area-preserving reversible twist map generated by s:
//   (x, u) -> (y, v),  u = -s(y, x),  v = s(x, y),
// together with its renormalization scaling pair Lambda(x,u) = (lambda x, mu u).
template <class R>
struct twist_map {
    series2<R> s;
    series2<R> s1;  // d/darg1, cached
    series2<R> s2;  // d/darg2, cached
    R lambda{};
    R mu{};
    double eval_radius = 0.0;  // real trace of the bidisk; escapes are flagged
};

template <class R>
inline twist_map<R> make_twist_map(const series2<R>& s, const R& lambda, const R& mu) {
    return {s, partial1(s), partial2(s), lambda, mu, s.rho()};
}

inline twist_map<double> make_twist_map(const fixed_point_record& rec) {
    return make_twist_map(rec.s, rec.lambda, rec.mu);
}

namespace detail {

template <class R>
inline void check_domain(const twist_map<R>& m, const R& coord, const char* what) {
    if (!(std::fabs(to_double(coord)) <= m.eval_radius))
        throw domain_escape(std::string("twist map: ") + what + " escaped the evaluation domain");
}

// Solves s(y, x) = -u for y. Newton from the seed with a bisection fallback;
// the twist condition d1 s(y,x) != 0 is what makes the root simple.
template <class R>
inline R implicit_y(const twist_map<R>& m, const R& x, const R& u, const R& seed) {
    const double tol = 1e-13;
    R y = seed;
    R best_y = y;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
        R g = eval(m.s, y, x) + u;
        double ag = std::fabs(to_double(g));
        if (ag < best_res) {
            best_res = ag;
            best_y = y;
        }
        if (ag <= tol) return y;
        R gp = eval(m.s1, y, x);
        if (std::fabs(to_double(gp)) < 1e-12)
            throw numeric_error("twist map: twist condition degenerate at the implicit solve");
        y = y - g / gp;
        if (std::fabs(to_double(y)) > 4.0 * m.eval_radius)
            break;  // diverging: hand over to bisection
    }
    // bracket scan around the seed, then bisection
    const double r = m.eval_radius;
    double lo = std::max(-r, to_double(seed) - 0.5 * r);
    double hi = std::min(r, to_double(seed) + 0.5 * r);
    const int cells = 128;
    auto g_at = [&](double t) { return to_double(eval(m.s, R(t), x) + u); };
    double a = lo, ga = g_at(a);
    bool bracketed = false;
    for (int k = 1; k <= cells && !bracketed; ++k) {
        double b = lo + (hi - lo) * double(k) / cells;
        double gb = g_at(b);
        if (ga == 0.0 || ga * gb < 0.0) {
            bracketed = true;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (a + b);
                double gm = g_at(mid);
                if (std::fabs(gm) <= tol) return R(mid);
                if (ga * gm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            return R(0.5 * (a + b));
        }
        a = b;
        ga = gb;
    }
    if (best_res <= tol) return best_y;
    throw numeric_error("twist map: implicit solve failed, residual " + std::to_string(best_res));
}

} // namespace detail

template <class R>
struct map_step {
    map_point<R> image;
    mat2<R> jac;
};

// One application together with the exact Jacobian (implicit differentiation);
// the solve is done once. det == 1 is an identity of the formulas and is
// asserted as a numerical guard.
template <class R>
inline map_step<R> apply_map_jac(const twist_map<R>& m, const map_point<R>& p,
                                 double seed_y = std::numeric_limits<double>::quiet_NaN()) {
    detail::check_domain(m, p.x, "input");
    R seed = std::isnan(seed_y) ? p.x : R(seed_y);
    R y = detail::implicit_y(m, p.x, p.u, seed);
    detail::check_domain(m, y, "image");
    R s1yx = eval(m.s1, y, p.x);
    R s2yx = eval(m.s2, y, p.x);
    R yx = -s2yx / s1yx;
    R yu = -R(1) / s1yx;
    R s1xy = eval(m.s1, p.x, y);
    R s2xy = eval(m.s2, p.x, y);
    mat2<R> jac{yx, yu, s1xy + s2xy * yx, s2xy * yu};
    if (std::fabs(to_double(jac.det()) - 1.0) > 1e-11)
        throw numeric_error("twist map: symplecticity lost in the Jacobian");
    return {map_point<R>{y, eval(m.s, p.x, y)}, jac};
}

template <class R>
inline map_point<R> apply_map(const twist_map<R>& m, const map_point<R>& p,
                              double seed_y = std::numeric_limits<double>::quiet_NaN()) {
    detail::check_domain(m, p.x, "input");
    R seed = std::isnan(seed_y) ? p.x : R(seed_y);
    R y = detail::implicit_y(m, p.x, p.u, seed);
    detail::check_domain(m, y, "image");
    return {y, eval(m.s, p.x, y)};
}

// F^{-1} = T o F o T with the reversor T(x,u) = (x,-u).
template <class R>
inline map_point<R> apply_inverse(const twist_map<R>& m, const map_point<R>& p) {
    auto q = apply_map(m, map_point<R>{p.x, -p.u});
    return {q.x, -q.u};
}

template <class R>
inline mat2<R> jacobian(const twist_map<R>& m, const map_point<R>& p) {
    return apply_map_jac(m, p).jac;
}

template <class R>
struct hyperbolic_point {
    map_point<R> p;
    R e_plus{};          // unstable eigenvalue, |e+| > 1
    R e_minus{};         // stable eigenvalue, |e-| < 1
    vec2<R> v_stable{};  // normalized to first component 1
    vec2<R> v_unstable{};
    mat2<R> df{};
};

// The fixed point sits on the symmetry line u = 0, so it reduces to the
// scalar root of g(x) = s(x,x).
template <class R>
inline hyperbolic_point<R> hyperbolic_fixed_point(const twist_map<R>& m, double seed = 0.6) {
    R x(seed);
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        R g = eval(m.s, x, x);
        if (std::fabs(to_double(g)) <= 1e-14) {
            converged = true;
            break;
        }
        R gp = eval(m.s1, x, x) + eval(m.s2, x, x);
        if (std::fabs(to_double(gp)) < 1e-12)
            throw numeric_error("hyperbolic fixed point: degenerate root of s(x,x)");
        x = x - g / gp;
    }
    double xd = to_double(x);
    if (!converged || xd < 0.5 || xd > 0.65)
        throw numeric_error("hyperbolic fixed point: no simple root of s(x,x) in [0.5, 0.65]");

    hyperbolic_point<R> out;
    out.p = {x, R(0)};
    out.df = jacobian(m, out.p);
    auto eg = eigen2(out.df);  // |lam1| >= |lam2|
    out.e_plus = eg.lam1;
    out.e_minus = eg.lam2;
    auto rescale = [](vec2<R> v) {
        if (std::fabs(to_double(v.x)) < 1e-300)
            throw numeric_error("hyperbolic fixed point: eigenvector has no x component");
        return vec2<R>{R(1), v.y / v.x};
    };
    out.v_unstable = rescale(eg.v1);
    out.v_stable = rescale(eg.v2);
    return out;
}

// --- dyadic coding ------------------------------------------------------

// omega_1 is the least significant bit: k(omega) = sum omega_i 2^{i-1}.
struct dyadic_word {
    std::vector<std::uint8_t> bits;  // bits[i] = omega_{i+1}

    int level() const { return int(bits.size()); }

    std::uint64_t value() const {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) k |= (std::uint64_t(1) << i);
        return k;
    }

    std::string str() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(b ? '1' : '0');
        return s;
    }
};

inline dyadic_word word_of(std::uint64_t k, int n) {
    if (n < 0 || n > 62) throw config_error("dyadic word: level out of range");
    if (n < 62 && (k >> n) != 0) throw config_error("dyadic word: value exceeds the level");
    dyadic_word w;
    w.bits.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) w.bits[std::size_t(i)] = std::uint8_t((k >> i) & 1u);
    return w;
}

// binary add-1 with carry, wrapping at 2^n
inline dyadic_word odometer(dyadic_word w) {
    for (auto& b : w.bits) {
        if (b == 0) {
            b = 1;
            return w;
        }
        b = 0;  // carry
    }
    return w;  // 1...1 wraps to 0...0
}

// --- presentation functions ---------------------------------------------

// Psi_0 = Lambda, Psi_1 = F o Lambda at each level;
// Psi_omega = Psi_{omega_1} o ... o Psi_{omega_n}, the deepest factor acting
// first. family[i] is the level-i map (level 0 on top); at the renormalization
// fixed point all levels coincide.
template <class R>
struct chain_result {
    map_point<R> p;
    mat2<R> dpsi;
};

template <class R>
inline chain_result<R> presentation(const std::vector<twist_map<R>>& family, const dyadic_word& w,
                                    const map_point<R>& base) {
    if (int(family.size()) < w.level())
        throw config_error("presentation: family has fewer levels than the word");
    map_point<R> p = base;
    mat2<R> d = mat2<R>::identity();
    for (int i = w.level() - 1; i >= 0; --i) {
        const auto& m = family[std::size_t(i)];
        mat2<R> step = mat2<R>::diag(m.lambda, m.mu);
        p = {m.lambda * p.x, m.mu * p.u};
        if (w.bits[std::size_t(i)]) {
            auto fs = apply_map_jac(m, p);
            step = fs.jac * step;
            p = fs.image;
        }
        d = step * d;
    }
    return {p, d};
}

// --- periodic orbits ------------------------------------------------------

struct periodic_orbit {
    int n = 0;
    double lambda = 0.0;
    double mu = 0.0;
    std::vector<map_point<double>> points;  // indexed by k(omega)
    std::vector<mat2<double>> chains;       // DPsi_omega at the base point
};

// All 2^n points via presentation functions (compositions of contractions),
// not 2^n-fold iteration; the odometer identity F(p_omega) = p_{omega+1} and
// the chain determinant (lambda mu)^n are asserted at moderate n.
inline periodic_orbit periodic_orbit_of(const fixed_point_record& rec, int n, int max_level = 16) {
    if (n < 0 || n > max_level) throw config_error("periodic orbit: level out of range");
    auto m = make_twist_map(rec);
    auto hp = hyperbolic_fixed_point(m);
    std::vector<twist_map<double>> family(std::size_t(std::max(n, 1)), m);

    periodic_orbit orb;
    orb.n = n;
    orb.lambda = rec.lambda;
    orb.mu = rec.mu;
    const std::uint64_t count = std::uint64_t(1) << n;
    orb.points.resize(std::size_t(count));
    orb.chains.resize(std::size_t(count));
    for (std::uint64_t k = 0; k < count; ++k) {
        auto res = presentation(family, word_of(k, n), hp.p);
        orb.points[std::size_t(k)] = res.p;
        orb.chains[std::size_t(k)] = res.dpsi;
    }

    if (n <= 12) {
        const double det_ref = std::pow(rec.lambda * rec.mu, n);
        for (std::uint64_t k = 0; k < count; ++k) {
            auto w = word_of(k, n);
            auto next = orb.points[std::size_t(odometer(w).value())];
            auto fp_k = apply_map(m, orb.points[std::size_t(k)], next.x);
            double res = std::hypot(fp_k.x - next.x, fp_k.u - next.u);
            if (res > 1e-9 * std::max(1.0, std::hypot(next.x, next.u)))
                throw numeric_error("periodic orbit: odometer compatibility violated at level " +
                                    std::to_string(n));
            if (std::fabs(orb.chains[std::size_t(k)].det() / det_ref - 1.0) > 1e-8)
                throw numeric_error("periodic orbit: chain determinant drifted from (lambda mu)^n");
        }
    }
    return orb;
}

inline std::string orbit_csv(const periodic_orbit& orb) {
    std::string out = "n,k,bits,x,u\n";
    for (std::size_t k = 0; k < orb.points.size(); ++k) {
        out += std::to_string(orb.n) + "," + std::to_string(k) + "," +
               word_of(std::uint64_t(k), orb.n).str() + "," + format_real(orb.points[k].x) + "," +
               format_real(orb.points[k].u) + "\n";
    }
    return out;
}

} // namespace ekw
