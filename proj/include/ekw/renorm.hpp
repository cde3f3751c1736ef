#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ekw/basis.hpp"
#include "ekw/errors.hpp"
#include "ekw/series.hpp"

namespace ekw {

struct renorm_options {
    double tol_mid = 1e-13;     // midpoint residual, measured at rho_check
    double rho_check = 0.5;     // subdisk radius for residual norms
    int max_mid_iters = 40;
    double root_tol = 1e-14;    // scalar root |g|
    double lambda_lo = -0.5;    // bracket for the lambda root
    double lambda_hi = -0.05;
    bool gates = true;          // lambda in bracket, |mu| < |lambda| sanity gates
    bool check_mu_routes = true;
    double mu_check_base = 1e-10;
    double norm_tol_base = 1e-10; // output normalization assert (degree-aware)
    double sym_tol = 1e-9;        // coefficient-symmetry assert on s'
};

// Truncation-tail-aware tolerance: the scalings and normalization identities
// hold only up to the discarded series tail, which shrinks like |lambda|^(N+1)
// with lambda near -0.25; the constant absorbs coefficient growth.
inline double trunc_tail_tol(int degree, double base) {
    double tail = 100.0 * std::pow(0.26, degree + 1);
    return tail > base ? tail : base;
}

template <class R>
bool is_normalized(const series2<R>& s, double tol) {
    using ekw::abs;
    R v = eval(s, R(1), R(0));
    R d = eval(partial1(s).with_degree(s.degree()), R(1), R(0));
    return to_double(abs(v)) <= tol && to_double(abs(d - R(1))) <= tol;
}

// Newton on a scalar function f returning (value, derivative).
template <class R, class F>
R scalar_newton(F&& f, R x0, double tol, int max_iters = 60) {
    using ekw::abs;
    R x = x0;
    for (int k = 0; k < max_iters; ++k) {
        auto [v, d] = f(x);
        if (to_double(abs(v)) <= tol) return x;
        if (to_double(abs(d)) < 1e-300) throw numeric_error("scalar_newton: derivative near zero");
        x = x - v / d;
        if (!isfinite(x)) throw numeric_error("scalar_newton: iterate diverged");
    }
    auto [v, d] = f(x);
    (void)d;
    if (to_double(abs(v)) <= tol) return x;
    throw numeric_error("scalar_newton: no convergence, residual " + std::to_string(to_double(abs(v))));
}

template <class R>
struct midpoint_result {
    series2<R> z;
    double residual = 0.0;
    int iterations = 0;
};

// Solve s(x,Z) + s(y,Z) = 0 for the symmetric midpoint series Z by Newton in
// the series algebra: Z <- Z - (s(x,Z)+s(y,Z)) / (s_2(x,Z)+s_2(y,Z)).
template <class R>
midpoint_result<R> midpoint_full(const series2<R>& s, const renorm_options& opt = {},
                                 const series2<R>* warm = nullptr) {
    using ekw::abs;
    const int n = s.degree();
    const double rho = s.rho();
    auto s1 = partial1(s).with_degree(n);
    auto s2 = partial2(s).with_degree(n);

    series2<R> z(n, rho);
    if (warm) {
        z = warm->with_degree(n).with_rho(rho);
    } else {
        // degree-0 part: root of s(0,t) = 0 near t = 1
        R z0 = scalar_newton([&](R t) { return std::pair<R, R>(eval(s, R(0), t), eval(s2, R(0), t)); },
                             R(1), opt.root_tol);
        // degree-1 part: differentiate s(x,Z)+s(y,Z)=0 at the origin
        R den = R(2) * eval(s2, R(0), z0);
        if (to_double(abs(den)) < 1e-300) throw numeric_error("degenerate twist: s_2(0,z0) = 0");
        R z1 = -eval(s1, R(0), z0) / den;
        z.at(0, 0) = z0;
        z.at(1, 0) = z1;
        z.at(0, 1) = z1;
    }

    midpoint_result<R> out{z, 0.0, 0};
    for (int it = 0; it < opt.max_mid_iters; ++it) {
        auto zpow = powers(out.z, n);
        auto a = compose_second(s, zpow);
        auto res = a + transpose(a);
        out.residual = to_double(norm_rho(res, opt.rho_check));
        out.iterations = it;
        if (out.residual <= opt.tol_mid) return out;
        auto b = compose_second(s2, zpow);
        auto den = b + transpose(b);
        if (to_double(abs(den.at(0, 0))) < 1e-12)
            throw numeric_error("degenerate twist: denominator constant term near zero");
        auto step = multiply(res, reciprocal(den));
        out.z -= step;
        out.z = R(0.5) * (out.z + transpose(out.z)); // keep Z(x,y) = Z(y,x) exact
    }
    throw numeric_error("midpoint: no convergence, residual " + std::to_string(out.residual));
}

template <class R>
series2<R> midpoint(const series2<R>& s, const renorm_options& opt = {},
                    const series2<R>* warm = nullptr) {
    return midpoint_full(s, opt, warm).z;
}

// Root of g(lambda) = s(lambda,1) + s(0,1), Newton seeded at -0.25 with a
// bisection fallback on the bracket when the gate is active.
template <class R>
R scaling_lambda(const series2<R>& s, const renorm_options& opt = {}) {
    using ekw::abs;
    auto s1 = partial1(s).with_degree(s.degree());
    R c = eval(s, R(0), R(1));
    auto g = [&](R lam) {
        return std::pair<R, R>(eval(s, lam, R(1)) + c, eval(s1, lam, R(1)));
    };
    bool newton_ok = true;
    R lam(0);
    try {
        lam = scalar_newton(g, R(-0.25), opt.root_tol);
    } catch (const numeric_error&) {
        newton_ok = false;
    }
    if (!opt.gates) {
        if (!newton_ok) throw numeric_error("scaling_lambda: Newton failed with gates disabled");
        return lam;
    }
    double lv = to_double(lam);
    if (newton_ok && lv > opt.lambda_lo && lv < opt.lambda_hi) return lam;
    // fall back to bisection on the gate bracket
    R lo(opt.lambda_lo), hi(opt.lambda_hi);
    R flo = g(lo).first, fhi = g(hi).first;
    if (to_double(flo) * to_double(fhi) > 0.0)
        throw numeric_error("scaling_lambda: no sign change in bracket");
    for (int k = 0; k < 80; ++k) {
        R mid = (lo + hi) / R(2);
        R fm = g(mid).first;
        if (to_double(abs(fm)) <= opt.root_tol) return mid;
        if (to_double(flo) * to_double(fm) <= 0.0) { hi = mid; fhi = fm; }
        else { lo = mid; flo = fm; }
    }
    return scalar_newton(g, (lo + hi) / R(2), opt.root_tol);
}

// mu = -lambda * s_1(1,0) * s_1(lambda,1) / (s_2(lambda,1) + s_2(0,1)).
// An optional midpoint-powers argument enables the independent cross-route
// mu = lambda * d/dx [s(Z(x,y),y)] at (lambda,0), asserted to agree.
template <class R>
R scaling_mu(const series2<R>& s, const R& lam, const renorm_options& opt = {},
             const std::vector<series2<R>>* zpow = nullptr) {
    using ekw::abs;
    const int n = s.degree();
    auto s1 = partial1(s).with_degree(n);
    auto s2 = partial2(s).with_degree(n);
    R p = eval(s1, R(1), R(0));
    R q = eval(s1, lam, R(1));
    R e = eval(s2, lam, R(1)) + eval(s2, R(0), R(1));
    if (to_double(abs(e)) < 1e-12) throw numeric_error("degenerate scaling: zero denominator");
    if (to_double(abs(q)) < 1e-12) throw numeric_error("degenerate scaling: s_1(lambda,1) = 0");
    R mu = -lam * p * q / e;
    if (opt.check_mu_routes && zpow) {
        auto sigma = compose_first(s, *zpow);
        R mu2 = lam * eval(partial1(sigma).with_degree(n), lam, R(0));
        double tol = trunc_tail_tol(n, opt.mu_check_base);
        if (to_double(abs(mu - mu2)) > tol)
            throw numeric_error("scaling_mu: route disagreement " +
                                std::to_string(to_double(abs(mu - mu2))));
    }
    return mu;
}

template <class R>
struct renorm_result {
    series2<R> s_prime;
    R lambda{};
    R mu{};
    series2<R> z;
    double mid_residual = 0.0;
    int mid_iterations = 0;
};

// One application of the operator: s'(x,y) = mu^{-1} s(Z(lambda x, lambda y), lambda y).
template <class R>
renorm_result<R> renormalize(const series2<R>& s, const renorm_options& opt = {},
                             const series2<R>* z_warm = nullptr) {
    using ekw::abs;
    const int n = s.degree();
    auto mid = midpoint_full(s, opt, z_warm);
    auto zpow = powers(mid.z, n);
    R lam = scaling_lambda(s, opt);
    R mu = scaling_mu(s, lam, opt, &zpow);
    if (opt.gates) {
        double lv = to_double(lam), mv = to_double(mu);
        if (!(lv > -1.0 && lv < 0.0 && std::fabs(mv) < std::fabs(lv)))
            throw numeric_error("scaling gate: (lambda, mu) outside operating region");
    }
    auto sigma = compose_first(s, zpow);
    renorm_result<R> out;
    out.z = mid.z;
    out.mid_residual = mid.residual;
    out.mid_iterations = mid.iterations;
    out.lambda = lam;
    out.mu = mu;
    out.s_prime = (R(1) / mu) * scale_args(sigma, lam);

    double sym = symmetry_residual(out.s_prime);
    if (sym > opt.sym_tol)
        throw numeric_error("renormalize: symmetry residual " + std::to_string(sym));
    // normalization defects in the input are amplified by 1/mu in the output,
    // so the input-side gate is tighter by |mu|
    double ntol = trunc_tail_tol(n, opt.norm_tol_base);
    if (is_normalized(s, ntol * std::fabs(to_double(mu))) && !is_normalized(out.s_prime, ntol))
        throw numeric_error("renormalize: output normalization drift");
    return out;
}

// Cached quantities for the first variation at a fixed s.
template <class R>
struct renorm_workspace {
    series2<R> s, s1, s2;
    series2<R> z;
    std::vector<series2<R>> zpow;
    series2<R> w;       // 1 / (s_2(x,Z) + s_2(y,Z))
    series2<R> s1zy;    // s_1(Z(x,y), y)
    series2<R> sigma;   // s(Z(x,y), y)
    series2<R> s_prime;
    series2<R> u;       // x sigma_1(lx,ly) + y sigma_2(lx,ly) = d/dl sigma(lx,ly)
    R lambda{}, mu{};
    R p{}, q{}, e{};    // s_1(1,0), s_1(lambda,1), s_2(lambda,1)+s_2(0,1)
    R s11_l1{}, s12_l1{}; // d11 s and d1 d2 s at (lambda, 1)
};

template <class R>
renorm_workspace<R> make_workspace(const series2<R>& s, const renorm_options& opt = {},
                                   const series2<R>* z_warm = nullptr) {
    const int n = s.degree();
    renorm_workspace<R> ws;
    ws.s = s;
    ws.s1 = partial1(s).with_degree(n);
    ws.s2 = partial2(s).with_degree(n);
    auto rn = renormalize(s, opt, z_warm);
    ws.z = rn.z;
    ws.zpow = powers(ws.z, n);
    ws.lambda = rn.lambda;
    ws.mu = rn.mu;
    ws.s_prime = rn.s_prime;
    auto b = compose_second(ws.s2, ws.zpow);
    ws.w = reciprocal(b + transpose(b));
    ws.s1zy = compose_first(ws.s1, ws.zpow);
    ws.sigma = compose_first(ws.s, ws.zpow);
    auto sig1 = scale_args(partial1(ws.sigma).with_degree(n), ws.lambda);
    auto sig2 = scale_args(partial2(ws.sigma).with_degree(n), ws.lambda);
    auto xs = series2<R>::monomial(1, 0, R(1), n, s.rho());
    auto ys = series2<R>::monomial(0, 1, R(1), n, s.rho());
    ws.u = multiply(xs, sig1) + multiply(ys, sig2);
    ws.p = eval(ws.s1, R(1), R(0));
    ws.q = eval(ws.s1, ws.lambda, R(1));
    ws.e = eval(ws.s2, ws.lambda, R(1)) + eval(ws.s2, R(0), R(1));
    ws.s11_l1 = eval(partial1(ws.s1).with_degree(n), ws.lambda, R(1));
    ws.s12_l1 = eval(partial2(ws.s1).with_degree(n), ws.lambda, R(1));
    return ws;
}

// Directional derivative of the operator at ws.s in direction ds, by exact
// differentiation of Z, lambda, mu and the composition.
template <class R>
series2<R> d_renormalize(const renorm_workspace<R>& ws, const series2<R>& ds) {
    const int n = ws.s.degree();
    const R& lam = ws.lambda;
    auto ds_n = ds.degree() == n ? ds : ds.with_degree(n);

    // dZ = -(ds(x,Z) + ds(y,Z)) * W
    auto a = compose_second(ds_n, ws.zpow);
    auto dz = R(-1) * multiply(a + transpose(a), ws.w);

    // scalar variations
    auto ds1 = partial1(ds_n).with_degree(n);
    auto ds2 = partial2(ds_n).with_degree(n);
    R dlam = -(eval(ds_n, lam, R(1)) + eval(ds_n, R(0), R(1))) / ws.q;
    R dp = eval(ds1, R(1), R(0));
    R dq = eval(ds1, lam, R(1)) + ws.s11_l1 * dlam;
    R de = eval(ds2, lam, R(1)) + eval(ds2, R(0), R(1)) + ws.s12_l1 * dlam;
    R dmu = ws.mu * (dlam / lam + dp / ws.p + dq / ws.q - de / ws.e);

    // d sigma = ds(Z,y) + s_1(Z,y) dZ, then the lambda-scaling chain rule
    auto dsigma = compose_first(ds_n, ws.zpow) + multiply(ws.s1zy, dz);
    auto dsig_l = scale_args(dsigma, lam) + dlam * ws.u;
    return (R(1) / ws.mu) * (dsig_l - dmu * ws.s_prime);
}

} // namespace ekw
