#pragma once

#include <cmath>

#include "ekw/errors.hpp"
#include "ekw/real.hpp"

namespace ekw {

template <class R>
struct vec2 {
    R x{};
    R y{};

    friend vec2 operator+(const vec2& a, const vec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend vec2 operator-(const vec2& a, const vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend vec2 operator*(const R& s, const vec2& v) { return {s * v.x, s * v.y}; }
    friend vec2 operator-(const vec2& v) { return {-v.x, -v.y}; }
};

template <class R>
R dot(const vec2<R>& a, const vec2<R>& b) { return a.x * b.x + a.y * b.y; }

template <class R>
R norm2(const vec2<R>& v) { using ekw::sqrt; return sqrt(v.x * v.x + v.y * v.y); }

// Row-major 2x2: [[a b], [c d]].
template <class R>
struct mat2 {
    R a{}, b{}, c{}, d{};

    static mat2 identity() { return {R(1), R(0), R(0), R(1)}; }
    static mat2 diag(const R& p, const R& q) { return {p, R(0), R(0), q}; }

    R det() const { return a * d - b * c; }
    R trace() const { return a + d; }
    mat2 transpose() const { return {a, c, b, d}; }

    friend mat2 operator+(const mat2& m, const mat2& n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
    friend mat2 operator-(const mat2& m, const mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
    friend mat2 operator*(const R& s, const mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
    friend mat2 operator*(const mat2& m, const mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend vec2<R> operator*(const mat2& m, const vec2<R>& v) {
        return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }
};

template <class R>
mat2<R> inverse(const mat2<R>& m) {
    using ekw::abs;
    R det = m.det();
    if (!(isfinite(det)) || to_double(abs(det)) < 1e-300)
        throw numeric_error("2x2 inverse: determinant underflow");
    R inv = R(1) / det;
    return {inv * m.d, -(inv * m.b), -(inv * m.c), inv * m.a};
}

template <class R>
R frobenius_norm(const mat2<R>& m) {
    using ekw::sqrt;
    return sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d);
}

// Largest singular value.  With F = |M|_F^2 and D = |det M|, the singular
// values satisfy s1^2+s2^2 = F, s1*s2 = D, so s1 = (sqrt(F+2D)+sqrt(F-2D))/2.
template <class R>
R spectral_norm(const mat2<R>& m) {
    using ekw::abs; using ekw::sqrt;
    R F = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    R D = abs(m.det());
    R p = F + R(2) * D;
    R q = F - R(2) * D;
    if (q < R(0)) q = R(0);
    return (sqrt(p) + sqrt(q)) / R(2);
}

template <class R>
struct eig2 {
    R lam1{}, lam2{};       // |lam1| >= |lam2|
    vec2<R> v1{}, v2{};     // unit eigenvectors
};

// Real eigendecomposition of a 2x2; throws if the eigenvalues are complex.
template <class R>
eig2<R> eigen2(const mat2<R>& m) {
    using ekw::abs; using ekw::sqrt;
    R tr = m.trace(), det = m.det();
    R disc = tr * tr - R(4) * det;
    if (disc < R(0)) throw numeric_error("eigen2: complex eigenvalue pair");
    R sq = sqrt(disc);
    R l1 = (tr + sq) / R(2), l2 = (tr - sq) / R(2);
    if (abs(l2) > abs(l1)) { R t = l1; l1 = l2; l2 = t; }
    auto evec = [&](const R& lam) -> vec2<R> {
        vec2<R> r1{m.b, lam - m.a};
        vec2<R> r2{lam - m.d, m.c};
        vec2<R> v = to_double(norm2(r1)) >= to_double(norm2(r2)) ? r1 : r2;
        R n = norm2(v);
        if (to_double(n) < 1e-300) throw numeric_error("eigen2: defective matrix");
        return {v.x / n, v.y / n};
    };
    return {l1, l2, evec(l1), evec(l2)};
}

} // namespace ekw
