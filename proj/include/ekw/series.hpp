#pragma once

#include <cassert>
#include <cstddef>
#include <utility>
#include <vector>

#include "ekw/errors.hpp"
#include "ekw/real.hpp"

namespace ekw {

template <class R>
R pow_int(R base, int e) {
    R r(1);
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
}

// Truncated bivariate power series sum c_ij x^i y^j over 0 <= i+j <= degree,
// with the weighted l1 norm |s|_rho = sum |c_ij| rho^(i+j).  Dense storage:
// (N+1)^2 row-major; entries with i+j > N are structurally zero.
template <class R>
class series2 {
  public:
    series2() : series2(0, 1.75) {}
    series2(int degree, double rho) : deg_(degree), rho_(rho), c_(std::size_t(degree + 1) * (degree + 1), R(0)) {
        assert(degree >= 0 && rho > 0.0);
    }

    static series2 constant(const R& v, int degree, double rho) {
        series2 s(degree, rho);
        s.at(0, 0) = v;
        return s;
    }
    static series2 monomial(int i, int j, const R& coef, int degree, double rho) {
        series2 s(degree, rho);
        s.at(i, j) = coef;
        return s;
    }

    int degree() const { return deg_; }
    double rho() const { return rho_; }

    R& at(int i, int j) {
        assert(i >= 0 && j >= 0 && i + j <= deg_);
        return c_[std::size_t(i) * (deg_ + 1) + j];
    }
    const R& at(int i, int j) const {
        assert(i >= 0 && j >= 0 && i + j <= deg_);
        return c_[std::size_t(i) * (deg_ + 1) + j];
    }
    // Zero-extended read for any non-negative index pair.
    R get(int i, int j) const {
        if (i < 0 || j < 0 || i + j > deg_) return R(0);
        return c_[std::size_t(i) * (deg_ + 1) + j];
    }

    const std::vector<R>& data() const { return c_; }

    // Copy onto a new degree cap (pad with zeros or silently truncate).
    series2 with_degree(int degree) const {
        series2 r(degree, rho_);
        int m = degree < deg_ ? degree : deg_;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j + i <= m; ++j) r.at(i, j) = at(i, j);
        return r;
    }
    series2 with_rho(double rho) const {
        series2 r = *this;
        r.rho_ = rho;
        return r;
    }

    series2& operator+=(const series2& o) {
        require_compatible(o);
        int m = o.deg_ < deg_ ? o.deg_ : deg_;
        if (o.deg_ > deg_) throw config_error("series add: degree cap exceeded");
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j + i <= m; ++j) at(i, j) += o.at(i, j);
        return *this;
    }
    series2& operator-=(const series2& o) {
        require_compatible(o);
        if (o.deg_ > deg_) throw config_error("series sub: degree cap exceeded");
        int m = o.deg_ < deg_ ? o.deg_ : deg_;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j + i <= m; ++j) at(i, j) -= o.at(i, j);
        return *this;
    }
    series2& operator*=(const R& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend series2 operator+(series2 a, const series2& b) {
        if (b.deg_ > a.deg_) { series2 r = b; r += a; return r; }
        a += b;
        return a;
    }
    friend series2 operator-(series2 a, const series2& b) {
        if (b.deg_ > a.deg_) { series2 r = -b; r += a; return r; }
        a -= b;
        return a;
    }
    friend series2 operator-(series2 a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }
    friend series2 operator*(const R& s, series2 a) {
        a *= s;
        return a;
    }

    void require_compatible(const series2& o) const {
        if (rho_ != o.rho_) throw config_error("series op: mismatched rho");
    }

  private:
    int deg_;
    double rho_;
    std::vector<R> c_;
};

// Cauchy product truncated to the smaller degree cap.
template <class R>
series2<R> multiply(const series2<R>& a, const series2<R>& b) {
    a.require_compatible(b);
    int n = a.degree() < b.degree() ? a.degree() : b.degree();
    series2<R> r(n, a.rho());
    for (int i1 = 0; i1 <= (a.degree() < n ? a.degree() : n); ++i1) {
        for (int j1 = 0; i1 + j1 <= n; ++j1) {
            const R& av = a.at(i1, j1);
            if (av == R(0)) continue;
            int rem = n - i1 - j1;
            int imax = rem < b.degree() ? rem : b.degree();
            for (int i2 = 0; i2 <= imax; ++i2) {
                int jmax = rem - i2 < b.degree() - i2 ? rem - i2 : b.degree() - i2;
                for (int j2 = 0; j2 <= jmax; ++j2) {
                    const R& bv = b.at(i2, j2);
                    if (bv == R(0)) continue;
                    r.at(i1 + i2, j1 + j2) += av * bv;
                }
            }
        }
    }
    return r;
}

template <class R>
series2<R> operator*(const series2<R>& a, const series2<R>& b) {
    return multiply(a, b);
}

// b^0 .. b^m, truncated like multiply.
template <class R>
std::vector<series2<R>> powers(const series2<R>& b, int m) {
    std::vector<series2<R>> p;
    p.reserve(m + 1);
    p.push_back(series2<R>::constant(R(1), b.degree(), b.rho()));
    for (int k = 1; k <= m; ++k) p.push_back(multiply(p.back(), b));
    return p;
}

template <class R>
series2<R> transpose(const series2<R>& s) {
    series2<R> r(s.degree(), s.rho());
    for (int i = 0; i <= s.degree(); ++i)
        for (int j = 0; i + j <= s.degree(); ++j) r.at(j, i) = s.at(i, j);
    return r;
}

// Formal partial derivative; degree cap drops by one.
template <class R>
series2<R> partial(const series2<R>& s, int axis) {
    if (axis != 1 && axis != 2) throw config_error("partial: axis must be 1 or 2");
    int n = s.degree() > 0 ? s.degree() - 1 : 0;
    series2<R> r(n, s.rho());
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j)
            r.at(i, j) = axis == 1 ? R(i + 1) * s.get(i + 1, j) : R(j + 1) * s.get(i, j + 1);
    return r;
}

template <class R>
series2<R> partial1(const series2<R>& s) { return partial(s, 1); }
template <class R>
series2<R> partial2(const series2<R>& s) { return partial(s, 2); }

template <class R>
R norm_rho(const series2<R>& s, double rho) {
    using ekw::abs;
    R total(0);
    R w(1);
    // accumulate per total degree d using precomputed rho^d
    for (int d = 0; d <= s.degree(); ++d) {
        R layer(0);
        for (int i = 0; i <= d; ++i) layer += abs(s.at(i, d - i));
        total += layer * w;
        w *= R(rho);
    }
    return total;
}
template <class R>
R norm_rho(const series2<R>& s) { return norm_rho(s, s.rho()); }

// Horner evaluation over the masked triangle; optional out-of-radius flag
// compares max(|x|,|y|) against the configured evaluation radius (rho).
template <class R>
R eval(const series2<R>& s, const R& x, const R& y, bool* out_of_radius = nullptr) {
    using ekw::abs;
    if (out_of_radius) {
        double m = to_double(abs(x));
        double my = to_double(abs(y));
        if (my > m) m = my;
        *out_of_radius = m > s.rho();
    }
    R acc(0);
    for (int i = s.degree(); i >= 0; --i) {
        R row(0);
        for (int j = s.degree() - i; j >= 0; --j) row = row * y + s.at(i, j);
        acc = acc * x + row;
    }
    return acc;
}

template <class R>
std::pair<R, R> eval_grad(const series2<R>& s, const R& x, const R& y) {
    return {eval(partial1(s), x, y), eval(partial2(s), x, y)};
}

// s(lambda*x, lambda*y): scale coefficient layers by lambda^(i+j).
template <class R>
series2<R> scale_args(const series2<R>& s, const R& lam) {
    series2<R> r(s.degree(), s.rho());
    R w(1);
    for (int d = 0; d <= s.degree(); ++d) {
        for (int i = 0; i <= d; ++i) r.at(i, d - i) = w * s.at(i, d - i);
        w *= lam;
    }
    return r;
}

// s(x, B(x,y)) given precomputed powers of B; exact up to the degree cap.
template <class R>
series2<R> compose_second(const series2<R>& s, const std::vector<series2<R>>& bpow) {
    int n = s.degree();
    series2<R> r(n, s.rho());
    for (int j = 0; j <= n && j < int(bpow.size()); ++j) {
        // column polynomial in x times B^j
        series2<R> col(n, s.rho());
        bool any = false;
        for (int i = 0; i + j <= n; ++i) {
            col.at(i, 0) = s.at(i, j);
            if (s.at(i, j) != R(0)) any = true;
        }
        if (!any) continue;
        r += multiply(col, bpow[std::size_t(j)]);
    }
    return r;
}

// s(A(x,y), y) given precomputed powers of A.
template <class R>
series2<R> compose_first(const series2<R>& s, const std::vector<series2<R>>& apow) {
    int n = s.degree();
    series2<R> r(n, s.rho());
    for (int i = 0; i <= n && i < int(apow.size()); ++i) {
        series2<R> row(n, s.rho());
        bool any = false;
        for (int j = 0; i + j <= n; ++j) {
            row.at(0, j) = s.at(i, j);
            if (s.at(i, j) != R(0)) any = true;
        }
        if (!any) continue;
        r += multiply(row, apow[std::size_t(i)]);
    }
    return r;
}

// General composition s(a(x,y), b(x,y)) by Horner in a over row polynomials
// in b.  Divergence guard: partial accumulations must stay below norm_guard.
template <class R>
series2<R> compose(const series2<R>& s, const series2<R>& a, const series2<R>& b,
                   double norm_guard = 1e8) {
    s.require_compatible(a);
    s.require_compatible(b);
    int n = s.degree();
    auto bpow = powers(b.with_degree(n), n);
    series2<R> acc(n, s.rho());
    series2<R> an = a.with_degree(n);
    for (int i = n; i >= 0; --i) {
        series2<R> gi(n, s.rho());
        for (int j = 0; i + j <= n; ++j) {
            if (s.at(i, j) == R(0)) continue;
            gi += s.at(i, j) * bpow[std::size_t(j)];
        }
        acc = multiply(acc, an) + gi;
        if (!(to_double(norm_rho(acc)) < norm_guard))
            throw numeric_error("composition outside disk");
    }
    return acc;
}

// 1/s by Newton iteration w <- w*(2 - s*w); needs a nonzero constant term.
template <class R>
series2<R> reciprocal(const series2<R>& s) {
    using ekw::abs;
    if (to_double(abs(s.get(0, 0))) < 1e-300) throw numeric_error("reciprocal: zero constant term");
    int n = s.degree();
    series2<R> w = series2<R>::constant(R(1) / s.at(0, 0), n, s.rho());
    series2<R> two = series2<R>::constant(R(2), n, s.rho());
    int iters = 1;
    for (int span = 1; span <= n; span *= 2) ++iters;
    for (int k = 0; k < iters; ++k) w = multiply(w, two - multiply(s, w));
    return w;
}

} // namespace ekw
