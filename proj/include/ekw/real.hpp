#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace ekw {

// Compensated double-double arithmetic: an unevaluated sum hi + lo with
// |lo| <= ulp(hi)/2.  Gives ~32 significant decimal digits; used to unlock
// the deep renormalization levels where coordinates shrink past 1e-16.
struct dd_real {
    double hi{0.0};
    double lo{0.0};

    constexpr dd_real() = default;
    constexpr dd_real(double h) : hi(h), lo(0.0) {}
    constexpr dd_real(double h, double l) : hi(h), lo(l) {}
    constexpr dd_real(int v) : hi(static_cast<double>(v)), lo(0.0) {}

    static dd_real two_sum(double a, double b) {
        double s = a + b;
        double bb = s - a;
        return {s, (a - (s - bb)) + (b - bb)};
    }
    static dd_real quick_two_sum(double a, double b) {
        double s = a + b;
        return {s, b - (s - a)};
    }
    static dd_real two_prod(double a, double b) {
        double p = a * b;
        return {p, std::fma(a, b, -p)};
    }

    friend dd_real operator+(const dd_real& a, const dd_real& b) {
        dd_real s = two_sum(a.hi, b.hi);
        dd_real t = two_sum(a.lo, b.lo);
        s.lo += t.hi;
        s = quick_two_sum(s.hi, s.lo);
        s.lo += t.lo;
        return quick_two_sum(s.hi, s.lo);
    }
    friend dd_real operator-(const dd_real& a, const dd_real& b) {
        return a + dd_real(-b.hi, -b.lo);
    }
    friend dd_real operator-(const dd_real& a) { return {-a.hi, -a.lo}; }
    friend dd_real operator*(const dd_real& a, const dd_real& b) {
        dd_real p = two_prod(a.hi, b.hi);
        p.lo += a.hi * b.lo + a.lo * b.hi;
        return quick_two_sum(p.hi, p.lo);
    }
    friend dd_real operator/(const dd_real& a, const dd_real& b) {
        double q1 = a.hi / b.hi;
        dd_real r = a - b * dd_real(q1);
        double q2 = r.hi / b.hi;
        r = r - b * dd_real(q2);
        double q3 = r.hi / b.hi;
        dd_real q = quick_two_sum(q1, q2);
        return q + dd_real(q3);
    }

    dd_real& operator+=(const dd_real& o) { *this = *this + o; return *this; }
    dd_real& operator-=(const dd_real& o) { *this = *this - o; return *this; }
    dd_real& operator*=(const dd_real& o) { *this = *this * o; return *this; }
    dd_real& operator/=(const dd_real& o) { *this = *this / o; return *this; }

    friend bool operator==(const dd_real& a, const dd_real& b) { return a.hi == b.hi && a.lo == b.lo; }
    friend bool operator!=(const dd_real& a, const dd_real& b) { return !(a == b); }
    friend bool operator<(const dd_real& a, const dd_real& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
    friend bool operator>(const dd_real& a, const dd_real& b) { return b < a; }
    friend bool operator<=(const dd_real& a, const dd_real& b) { return !(b < a); }
    friend bool operator>=(const dd_real& a, const dd_real& b) { return !(a < b); }
};

inline double to_double(double x) { return x; }
inline double to_double(const dd_real& x) { return x.hi; }

inline double abs(double x) { return std::fabs(x); }
inline dd_real abs(const dd_real& x) { return x.hi < 0.0 || (x.hi == 0.0 && x.lo < 0.0) ? -x : x; }

inline double sqrt(double x) { return std::sqrt(x); }
inline dd_real sqrt(const dd_real& a) {
    if (a.hi == 0.0 && a.lo == 0.0) return {};
    double r = std::sqrt(a.hi);
    dd_real rd(r);
    // one Newton step doubles the 16 valid digits of the seed
    return (rd + a / rd) * dd_real(0.5);
}

inline bool isfinite(double x) { return std::isfinite(x); }
inline bool isfinite(const dd_real& x) { return std::isfinite(x.hi) && std::isfinite(x.lo); }

template <class R> struct real_traits;
template <> struct real_traits<double> {
    static constexpr double epsilon = std::numeric_limits<double>::epsilon();
    static constexpr double root_tol = 1e-15;
    static const char* name() { return "double"; }
};
template <> struct real_traits<dd_real> {
    static constexpr double epsilon = 4.93e-32;
    static constexpr double root_tol = 1e-30;
    static const char* name() { return "dd"; }
};

} // namespace ekw
