#pragma once

#include <random>

#include "ekw/series.hpp"

namespace ekw::testutil {

inline std::mt19937& rng() {
    static std::mt19937 gen(20260815u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

inline series2<double> random_series(int degree, double rho, double amp = 1.0) {
    series2<double> s(degree, rho);
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j) s.at(i, j) = uniform(-amp, amp);
    return s;
}

inline double coeff_max_diff(const series2<double>& a, const series2<double>& b) {
    int n = a.degree() < b.degree() ? a.degree() : b.degree();
    double m = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            double d = std::fabs(a.at(i, j) - b.at(i, j));
            if (d > m) m = d;
        }
    return m;
}

} // namespace ekw::testutil
