#include <cmath>
#include <vector>

#include "doctest.h"
#include "ekw/series.hpp"
#include "helpers.hpp"

using ekw::series2;
namespace tu = ekw::testutil;

TEST_CASE("norm_rho on monomials and zero") {
    auto s = series2<double>::monomial(2, 1, 1.0, 6, 1.75);
    CHECK(ekw::norm_rho(s) == doctest::Approx(5.359375).epsilon(1e-15));
    series2<double> z(6, 1.75);
    CHECK(ekw::norm_rho(z) == 0.0);
}

TEST_CASE("norm_rho equals brute-force term sum") {
    auto s = tu::random_series(9, 1.75);
    // keep only 10 scattered terms
    series2<double> t(9, 1.75);
    int kept = 0;
    for (int i = 0; i <= 9 && kept < 10; ++i)
        for (int j = 0; i + j <= 9 && kept < 10; j += 2) {
            t.at(i, j) = s.at(i, j);
            ++kept;
        }
    double oracle = 0.0;
    for (int i = 0; i <= 9; ++i)
        for (int j = 0; i + j <= 9; ++j) oracle += std::fabs(t.at(i, j)) * std::pow(1.75, i + j);
    CHECK(ekw::norm_rho(t) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("multiply basics") {
    auto x = series2<double>::monomial(1, 0, 1.0, 4, 1.75);
    auto y = series2<double>::monomial(0, 1, 1.0, 4, 1.75);
    auto xy = ekw::multiply(x, y);
    CHECK(xy.at(1, 1) == 1.0);
    CHECK(ekw::norm_rho(xy - series2<double>::monomial(1, 1, 1.0, 4, 1.75)) == 0.0);

    auto one_px = series2<double>::constant(1.0, 4, 1.75);
    one_px.at(1, 0) = 1.0;
    auto one_mx = series2<double>::constant(1.0, 4, 1.75);
    one_mx.at(1, 0) = -1.0;
    auto prod = ekw::multiply(one_px, one_mx);
    CHECK(prod.at(0, 0) == 1.0);
    CHECK(prod.at(1, 0) == 0.0);
    CHECK(prod.at(2, 0) == -1.0);
}

TEST_CASE("multiply truncates to the smaller degree cap") {
    auto a = tu::random_series(8, 1.75);
    auto b = tu::random_series(5, 1.75);
    auto p = ekw::multiply(a, b);
    CHECK(p.degree() == 5);
}

TEST_CASE("mismatched rho is a configuration error") {
    series2<double> a(3, 1.75), b(3, 1.5);
    CHECK_THROWS_AS(ekw::multiply(a, b), ekw::config_error);
}

TEST_CASE("Banach algebra property on random pairs") {
    for (int trial = 0; trial < 100; ++trial) {
        auto a = tu::random_series(7, 1.75);
        auto b = tu::random_series(7, 1.75);
        double lhs = ekw::norm_rho(ekw::multiply(a, b));
        double rhs = ekw::norm_rho(a) * ekw::norm_rho(b);
        CHECK(lhs <= rhs * (1.0 + 1e-13));
    }
}

TEST_CASE("compose trivials") {
    series2<double> s(3, 1.75);
    s.at(1, 0) = 1.0;
    s.at(0, 1) = 1.0;
    auto a = series2<double>::monomial(1, 0, 2.0, 3, 1.75);
    auto b = series2<double>::monomial(0, 1, 3.0, 3, 1.75);
    auto c = ekw::compose(s, a, b);
    CHECK(c.at(1, 0) == doctest::Approx(2.0));
    CHECK(c.at(0, 1) == doctest::Approx(3.0));
    CHECK(std::fabs(c.at(0, 0)) < 1e-15);

    auto idx = series2<double>::monomial(1, 0, 1.0, 6, 1.75);
    auto idy = series2<double>::monomial(0, 1, 1.0, 6, 1.75);
    auto t = tu::random_series(6, 1.75);
    auto tc = ekw::compose(t, idx, idy);
    CHECK(tu::coeff_max_diff(t, tc) < 1e-14);
}

TEST_CASE("compose point-evaluation consistency") {
    for (int trial = 0; trial < 20; ++trial) {
        auto s = tu::random_series(10, 1.75, 0.5);
        auto a = tu::random_series(10, 1.75, 0.2);
        auto b = tu::random_series(10, 1.75, 0.2);
        a.at(0, 0) = 0.0; // keep images inside the disk at the truncation
        b.at(0, 0) = 0.0;
        auto c = ekw::compose(s, a, b);
        double x0 = tu::uniform(-0.04, 0.04), y0 = tu::uniform(-0.04, 0.04);
        double direct = ekw::eval(s, ekw::eval(a, x0, y0), ekw::eval(b, x0, y0));
        // remaining discrepancy is the degree-11+ truncation tail, O(0.04^11)
        CHECK(ekw::eval(c, x0, y0) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("compose divergence guard") {
    auto s = tu::random_series(10, 1.75);
    auto a = series2<double>::constant(50.0, 10, 1.75);
    auto b = series2<double>::constant(50.0, 10, 1.75);
    CHECK_THROWS_AS(ekw::compose(s, a, b, 1e6), ekw::numeric_error);
}

TEST_CASE("partial derivatives") {
    auto s = series2<double>::monomial(2, 1, 1.0, 5, 1.75);
    auto d1 = ekw::partial1(s);
    CHECK(d1.degree() == 4);
    CHECK(d1.at(1, 1) == 2.0);
    auto d2 = ekw::partial2(s);
    CHECK(d2.at(2, 0) == 1.0);

    auto t = tu::random_series(8, 1.75);
    double x0 = 0.3, y0 = -0.2, h = 1e-6;
    double fd1 = (ekw::eval(t, x0 + h, y0) - ekw::eval(t, x0 - h, y0)) / (2 * h);
    double fd2 = (ekw::eval(t, x0, y0 + h) - ekw::eval(t, x0, y0 - h)) / (2 * h);
    CHECK(ekw::eval(ekw::partial1(t), x0, y0) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(ekw::eval(ekw::partial2(t), x0, y0) == doctest::Approx(fd2).epsilon(1e-8));
}

TEST_CASE("eval basics and oracle") {
    series2<double> s(2, 1.75);
    s.at(1, 0) = 1.0;
    s.at(0, 1) = 1.0;
    CHECK(ekw::eval(s, 0.2, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
    series2<double> z(2, 1.75);
    CHECK(ekw::eval(z, 0.9, -0.9) == 0.0);

    for (int trial = 0; trial < 10; ++trial) {
        auto t = tu::random_series(7, 1.75);
        double x0 = tu::uniform(-1.0, 1.0), y0 = tu::uniform(-1.0, 1.0);
        double oracle = 0.0;
        for (int i = 7; i >= 0; --i)
            for (int j = 7 - i; j >= 0; --j) oracle += t.at(i, j) * std::pow(x0, i) * std::pow(y0, j);
        CHECK(ekw::eval(t, x0, y0) == doctest::Approx(oracle).epsilon(1e-14));
    }
}

TEST_CASE("eval out-of-radius flag") {
    auto s = tu::random_series(4, 1.75);
    bool oor = false;
    ekw::eval(s, 0.5, 0.5, &oor);
    CHECK(!oor);
    ekw::eval(s, 2.0, 0.0, &oor);
    CHECK(oor);
}

TEST_CASE("eval_grad matches partials") {
    auto s = tu::random_series(6, 1.75);
    auto [gx, gy] = ekw::eval_grad(s, 0.4, -0.3);
    CHECK(gx == doctest::Approx(ekw::eval(ekw::partial1(s), 0.4, -0.3)));
    CHECK(gy == doctest::Approx(ekw::eval(ekw::partial2(s), 0.4, -0.3)));
}

TEST_CASE("scale_args is evaluation at scaled arguments") {
    auto s = tu::random_series(6, 1.75);
    double lam = -0.25;
    auto sc = ekw::scale_args(s, lam);
    for (int trial = 0; trial < 5; ++trial) {
        double x0 = tu::uniform(-1, 1), y0 = tu::uniform(-1, 1);
        CHECK(ekw::eval(sc, x0, y0) == doctest::Approx(ekw::eval(s, lam * x0, lam * y0)).epsilon(1e-13));
    }
}

TEST_CASE("transpose swaps arguments") {
    auto s = tu::random_series(6, 1.75);
    auto t = ekw::transpose(s);
    CHECK(ekw::eval(t, 0.3, 0.7) == doctest::Approx(ekw::eval(s, 0.7, 0.3)).epsilon(1e-14));
}

TEST_CASE("reciprocal: s * (1/s) = 1 at the truncation") {
    auto s = tu::random_series(10, 1.75, 0.1);
    s.at(0, 0) = 1.3; // well away from zero
    auto w = ekw::reciprocal(s);
    auto prod = ekw::multiply(s, w);
    prod.at(0, 0) -= 1.0;
    CHECK(ekw::norm_rho(prod, 0.5) < 1e-12);

    series2<double> zero_const(4, 1.75);
    CHECK_THROWS_AS(ekw::reciprocal(zero_const), ekw::numeric_error);
}

TEST_CASE("compose_second/compose_first agree with general compose") {
    auto s = tu::random_series(8, 1.75);
    auto bsmall = tu::random_series(8, 1.75, 0.1);
    bsmall.at(0, 0) = 0.0;
    auto bp = ekw::powers(bsmall, 8);
    auto fast = ekw::compose_second(s, bp);
    auto idx = series2<double>::monomial(1, 0, 1.0, 8, 1.75);
    auto ref = ekw::compose(s, idx, bsmall);
    CHECK(tu::coeff_max_diff(fast, ref) < 1e-12);

    auto fast1 = ekw::compose_first(s, bp);
    auto idy = series2<double>::monomial(0, 1, 1.0, 8, 1.75);
    auto ref1 = ekw::compose(s, bsmall, idy);
    CHECK(tu::coeff_max_diff(fast1, ref1) < 1e-12);
}

TEST_CASE("powers sequence") {
    auto b = tu::random_series(6, 1.75, 0.3);
    auto bp = ekw::powers(b, 3);
    CHECK(bp[0].at(0, 0) == 1.0);
    CHECK(tu::coeff_max_diff(bp[2], ekw::multiply(b, b)) == 0.0);
    CHECK(tu::coeff_max_diff(bp[3], ekw::multiply(ekw::multiply(b, b), b)) < 1e-14);
}

TEST_CASE("dd-lane series smoke test") {
    using ekw::dd_real;
    series2<dd_real> s(4, 1.75);
    s.at(0, 0) = dd_real(1);
    s.at(1, 0) = dd_real(1) / dd_real(3);
    auto p = ekw::multiply(s, s);
    // (1 + x/3)^2 -> x coefficient 2/3 to dd accuracy
    dd_real err = p.at(1, 0) - dd_real(2) / dd_real(3);
    CHECK(std::fabs(ekw::to_double(err)) < 1e-30);
    CHECK(ekw::to_double(ekw::eval(s, dd_real(0.3), dd_real(0))) == doctest::Approx(1.1));
}
