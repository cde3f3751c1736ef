#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include <ekw/cocycle.hpp>

#include "fixture.hpp"
#include "helpers.hpp"

using namespace ekw;

namespace {

const fixed_point_record& rec() { return testutil::fp40(); }

double angle_gap(double a, double b) {
    double d = std::fabs(a - b);
    return std::min(d, two_pi_v - d);
}

} // namespace

TEST_CASE("angle helpers") {
    CHECK(vec_angle({1.0, 0.0}) == 0.0);
    CHECK(vec_angle({0.0, 1.0}) == doctest::Approx(1.5707963267948966).epsilon(1e-15));
    CHECK(vec_angle({-1.0, 0.0}) == doctest::Approx(3.141592653589793).epsilon(1e-15));
    double a = vec_angle({1.0, -1e-9});
    CHECK(a < two_pi_v);
    CHECK(a > 6.28);
    CHECK_THROWS_AS(vec_angle({0.0, 0.0}), numeric_error);

    for (double t : {0.0, 0.3, 2.0, 4.4}) {
        CHECK(eval_angle_fn(angle_fn::one, t) == 1.0);
        CHECK(eval_angle_fn(angle_fn::sin2, t) + eval_angle_fn(angle_fn::cos2, t) ==
              doctest::Approx(1.0).epsilon(1e-15));
        double c = std::cos(t);
        CHECK(eval_angle_fn(angle_fn::cos4, t) == doctest::Approx(c * c * c * c).epsilon(1e-15));
    }
    CHECK(angle_fn_of("sin2") == angle_fn::sin2);
    CHECK(angle_fn_of("1") == angle_fn::one);
    CHECK(angle_fn_tag(angle_fn::cos4) == std::string("cos4"));
    CHECK_THROWS_AS(angle_fn_of("tan"), config_error);
}

TEST_CASE("direction fields: twist relation and time reversal") {
    const auto& r = rec();
    auto orb10 = periodic_orbit_of(r, 10);
    auto orb11 = periodic_orbit_of(r, 11);
    auto hp = hyperbolic_fixed_point(make_twist_map(r));
    auto f10 = direction_field(orb10, hp, true);
    auto f11 = direction_field(orb11, hp, true);
    REQUIRE(f10.angles.size() == 1024);
    REQUIRE(f11.angles.size() == 2048);
    for (double a : f11.angles) {
        CHECK(a >= 0.0);
        CHECK(a < two_pi_v);
    }
    // prepend-0: tan a_{0w} = (mu/lambda) tan a_w, realized angle-exactly
    double worst = 0.0;
    for (std::size_t k = 0; k < f10.angles.size(); ++k) {
        double expected = prepend0_angle(f10.angles[k], r.lambda, r.mu);
        worst = std::max(worst, angle_gap(expected, f11.angles[2 * k]));
    }
    CHECK(worst < 1e-10);
    // the tan form itself, away from the poles
    for (std::size_t k = 0; k < f10.angles.size(); ++k) {
        double ta = std::tan(f10.angles[k]);
        if (std::fabs(ta) > 5.0) continue;
        CHECK(std::tan(f11.angles[2 * k]) ==
              doctest::Approx(r.mu / r.lambda * ta).epsilon(1e-8));
    }
    // u-field is the T-image of the s-field on the all-zeros word
    auto u10 = direction_field(orb10, hp, false);
    CHECK(angle_gap(u10.angles[0], two_pi_v - f10.angles[0]) < 1e-10);
}

TEST_CASE("histogram: mass, peaks of O_12, pushforward consistency") {
    const auto& r = rec();
    auto f12 = direction_field(r, 12, true);
    auto h = make_histogram(f12, 1000);
    CHECK(h.n == 12);
    CHECK(h.bins == 1000);
    REQUIRE(h.counts.size() == 1000);
    double mass = std::accumulate(h.counts.begin(), h.counts.end(), 0.0);
    CHECK(std::fabs(mass - 1.0) < 1e-15);

    // two dominant peaks at 0 and pi: the density peaks exactly AT the two
    // angles, so each straddles a bin edge ({999,0} and {499,500}); the
    // wrap-merged windows dominate every other 2-bin window (measured 2.0x)
    auto pair_mass = [&](std::size_t i) {
        return h.counts[i] + h.counts[(i + 1) % h.counts.size()];
    };
    double peak0 = pair_mass(999), peak_pi = pair_mass(499);
    double best_other = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (i >= 997 || i <= 1 || (i >= 497 && i <= 501)) continue;
        best_other = std::max(best_other, pair_mass(i));
    }
    CHECK(std::min(peak0, peak_pi) > 1.4 * best_other);
    // the four top bins are exactly the two straddled peaks
    std::vector<std::size_t> idx(h.counts.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return h.counts[a] > h.counts[b]; });
    std::vector<std::size_t> top4(idx.begin(), idx.begin() + 4);
    std::sort(top4.begin(), top4.end());
    CHECK(top4 == std::vector<std::size_t>{0, 499, 500, 999});

    // pushing O_11 angles through the twist relation reproduces the
    // 0-prefixed half of O_12 (as sorted multisets)
    auto f11 = direction_field(r, 11, true);
    std::vector<double> pushed(f11.angles.size());
    for (std::size_t k = 0; k < f11.angles.size(); ++k)
        pushed[k] = prepend0_angle(f11.angles[k], r.lambda, r.mu);
    std::vector<double> even_half(f11.angles.size());
    for (std::size_t k = 0; k < even_half.size(); ++k) even_half[k] = f12.angles[2 * k];
    std::sort(pushed.begin(), pushed.end());
    std::sort(even_half.begin(), even_half.end());
    double worst = 0.0;
    for (std::size_t k = 0; k < pushed.size(); ++k)
        worst = std::max(worst, angle_gap(pushed[k], even_half[k]));
    CHECK(worst < 1e-10);

    auto csv = histogram_csv(make_histogram(f11, 8));
    CHECK(csv.rfind("bin_center,count\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

    CHECK_THROWS_AS(make_histogram(f11, 0), config_error);
}

TEST_CASE("measure_average: trivial and analytic values") {
    angle_histogram uni;
    uni.n = 0;
    uni.bins = 1000;
    uni.counts.assign(1000, 1e-3);
    CHECK(measure_average(uni, angle_fn::one) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(measure_average(uni, angle_fn::sin2) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(measure_average(uni, angle_fn::cos4) == doctest::Approx(0.375).epsilon(1e-6));

    const auto& r = rec();
    auto f12 = direction_field(r, 12, true);
    double r5000 = measure_average(make_histogram(f12, 5000), angle_fn::sin2);
    double r15000 = measure_average(make_histogram(f12, 15000), angle_fn::sin2);
    CHECK(std::fabs(r5000 - r15000) < 5e-3); // stabilizes in the bin count
}

TEST_CASE("birkhoff averages: identities and cocycle associativity") {
    const auto& r = rec();
    auto m = make_twist_map(r);
    CHECK(birkhoff_run(m, angle_fn::one, 1000, {1.0, 0.0}).average == 1.0);
    double s2 = birkhoff_run(m, angle_fn::sin2, 500, {1.0, 0.0}).average;
    double c2 = birkhoff_run(m, angle_fn::cos2, 500, {1.0, 0.0}).average;
    CHECK(s2 + c2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s2 > 0.0);
    CHECK(s2 < 1.0);

    // stepwise-renormalized direction equals the direct DF^i product direction
    vec2<double> v0{1.0, 0.0};
    for (int steps : {5, 17, 30}) {
        auto bk = birkhoff_run(m, angle_fn::one, steps, v0);
        mat2<double> prod = mat2<double>::identity();
        map_point<double> x{0.0, 0.0};
        for (int i = 0; i < steps; ++i) {
            auto st = apply_map_jac(m, x);
            prod = st.jac * prod;
            x = st.image;
        }
        vec2<double> w = prod * v0;
        w = (1.0 / norm2(w)) * w;
        CHECK(angle_gap(vec_angle(w), vec_angle(bk.v_final)) < 1e-10);
    }

    CHECK_THROWS_AS(birkhoff_run(m, angle_fn::one, 0, {1.0, 0.0}), config_error);
    CHECK_THROWS_AS(birkhoff_run(m, angle_fn::one, 10, {0.0, 0.0}), config_error);
}

TEST_CASE("lyapunov exponent of the stable-set orbit is near zero") {
    const auto& r = rec();
    double chi_2k = lyapunov_estimate(r, 2000, {1.0, 0.0});
    double chi_20k = lyapunov_estimate(r, 20000, {1.0, 0.0});
    CHECK(std::fabs(chi_20k) < 0.01);
    CHECK(std::fabs(chi_20k) < std::fabs(chi_2k));
    double chi_20k_v2 = lyapunov_estimate(r, 20000, {0.0, 1.0});
    CHECK(std::fabs(chi_20k - chi_20k_v2) < 0.01);
}

TEST_CASE("ergodic comparison: pinned entry, trend, and the suite") {
    const auto& r = rec();
    auto rep = ergodic_compare(r, angle_fn::sin2, 20000, {1.0, 0.0}, 12, 1000);
    CHECK(rep.f_tag == "sin2");
    CHECK(rep.m_iters == 20000);
    CHECK(rep.n == 12);
    CHECK(rep.bins == 1000);
    CHECK(std::isfinite(rep.left));
    CHECK(std::isfinite(rep.right));
    CHECK(rep.rel_diff >= 0.0);
    CHECK(rep.rel_diff > 2.5767e-3 / 3.0);
    CHECK(rep.rel_diff < 2.5767e-3 * 3.0);

    auto suite = make_cocycle_suite(r, 20000, {12, 14}, {1000, 5000},
                                    {{angle_fn::sin2, {1.0, 0.0}}, {angle_fn::cos4, {0.0, 1.0}}});
    REQUIRE(suite.size() == 2);
    for (const auto& t : suite) {
        REQUIRE(t.rel_diff.size() == 2);
        REQUIRE(t.rel_diff[0].size() == 2);
        // paper trend: the relative difference decays with the orbit level
        CHECK(t.rel_diff[1][0] < t.rel_diff[0][0]);
        for (const auto& row : t.rel_diff)
            for (double v : row) {
                CHECK(v >= 0.0);
                CHECK(v < 0.05);
            }
    }
    // the single-report path agrees with the suite
    CHECK(suite[0].rel_diff[0][0] == doctest::Approx(rep.rel_diff).epsilon(1e-12));

    auto csv = ergodic_table_csv(suite[0]);
    CHECK(csv.rfind("f=sin2 v=(", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    CHECK_THROWS_AS(make_cocycle_suite(r, 100, {}, {100}, {{angle_fn::sin2, {1.0, 0.0}}}),
                    config_error);
}
