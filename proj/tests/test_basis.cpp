#include <cmath>

#include "doctest.h"
#include "ekw/basis.hpp"
#include "helpers.hpp"

using ekw::series2;
namespace tu = ekw::testutil;

TEST_CASE("index_map anchors at N=20") {
    CHECK(ekw::index_map(-1, 0, 20) == 1);
    CHECK(ekw::index_map(-1, 1, 20) == 2);
    CHECK(ekw::index_map(-1, 20, 20) == 21);
    CHECK(ekw::index_map(0, 0, 20) == 22);
}

TEST_CASE("dimension equals brute-force count") {
    for (int n : {10, 15, 20, 25}) {
        int count = 0;
        for (int i = -1; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                if (j >= std::max(0, i) && i + j < n) ++count;
        CHECK(ekw::basis_dim(n) == count);
        CHECK(int(ekw::index_set(n).size()) == count);
    }
    CHECK(ekw::basis_dim(10) == 41);
    CHECK(ekw::basis_dim(15) == 80);
    CHECK(ekw::basis_dim(20) == 131);
    CHECK(ekw::basis_dim(25) == 195);
}

TEST_CASE("index_map bijection") {
    for (int n : {10, 15, 20, 25}) {
        auto idx = ekw::index_set(n);
        for (std::size_t k0 = 0; k0 < idx.size(); ++k0) {
            int k = ekw::index_map(idx[k0].i, idx[k0].j, n);
            CHECK(k == int(k0) + 1);
            auto back = ekw::inverse_index(k, n);
            CHECK(back.i == idx[k0].i);
            CHECK(back.j == idx[k0].j);
        }
    }
    CHECK_THROWS_AS(ekw::index_map(5, 3, 20), ekw::config_error);  // j < i
    CHECK_THROWS_AS(ekw::index_map(10, 10, 20), ekw::config_error); // i+j >= N
    CHECK_THROWS_AS(ekw::inverse_index(0, 20), ekw::config_error);
    CHECK_THROWS_AS(ekw::inverse_index(132, 20), ekw::config_error);
}

TEST_CASE("psi_tilde concrete expansions") {
    auto p0 = ekw::psi_tilde<double>(-1, 0, 1.75, 6);
    CHECK(p0.at(0, 0) == 1.0);
    CHECK(ekw::norm_rho(p0) == 1.0);

    // psi~_{0,1} = x y + (1/2) x^2; norm at 1.75 is 1.75^2 * (1 + 1/2)
    auto p01 = ekw::psi_tilde<double>(0, 1, 1.75, 6);
    CHECK(p01.at(1, 1) == 1.0);
    CHECK(p01.at(2, 0) == 0.5);
    CHECK(ekw::norm_rho(p01) == doctest::Approx(4.59375).epsilon(1e-15));
    CHECK(ekw::psi_tilde_norm(0, 1, 1.75) == doctest::Approx(4.59375).epsilon(1e-15));

    // diagonal case folds both terms onto one monomial
    auto p11 = ekw::psi_tilde<double>(1, 1, 1.75, 6);
    CHECK(p11.at(2, 1) == 2.0);
}

TEST_CASE("basis vectors are unit norm and symmetric") {
    for (auto [i, j] : ekw::index_set(20)) {
        auto v = ekw::basis_vector<double>(i, j, 1.75, 21);
        CHECK(ekw::norm_rho(v) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(ekw::symmetry_residual(v) < 1e-13);
    }
}

TEST_CASE("psi_tilde_norm matches norm_rho for every index") {
    for (auto [i, j] : ekw::index_set(15)) {
        auto v = ekw::psi_tilde<double>(i, j, 1.75, 16);
        CHECK(ekw::norm_rho(v) == doctest::Approx(ekw::psi_tilde_norm(i, j, 1.75)).epsilon(1e-13));
    }
}

TEST_CASE("project/embed roundtrip on coordinates") {
    int n = 12, deg = 14;
    auto idx = ekw::index_set(n);
    std::vector<double> v(idx.size());
    for (auto& t : v) t = tu::uniform(-1, 1);
    auto s = ekw::embed_sym(v, n, deg, 1.75);
    CHECK(ekw::symmetry_residual(s) < 1e-12);
    auto w = ekw::project_sym(s, n);
    REQUIRE(w.size() == v.size());
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(w[k] == doctest::Approx(v[k]).epsilon(1e-14));
}

TEST_CASE("embed(project(s)) reproduces a symmetric series") {
    // build a symmetric series supported on monomial degrees < N via random coords
    int n = 10, deg = 12;
    auto idx = ekw::index_set(n);
    std::vector<double> v(idx.size());
    for (auto& t : v) t = tu::uniform(-1, 1);
    auto s = ekw::embed_sym(v, n, deg, 1.75);
    auto s2 = ekw::embed_sym(ekw::project_sym(s, n), n, deg, 1.75);
    CHECK(tu::coeff_max_diff(s, s2) < 1e-14);
}

TEST_CASE("embed respects the coefficient symmetry invariant") {
    auto idx = ekw::index_set(8);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        std::vector<double> e(idx.size(), 0.0);
        e[k] = 1.0;
        auto s = ekw::embed_sym(e, 8, 10, 1.75);
        for (int i = 0; i + 1 <= 10; ++i)
            for (int j = 0; i + 1 + j <= 10; ++j) {
                double lhs = (i + 1) * s.get(i + 1, j);
                double rhs = (j + 1) * s.get(j + 1, i);
                CHECK(std::fabs(lhs - rhs) < 1e-13);
            }
    }
}

TEST_CASE("basis_norms vector") {
    auto norms = ekw::basis_norms(20, 1.75);
    auto idx = ekw::index_set(20);
    REQUIRE(norms.size() == idx.size());
    CHECK(norms[0] == 1.0); // psi~_{-1,0} = 1
    CHECK(norms[ekw::index_map(0, 1, 20) - 1] == doctest::Approx(4.59375));
}
