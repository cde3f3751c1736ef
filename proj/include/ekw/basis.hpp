#pragma once

#include <utility>
#include <vector>

#include "ekw/errors.hpp"
#include "ekw/series.hpp"

namespace ekw {

// Symmetric subspace: s with s_1(x,y) = s_1(y,x), i.e. coefficient relation
// (i+1) c_{i+1,j} = (j+1) c_{j+1,i}.  Represented by the same storage type;
// the invariant is asserted where it matters.
template <class R>
using sym_series2 = series2<R>;

template <class R>
double symmetry_residual(const series2<R>& s) {
    auto s1 = partial1(s);
    return to_double(norm_rho(s1 - transpose(s1)));
}

// Index family I_N = {(i,j): i >= -1, j >= max(0,i), i+j < N}, enumerated
// i ascending then j ascending; k is 1-based with k(-1,0)=1.
struct basis_index {
    int i;
    int j;
};

inline bool index_valid(int i, int j, int n) {
    return i >= -1 && j >= (i > 0 ? i : 0) && i + j < n;
}

inline std::vector<basis_index> index_set(int n) {
    std::vector<basis_index> v;
    for (int i = -1; i < n; ++i)
        for (int j = (i > 0 ? i : 0); i + j < n; ++j) v.push_back({i, j});
    return v;
}

inline int basis_dim(int n) {
    // (N+1) entries for i=-1, then rows of length N-2i for 0 <= i <= (N-1)/2
    int d = n + 1;
    for (int i = 0; n - 2 * i >= 1; ++i) d += n - 2 * i;
    return d;
}

inline int index_map(int i, int j, int n) {
    if (!index_valid(i, j, n)) throw config_error("index_map: pair outside I_N");
    if (i == -1) return j + 1;
    return (n + 1) + i * (n - i + 1) + (j - i) + 1;
}

inline basis_index inverse_index(int k, int n) {
    if (k < 1 || k > basis_dim(n)) throw config_error("inverse_index: k outside 1..D(N)");
    if (k <= n + 1) return {-1, k - 1};
    int rem = k - (n + 1);
    for (int i = 0;; ++i) {
        int row = n - 2 * i;
        if (rem <= row) return {i, i + rem - 1};
        rem -= row;
    }
}

// Unnormalized basis element: psi~_{-1,j} = y^j;
// psi~_{i,j} = x^{i+1} y^j + ((i+1)/(j+1)) x^{j+1} y^i  (i >= 0).
template <class R>
sym_series2<R> psi_tilde(int i, int j, double rho, int degree) {
    if (i < -1 || j < (i > 0 ? i : 0)) throw config_error("psi_tilde: invalid index pair");
    series2<R> s(degree, rho);
    if (i == -1) {
        s.at(0, j) = R(1);
    } else {
        s.at(i + 1, j) += R(1);
        s.at(j + 1, i) += R(i + 1) / R(j + 1);
    }
    return s;
}

inline double psi_tilde_norm(int i, int j, double rho) {
    if (i == -1) return pow_int(rho, j);
    return pow_int(rho, i + j + 1) * (1.0 + double(i + 1) / double(j + 1));
}

template <class R>
sym_series2<R> basis_vector(int i, int j, double rho, int degree) {
    auto s = psi_tilde<R>(i, j, rho, degree);
    s *= R(1.0 / psi_tilde_norm(i, j, rho));
    return s;
}

// Coordinates of the symmetric series s in the psi~ basis (1-based k -> v[k-1]):
// t_{-1,j} = c_{0,j}; t_{i,j} = c_{i+1,j} for i < j; t_{i,i} = c_{i+1,i}/2.
template <class R>
std::vector<R> project_sym(const series2<R>& s, int n) {
    if (n > s.degree()) throw config_error("project_sym: N exceeds series degree");
    auto idx = index_set(n);
    std::vector<R> v(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        auto [i, j] = idx[k];
        if (i == -1) v[k] = s.at(0, j);
        else if (i == j) v[k] = s.at(i + 1, i) / R(2);
        else v[k] = s.at(i + 1, j);
    }
    return v;
}

template <class R>
sym_series2<R> embed_sym(const std::vector<R>& v, int n, int degree, double rho) {
    auto idx = index_set(n);
    if (v.size() != idx.size()) throw config_error("embed_sym: coordinate count != D(N)");
    series2<R> s(degree, rho);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        auto [i, j] = idx[k];
        if (i == -1) {
            s.at(0, j) += v[k];
        } else {
            s.at(i + 1, j) += v[k];
            s.at(j + 1, i) += v[k] * R(i + 1) / R(j + 1);
        }
    }
    return s;
}

// Unit-norm basis norms for the psi-basis similarity scaling.
inline std::vector<double> basis_norms(int n, double rho) {
    auto idx = index_set(n);
    std::vector<double> v(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) v[k] = psi_tilde_norm(idx[k].i, idx[k].j, rho);
    return v;
}

} // namespace ekw
