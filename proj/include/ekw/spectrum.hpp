#pragma once
// Spectral analysis of the renormalization derivative at the fixed point:
// psi-basis matrix of the projected derivative, dense eigenvalues, product
// classification, reality-transition reports, and the psi^EKW direction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <lapacke.h>

#include "ekw/fixed_point.hpp"

namespace ekw {

// Matrix of Pi_N DR[s] Pi_N in the unit-normalized psi basis: column k holds
// the coordinates of DR psi~_k, rescaled as diag(n) J diag(n)^{-1} by the
// basis norms n. The operator itself is truncated at the record's degree;
// N only selects the projection block. The matrix is kept raw: the scaling
// root forces Z(lambda,0) = 1, so the normalization defect s(1,0) of any
// input is multiplied by exactly 1/mu, and the matrix is exactly
// block-triangular over that functional -- one gauge eigenvalue at 1/mu,
// stripped at report level, with the tangent spectrum untouched. Projecting
// columns instead would mix coefficient magnitudes across the grading and
// lose the small eigenvalues' relative accuracy.
template <class R>
inline Eigen::MatrixXd jacobian_matrix_at(const series2<R>& s, int degree, int N,
                                          const renorm_options& opt) {
    if (N > degree) throw config_error("jacobian_matrix: projection degree exceeds operator degree");
    auto idx = index_set(N);
    const int dim = int(idx.size());
    auto ws = make_workspace(s, opt);
    auto nrm = basis_norms(N, s.rho());
    Eigen::MatrixXd D(dim, dim);
    for (int c = 0; c < dim; ++c) {
        auto dir = psi_tilde<R>(idx[c].i, idx[c].j, s.rho(), degree);
        auto col = project_sym(d_renormalize(ws, dir), N);
        for (int r = 0; r < dim; ++r)
            D(r, c) = to_double(col[std::size_t(r)]) * nrm[std::size_t(r)] / nrm[std::size_t(c)];
    }
    return D;
}

inline Eigen::MatrixXd jacobian_matrix(const fixed_point_record& fp, int N) {
    renorm_options opt;
    return jacobian_matrix_at(fp.s, fp.degree, N, opt);
}

struct spectrum_entry {
    int rank = 0; // 1-based, sorted by modulus descending
    double re = 0.0, im = 0.0;
    bool tagged = false; // matches a product lambda^i mu^j
    int tag_i = 0, tag_j = 0;
};

struct spectrum_report {
    int n_proj = 0;
    std::vector<spectrum_entry> entries;
};

inline std::vector<std::complex<double>> eigenvalues_dense(Eigen::MatrixXd a) {
    const lapack_int n = lapack_int(a.rows());
    if (a.rows() != a.cols()) throw config_error("eigenvalues_dense: matrix not square");
    std::vector<double> wr(static_cast<std::size_t>(n));
    std::vector<double> wi(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                                    wi.data(), nullptr, 1, nullptr, 1);
    if (info > 0)
        throw numeric_error("dgeev: QR failed to converge, " + std::to_string(int(info)) +
                            " eigenvalues unresolved");
    if (info < 0) throw config_error("dgeev: invalid argument " + std::to_string(-int(info)));
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = {wr[k], wi[k]};
    std::sort(w.begin(), w.end(), [](const auto& p, const auto& q) {
        double ap = std::abs(p), aq = std::abs(q);
        if (ap != aq) return ap > aq;
        if (p.real() != q.real()) return p.real() > q.real();
        return p.imag() < q.imag();
    });
    return w;
}

inline spectrum_report eigen_spectrum(const Eigen::MatrixXd& d) {
    spectrum_report rep;
    auto w = eigenvalues_dense(d);
    rep.entries.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        rep.entries[k].rank = int(k) + 1;
        rep.entries[k].re = w[k].real();
        rep.entries[k].im = w[k].imag();
    }
    return rep;
}

// Removes the normalization-gauge eigenvalue. The defect s(1,0) is an exact
// left eigenvector of the raw matrix with eigenvalue 1/mu (see
// jacobian_matrix_at); that mode lives off the normalized manifold and is
// dropped before ranking. Exactly one match is required.
inline spectrum_report strip_gauge(spectrum_report rep, double mu, double tol_rel = 1e-6) {
    const double target = 1.0 / mu;
    std::vector<spectrum_entry> kept;
    kept.reserve(rep.entries.size());
    int hits = 0;
    for (const auto& e : rep.entries) {
        std::complex<double> z{e.re, e.im};
        if (std::abs(z - target) <= tol_rel * std::abs(target)) {
            ++hits;
            continue;
        }
        kept.push_back(e);
    }
    if (hits != 1)
        throw numeric_error("strip_gauge: expected exactly one eigenvalue at 1/mu, found " +
                            std::to_string(hits));
    for (std::size_t k = 0; k < kept.size(); ++k) kept[k].rank = int(k) + 1;
    rep.entries = std::move(kept);
    return rep;
}

// Tags eigenvalues matching lambda^i mu^j with i,j in [-1,40], i+j >= -1,
// relative tolerance tol_rel; ties resolved toward the smallest i+j.
inline spectrum_report classify_products(spectrum_report rep, double lambda, double mu,
                                         double tol_rel = 1e-3) {
    for (auto& e : rep.entries) {
        std::complex<double> z{e.re, e.im};
        double az = std::abs(z);
        if (az == 0.0) continue;
        bool found = false;
        int best_i = 0, best_j = 0;
        double best_rel = 0.0;
        for (int i = -1; i <= 40; ++i) {
            for (int j = -1; j <= 40; ++j) {
                if (i + j < -1) continue;
                double p = std::pow(lambda, i) * std::pow(mu, j);
                double rel = std::abs(z - p) / az;
                if (rel > tol_rel) continue;
                if (!found || i + j < best_i + best_j ||
                    (i + j == best_i + best_j && rel < best_rel)) {
                    found = true;
                    best_i = i;
                    best_j = j;
                    best_rel = rel;
                }
            }
        }
        e.tagged = found;
        e.tag_i = found ? best_i : 0;
        e.tag_j = found ? best_j : 0;
    }
    return rep;
}

// Ranked, gauge-stripped, product-tagged spectrum of one projection block.
inline spectrum_report spectrum_at(const fixed_point_record& fp, int n_proj) {
    auto rep = eigen_spectrum(jacobian_matrix(fp, n_proj));
    rep = classify_products(strip_gauge(std::move(rep), fp.mu), fp.lambda, fp.mu);
    rep.n_proj = n_proj;
    return rep;
}

// Projection sweep used for the reality-transition comparisons: one operator
// (the record's), a spectrum per requested projection degree.
inline std::vector<spectrum_report> reality_report(const fixed_point_record& fp,
                                                   const std::vector<int>& n_list) {
    std::vector<spectrum_report> out;
    out.reserve(n_list.size());
    for (int n : n_list) out.push_back(spectrum_at(fp, n));
    return out;
}

inline std::string spectrum_csv(const spectrum_report& rep) {
    std::string out = "rank,re,im,tag_i,tag_j\n";
    for (const auto& e : rep.entries) {
        out += std::to_string(e.rank) + "," + format_real(e.re) + "," + format_real(e.im) + ",";
        if (e.tagged)
            out += std::to_string(e.tag_i) + "," + std::to_string(e.tag_j);
        else
            out += ",";
        out += "\n";
    }
    return out;
}

// One-parameter family through s* transverse to the stable manifold:
// s_hat_eps(x,y) = s((1-e)x + e(1-e)^2 x^2, (1-e)y + e(1-e)^2 y^2)
//                  * (1 + 2e(1-e)y) / (1+e).
// The construction stays inside the symmetric subspace; the normalization
// defect it picks up is O(eps^2), so downstream scaling solves run ungated.
template <class R>
inline series2<R> s_hat(const series2<R>& s, double eps) {
    if (!(std::fabs(eps) <= 1e-3)) throw config_error("s_hat: |eps| exceeds the family gate 1e-3");
    const R e(eps);
    const R one(1.0);
    const int n = s.degree();
    series2<R> a(n, s.rho()), b(n, s.rho()), pre(n, s.rho());
    const R lin = one - e;
    const R quad = e * lin * lin;
    a.at(1, 0) = lin;
    if (n >= 2) a.at(2, 0) = quad;
    b.at(0, 1) = lin;
    if (n >= 2) b.at(0, 2) = quad;
    pre.at(0, 0) = one;
    pre.at(0, 1) = R(2.0) * e * lin;
    auto out = compose(s, a, b) * pre;
    out *= one / (one + e);
    if (symmetry_residual(out) > 1e-12)
        throw numeric_error("s_hat: family member left the symmetric subspace");
    return out;
}

struct eigvec_record {
    series2<double> psi{0, 1.75};
    double norm = 0.0;
};

// psi^EKW = d/de s_hat_eps at eps = 0: central differences at eps = 1e-6
// Richardson-combined, (4 D(eps/2) - D(eps)) / 3.
inline eigvec_record psi_vector(const fixed_point_record& fp, double eps = 1e-6) {
    auto quotient = [&](double e) {
        return (1.0 / (2.0 * e)) * (s_hat(fp.s, e) - s_hat(fp.s, -e));
    };
    auto d1 = quotient(eps);
    auto d2 = quotient(eps / 2);
    eigvec_record rec;
    rec.psi = (1.0 / 3.0) * (4.0 * d2 - d1);
    rec.norm = to_double(norm_rho(rec.psi));
    return rec;
}

// Exact eps-derivative of the family, for cross-checking the quotient path:
// psi = (x^2 - x) s_1 + (y^2 - y) s_2 + (2y - 1) s.
template <class R>
inline series2<R> psi_vector_exact(const series2<R>& s) {
    const int n = s.degree();
    series2<R> fx(n, s.rho()), fy(n, s.rho()), g(n, s.rho());
    fx.at(1, 0) = R(-1.0);
    if (n >= 2) fx.at(2, 0) = R(1.0);
    fy.at(0, 1) = R(-1.0);
    if (n >= 2) fy.at(0, 2) = R(1.0);
    g.at(0, 0) = R(-1.0);
    g.at(0, 1) = R(2.0);
    return partial1(s).with_degree(n) * fx + partial2(s).with_degree(n) * fy + s * g;
}

} // namespace ekw
