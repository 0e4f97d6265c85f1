#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <string>

#include "classo/errors.hpp"
#include "classo/random.hpp"

namespace classo {

enum class Ensemble { Gaussian, Iro, PartialDct, PartialHadamard };
enum class Scaling { RowsOrthonormal, RowsNormSqrtN };

inline const char* ensemble_name(Ensemble e) {
    switch (e) {
        case Ensemble::Gaussian: return "gaussian";
        case Ensemble::Iro: return "iro";
        case Ensemble::PartialDct: return "pdct";
        case Ensemble::PartialHadamard: return "phadamard";
    }
    return "?";
}

// Dense m x n measurement matrix with its ensemble tag and scaling convention.
// Orthogonal ensembles satisfy A A^T = I_m (RowsOrthonormal) or A A^T = n I_m
// (RowsNormSqrtN); the Gaussian ensemble records its entry variance instead.
struct MeasurementMatrix {
    Eigen::MatrixXd A;
    Ensemble ensemble;
    Scaling scaling = Scaling::RowsOrthonormal;
    double variance = 0.0;  // Gaussian only

    int m() const { return static_cast<int>(A.rows()); }
    int n() const { return static_cast<int>(A.cols()); }
};

namespace detail {

inline void check_dims(int m, int n) {
    if (m <= 0 || n <= 0 || m > n)
        throw SpecError("ensemble dims: need 0 < m <= n, got m=" + std::to_string(m) +
                        " n=" + std::to_string(n));
}

inline double max_gram_deviation(const Eigen::MatrixXd& A) {
    Eigen::MatrixXd G = A * A.transpose();
    G.diagonal().array() -= 1.0;
    return G.cwiseAbs().maxCoeff();
}

// Optional column sign flips for the structured ensembles; documented
// extension beyond plain row sampling, off by default.
inline void flip_column_signs(Eigen::MatrixXd& A, RandomStream& stream) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j) *= stream.sign();
}

}  // namespace detail

inline Eigen::VectorXd gen_noise(int m, RandomStream& stream) {
    if (m < 1) throw SpecError("gen_noise: m must be positive");
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = stream.gaussian();
    return v;
}

inline MeasurementMatrix gen_gaussian(int m, int n, double variance, RandomStream& stream) {
    detail::check_dims(m, n);
    if (!(variance > 0.0)) throw SpecError("gen_gaussian: variance must be positive");
    MeasurementMatrix M;
    M.ensemble = Ensemble::Gaussian;
    M.variance = variance;
    M.A.resize(m, n);
    const double sd = std::sqrt(variance);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M.A(i, j) = sd * stream.gaussian();
    return M;
}

// Isotropically random orthogonal matrix A = (G G^T)^{-1/2} G with G i.i.d.
// standard normal; the symmetric inverse square root comes from the
// eigendecomposition of G G^T. The output is checked to satisfy
// A A^T = I_m entrywise within 1e-10.
inline MeasurementMatrix gen_iro(int m, int n, RandomStream& stream) {
    detail::check_dims(m, n);
    Eigen::MatrixXd G(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = stream.gaussian();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G * G.transpose());
    if (eig.info() != Eigen::Success) throw NumericalError("gen_iro: eigendecomposition failed");
    const Eigen::VectorXd& lam = eig.eigenvalues();
    double lam_max = lam[m - 1];
    if (!(lam[0] > 1e-12 * lam_max))
        throw NumericalError("gen_iro: degenerate Gaussian draw (rank-deficient G)");
    MeasurementMatrix M;
    M.ensemble = Ensemble::Iro;
    M.A = eig.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
          eig.eigenvectors().transpose() * G;
    if (detail::max_gram_deviation(M.A) > 1e-10)
        throw NumericalError("gen_iro: A A^T deviates from identity beyond 1e-10");
    return M;
}

// m distinct rows (uniform without replacement) of the n x n orthonormal
// DCT-II matrix D[j,i] = c_j cos(pi (2i+1) j / (2n)), c_0 = sqrt(1/n),
// c_j = sqrt(2/n) otherwise. Direct O(n^2) evaluation.
inline MeasurementMatrix gen_partial_dct(int m, int n, RandomStream& stream,
                                         bool col_sign_flips = false) {
    detail::check_dims(m, n);
    std::vector<int> rows = stream.sample_without_replacement(n, m);
    MeasurementMatrix M;
    M.ensemble = Ensemble::PartialDct;
    M.A.resize(m, n);
    const double pi = 3.14159265358979323846264338328;
    const double c0 = std::sqrt(1.0 / n);
    const double cj = std::sqrt(2.0 / n);
    for (int r = 0; r < m; ++r) {
        int j = rows[static_cast<std::size_t>(r)];
        double c = (j == 0) ? c0 : cj;
        for (int i = 0; i < n; ++i)
            M.A(r, i) = c * std::cos(pi * (2.0 * i + 1.0) * j / (2.0 * n));
    }
    if (col_sign_flips) detail::flip_column_signs(M.A, stream);
    return M;
}

// m distinct rows of the Sylvester Hadamard matrix scaled by 1/sqrt(n);
// H[i,j] = (-1)^popcount(i & j). Requires n a power of two.
inline MeasurementMatrix gen_partial_hadamard(int m, int n, RandomStream& stream,
                                              bool col_sign_flips = false) {
    detail::check_dims(m, n);
    if ((n & (n - 1)) != 0) throw SpecError("gen_partial_hadamard: n must be a power of two");
    std::vector<int> rows = stream.sample_without_replacement(n, m);
    MeasurementMatrix M;
    M.ensemble = Ensemble::PartialHadamard;
    M.A.resize(m, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < m; ++r) {
        unsigned i = static_cast<unsigned>(rows[static_cast<std::size_t>(r)]);
        for (int j = 0; j < n; ++j) {
            int bits = std::popcount(i & static_cast<unsigned>(j));
            M.A(r, j) = (bits & 1) ? -scale : scale;
        }
    }
    if (col_sign_flips) detail::flip_column_signs(M.A, stream);
    return M;
}

// Convert an orthogonal-ensemble matrix from A A^T = I_m to A A^T = n I_m by
// multiplying every entry by exactly sqrt(n).
inline MeasurementMatrix to_rows_norm_sqrt_n(MeasurementMatrix M) {
    if (M.ensemble == Ensemble::Gaussian)
        throw SpecError("to_rows_norm_sqrt_n: scaling conversion applies to orthogonal ensembles");
    if (M.scaling == Scaling::RowsNormSqrtN) return M;
    M.A *= std::sqrt(static_cast<double>(M.n()));
    M.scaling = Scaling::RowsNormSqrtN;
    return M;
}

}  // namespace classo
