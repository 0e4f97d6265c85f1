#pragma once

#include <cmath>
#include <string>

#include "classo/ensembles.hpp"
#include "classo/errors.hpp"
#include "classo/numeric.hpp"

namespace classo {

// Dimensions plus the operational omega^2 for the closed-form predictors.
// convention selects the scaling the returned NSE refers to: RowsOrthonormal
// means A A^T = I_m (Gaussian comparisons use the matching E[A A^T] = I_m,
// i.e. variance-1/n, convention); RowsNormSqrtN means A A^T = n I_m
// (variance-1 Gaussian), which divides the NSE by n.
struct ProblemDims {
    int n;
    int m;
    double omega_sq;
    Scaling convention = Scaling::RowsOrthonormal;
};

inline void check_nse_dims(const ProblemDims& d) {
    if (!(d.omega_sq > 0.0)) throw SpecError("predictions: omega_sq must be positive");
    if (!(d.m < d.n)) throw SpecError("predictions: need m < n");
    if (!(d.omega_sq < d.m))
        throw SpecError("predictions: pole at omega_sq >= m (NSE diverges as m -> omega_sq)");
}

// Asymptotic NSE of the row-orthonormal ensemble:
// omega^2 (n - omega^2) / (m - omega^2); divided by n under RowsNormSqrtN.
inline double nse_iro(const ProblemDims& d) {
    check_nse_dims(d);
    double v = d.omega_sq * (d.n - d.omega_sq) / (d.m - d.omega_sq);
    return d.convention == Scaling::RowsOrthonormal ? v : v / d.n;
}

// Asymptotic NSE of the Gaussian ensemble: n omega^2 / (m - omega^2) under
// the E[A A^T] = I_m convention; omega^2 / (m - omega^2) for variance-1
// entries (RowsNormSqrtN-comparable).
inline double nse_gaussian(const ProblemDims& d) {
    check_nse_dims(d);
    double v = d.omega_sq / (d.m - d.omega_sq);
    return d.convention == Scaling::RowsOrthonormal ? v * d.n : v;
}

// nse_iro / nse_gaussian = (n - omega^2) / n regardless of convention.
inline double nse_ratio_iro_gaussian(const ProblemDims& d) {
    check_nse_dims(d);
    return (d.n - d.omega_sq) / d.n;
}

struct AOSaddle {
    double beta_sq;
    double t;
    double value;
};

// Scalar auxiliary objective whose saddle encodes the orthogonal-ensemble
// error: d(beta, t) = t + beta^2 (m - t) n / (beta^2 m + t)
//                     - (t^2 + beta^2 m^2) omega^2 / (m (beta^2 m + t)),
// parameterized by beta_sq = beta^2 (it depends on beta only through beta^2).
inline double ao_objective(int n, int m, double omega_sq, double beta_sq, double t) {
    double denom = beta_sq * m + t;
    if (!(denom > 0.0)) throw SpecError("ao_objective: beta_sq m + t must be positive");
    return t + beta_sq * (m - t) * n / denom - (t * t + beta_sq * m * m) * omega_sq / (m * denom);
}

// Closed-form saddle of ao_objective: beta^2 = (m - omega^2)/(n - m), t = m,
// value m - omega^2.
inline AOSaddle ao_saddle_closed_form(int n, int m, double omega_sq) {
    if (!(omega_sq > 0.0 && omega_sq < m && m < n))
        throw SpecError("ao_saddle: need 0 < omega_sq < m < n");
    return {(m - omega_sq) / (n - m), static_cast<double>(m), m - omega_sq};
}

// Numeric saddle: outer max over beta^2 on [0, B], inner min over t on [0, T],
// with B, T ten times the closed-form values; nested golden-section (the
// objective is convex in t for fixed beta and unimodal in beta^2 after the
// inner minimization). A saddle landing on the box boundary raises an error
// (bracket too small).
inline AOSaddle ao_saddle_numeric(int n, int m, double omega_sq) {
    AOSaddle cf = ao_saddle_closed_form(n, m, omega_sq);
    const double B = 10.0 * cf.beta_sq;
    const double T = 10.0 * cf.t;
    auto inner_arg = [&](double bsq) {
        return golden_section_min([&](double t) { return ao_objective(n, m, omega_sq, bsq, t); },
                                  0.0, T, T * 1e-12);
    };
    ScalarMinimum outer = golden_section_max([&](double bsq) { return inner_arg(bsq).value; }, 0.0,
                                             B, B * 1e-12);
    ScalarMinimum inner = inner_arg(outer.arg);
    if (outer.arg > 0.999 * B || inner.arg > 0.999 * T)
        throw NumericalError("ao_saddle_numeric: saddle on the search boundary");
    return {outer.arg, inner.arg, outer.value};
}

// Squared error reconstructed from the auxiliary saddle:
// ||w~||^2 = (t^2 + beta^2 m^2) omega^2 / m^2, via sigma_f = beta
// sqrt(t^2 + beta^2 m^2)/(beta^2 m + t) and ||w~|| = (beta^2 m + t) sigma_f
// omega / (beta m). At the closed-form saddle this equals
// omega^2 (1 + beta^2) = omega^2 (n - omega^2)/(n - m), which matches the
// row-orthonormal NSE formula only when n - m = m - omega^2; see
// ao_consistency_report.
inline double ao_reconstruct_nse(const AOSaddle& saddle, int n, int m, double omega_sq) {
    (void)n;
    if (!(saddle.beta_sq > 0.0)) throw SpecError("ao_reconstruct_nse: beta must be positive");
    double t = saddle.t;
    return (t * t + saddle.beta_sq * m * m) * omega_sq / (static_cast<double>(m) * m);
}

// Diagnostic pairing the two candidate limits: the reconstruction above and
// the normative NSE formula. They agree only when n - m = m - omega^2; the
// report surfaces both rather than choosing.
struct AoConsistencyReport {
    double ao_value;
    double theorem_value;
    double abs_gap;
    bool consistent;  // |gap| below 1e-9 * max(1, values)
};

inline AoConsistencyReport ao_consistency_report(int n, int m, double omega_sq) {
    AOSaddle s = ao_saddle_closed_form(n, m, omega_sq);
    double ao = ao_reconstruct_nse(s, n, m, omega_sq);
    double thm = nse_iro({n, m, omega_sq, Scaling::RowsOrthonormal});
    double gap = std::abs(ao - thm);
    return {ao, thm, gap, gap <= 1e-9 * std::max({1.0, ao, thm})};
}

// Parsing of the middle factor of chi in the orthogonal mCSV bound.
// AsPrinted reads it as sqrt(m)/n; AlternateSqrtRatio reads sqrt(m/n)
// (a limit-study toggle, off by default everywhere).
enum class ChiParsing { AsPrinted, AlternateSqrtRatio };

inline double mcsv_chi(int n, int m, double omega, ChiParsing parsing = ChiParsing::AsPrinted) {
    if (!(m < n)) throw SpecError("mcsv_chi: need m < n");
    if (!(omega >= 0.0) || !(omega * omega < n)) throw SpecError("mcsv_chi: need omega^2 < n");
    double mid = parsing == ChiParsing::AsPrinted
                     ? std::sqrt(static_cast<double>(m)) / n
                     : std::sqrt(static_cast<double>(m) / n);
    return std::sqrt(static_cast<double>(n) - omega * omega) / std::sqrt(static_cast<double>(n - m)) * mid -
           omega / n;
}

// Lower bound on the minimum conic singular value of a row-orthonormal
// matrix: sqrt[(m + rho^2 chi^2 - 2 rho chi omega - rho chi^2 (n - m))/(m + rho)]
// - zeta, with rho = omega/chi + n - m. chi <= 0 or a negative radicand means
// the inputs are outside the bound's regime.
inline double mcsv_bound_iro(int n, int m, double omega, double zeta,
                             ChiParsing parsing = ChiParsing::AsPrinted) {
    if (!(zeta >= 0.0)) throw SpecError("mcsv_bound_iro: zeta must be >= 0");
    if (!(omega >= 0.0) || !(omega < std::sqrt(static_cast<double>(m))))
        throw SpecError("mcsv_bound_iro: need 0 <= omega < sqrt(m)");
    double chi = mcsv_chi(n, m, omega, parsing);
    if (!(chi > 0.0)) throw RegimeError("mcsv_bound_iro: chi <= 0 (out of regime)");
    double rho = omega / chi + (n - m);
    double radicand =
        (m + rho * rho * chi * chi - 2.0 * rho * chi * omega - rho * chi * chi * (n - m)) /
        (m + rho);
    if (!(radicand >= 0.0)) throw RegimeError("mcsv_bound_iro: negative radicand (out of regime)");
    return std::sqrt(radicand) - zeta;
}

// Gaussian counterpart (sqrt(m) - omega)/sqrt(n) for variance-1/n entries.
inline double mcsv_bound_gaussian(int n, int m, double omega) {
    if (!(omega >= 0.0) || !(omega < std::sqrt(static_cast<double>(m))))
        throw SpecError("mcsv_bound_gaussian: need 0 <= omega < sqrt(m)");
    return (std::sqrt(static_cast<double>(m)) - omega) / std::sqrt(static_cast<double>(n));
}

// Limit of the printed bound expression as m -> n: sqrt(1 - omega^2/n).
// (The prose limit claim is 1; the formula's limit is this value. Both are
// reported by the limit-study tooling.)
inline double mcsv_bound_iro_m_eq_n_limit(int n, double omega) {
    if (!(omega >= 0.0) || !(omega * omega < n))
        throw SpecError("mcsv_bound_iro_m_eq_n_limit: need omega^2 < n");
    return std::sqrt(1.0 - omega * omega / n);
}

// Scalar objective whose max-min encodes the orthogonal mCSV bound:
// F(t, beta) = (m + t beta^2 (t - (n - m)) - 2 t beta omega)/(m + t).
inline double mcsv_objective(int n, int m, double omega, double t, double beta) {
    if (!(m + t > 0.0)) throw SpecError("mcsv_objective: m + t must be positive");
    return (m + t * beta * beta * (t - (n - m)) - 2.0 * t * beta * omega) / (m + t);
}

// Numeric saddle of the scalar mCSV objective: outer max over beta on [0, B],
// inner min over t on [0, T], with B, T ten times the closed-form (chi, rho).
// The search order is max-min: for fixed beta the objective is convex in t
// (substituting u = m + t gives a u + c/u), while for fixed t above n - m it
// is convex in beta, so the printed min-max order is not directly searchable.
// Returns beta_sq = beta^2, t, and value sqrt(F).
inline AOSaddle mcsv_ao_numeric(int n, int m, double omega) {
    if (!(m < n)) throw SpecError("mcsv_ao_numeric: need m < n");
    double chi = mcsv_chi(n, m, omega);
    if (!(chi > 0.0)) throw RegimeError("mcsv_ao_numeric: chi <= 0 (out of regime)");
    double rho = omega / chi + (n - m);
    const double B = 10.0 * chi;
    const double T = 10.0 * rho;
    auto inner_arg = [&](double beta) {
        return golden_section_min([&](double t) { return mcsv_objective(n, m, omega, t, beta); },
                                  0.0, T, T * 1e-12);
    };
    ScalarMinimum outer =
        golden_section_max([&](double beta) { return inner_arg(beta).value; }, 0.0, B, B * 1e-12);
    ScalarMinimum inner = inner_arg(outer.arg);
    if (outer.arg > 0.999 * B || inner.arg > 0.999 * T)
        throw NumericalError("mcsv_ao_numeric: saddle on the search boundary");
    if (!(outer.value >= 0.0))
        throw RegimeError("mcsv_ao_numeric: negative objective at the saddle");
    return {outer.arg * outer.arg, inner.arg, std::sqrt(outer.value)};
}

}  // namespace classo
