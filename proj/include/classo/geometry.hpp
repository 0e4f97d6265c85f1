#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "classo/errors.hpp"
#include "classo/numeric.hpp"
#include "classo/random.hpp"
#include "classo/signal.hpp"

namespace classo {

enum class WidthMethod { MonteCarlo, ClosedFormSparse, LogBound };

// Operational omega^2: the statistical dimension E[dist^2(h, cone of scaled
// subdifferentials)]. It exceeds the squared width of cone-intersect-sphere by
// at most an additive 1, below every tolerance used downstream.
struct WidthEstimate {
    double omega_sq;
    WidthMethod method;
    double std_err;  // 0 for deterministic methods
    int samples;     // 0 for deterministic methods
};

// dist^2(h, lambda * subdifferential of the l1 norm at x0):
// sum over the support of (h_i - lambda s_i)^2 plus the shrinkage
// sum over the complement of max(|h_i| - lambda, 0)^2.
inline double dist_to_scaled_subdiff(const Eigen::VectorXd& h, const SparseSignal& sig,
                                     double lambda) {
    if (lambda < 0.0) throw SpecError("dist_to_scaled_subdiff: lambda must be >= 0");
    if (h.size() != sig.x0.size()) throw SpecError("dist_to_scaled_subdiff: length mismatch");
    std::vector<bool> on(static_cast<std::size_t>(sig.n()), false);
    double d = 0.0;
    for (std::size_t j = 0; j < sig.support.size(); ++j) {
        int i = sig.support[j];
        on[static_cast<std::size_t>(i)] = true;
        double r = h[i] - lambda * sig.signs[j];
        d += r * r;
    }
    for (int i = 0; i < sig.n(); ++i) {
        if (on[static_cast<std::size_t>(i)]) continue;
        double r = std::abs(h[i]) - lambda;
        if (r > 0.0) d += r * r;
    }
    return d;
}

struct ConeDistance {
    double lambda_star;
    double dist_sq;
};

// min over lambda >= 0 of dist_to_scaled_subdiff; the objective is convex in
// lambda, so golden-section on [0, max|h_i| + 1] finds it.
inline ConeDistance min_dist_to_cone(const Eigen::VectorXd& h, const SparseSignal& sig) {
    double hi = (h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0) + 1.0;
    auto f = [&](double lam) { return dist_to_scaled_subdiff(h, sig, lam); };
    ScalarMinimum r = golden_section_min(f, 0.0, hi, 1e-8);
    // 0 is a valid boundary minimizer; keep it if it beats the interior point.
    double at_zero = f(0.0);
    if (at_zero <= r.value) return {0.0, at_zero};
    return {r.arg, r.value};
}

// Monte Carlo statistical dimension: mean of min_dist_to_cone over i.i.d.
// standard normal h.
inline WidthEstimate estimate_width_mc(const SparseSignal& sig, int samples,
                                       RandomStream& stream) {
    if (samples < 100) throw SpecError("estimate_width_mc: need samples >= 100");
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd h(sig.n());
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < sig.n(); ++i) h[i] = stream.gaussian();
        double d = min_dist_to_cone(h, sig).dist_sq;
        sum += d;
        sum_sq += d * d;
    }
    double mean = sum / samples;
    double var = (sum_sq - samples * mean * mean) / (samples - 1);
    return {mean, WidthMethod::MonteCarlo, std::sqrt(std::max(var, 0.0) / samples), samples};
}

// Closed form for the l1 statistical dimension at a k-sparse point:
// min over tau >= 0 of k (1 + tau^2) + (n - k) E[(|g| - tau)_+^2].
// Depends only on (n, k), not on the support or signs.
inline WidthEstimate width_closed_form_sparse(int n, int k) {
    if (k < 1 || k >= n) throw SpecError("width_closed_form_sparse: need 1 <= k < n");
    auto f = [&](double tau) {
        return k * (1.0 + tau * tau) + (n - k) * expected_shrinkage_sq(tau);
    };
    ScalarMinimum r = golden_section_min_expanding(f, 0.0, 8.0, 1e-10);
    return {r.value, WidthMethod::ClosedFormSparse, 0.0, 0};
}

// Logarithmic upper bound 2k (ln(n/k) + 1); always >= the closed form.
inline WidthEstimate width_log_bound(int n, int k) {
    if (k < 1 || k > n) throw SpecError("width_log_bound: need 1 <= k <= n");
    double v = 2.0 * k * (std::log(static_cast<double>(n) / k) + 1.0);
    return {v, WidthMethod::LogBound, 0.0, 0};
}

inline WidthEstimate estimate_width(int n, int k, WidthMethod method, int samples,
                                    RandomStream& stream) {
    switch (method) {
        case WidthMethod::ClosedFormSparse: return width_closed_form_sparse(n, k);
        case WidthMethod::LogBound: return width_log_bound(n, k);
        case WidthMethod::MonteCarlo: {
            SparseSignal sig;
            sig.x0 = Eigen::VectorXd::Zero(n);
            sig.support.resize(static_cast<std::size_t>(k));
            sig.signs.assign(static_cast<std::size_t>(k), 1.0);
            for (int j = 0; j < k; ++j) {
                sig.support[static_cast<std::size_t>(j)] = j;
                sig.x0[j] = 1.0;
            }
            return estimate_width_mc(sig, samples, stream);
        }
    }
    throw SpecError("estimate_width: unknown method");
}

// First-order membership test for the l1 tangent cone at x0:
// sum over the support of s_i w_i plus the off-support l1 mass must not
// exceed tol. Membership is invariant under positive scaling of w.
inline bool descent_cone_member(const Eigen::VectorXd& w, const SparseSignal& sig, double tol) {
    if (w.size() != sig.x0.size()) throw SpecError("descent_cone_member: length mismatch");
    std::vector<bool> on(static_cast<std::size_t>(sig.n()), false);
    double c = 0.0;
    for (std::size_t j = 0; j < sig.support.size(); ++j) {
        on[static_cast<std::size_t>(sig.support[j])] = true;
        c += sig.signs[j] * w[sig.support[j]];
    }
    for (int i = 0; i < sig.n(); ++i)
        if (!on[static_cast<std::size_t>(i)]) c += std::abs(w[i]);
    return c <= tol;
}

// Exact sublevel membership ||x0 + w||_1 <= ||x0||_1; used by solver tests,
// not by the cone machinery (cone membership is the first-order test above).
inline bool l1_sublevel_member(const Eigen::VectorXd& w, const SparseSignal& sig) {
    return (sig.x0 + w).lpNorm<1>() <= sig.x0.lpNorm<1>();
}

// Euclidean projection onto {w : sum_S s_i w_i + ||w_Sc||_1 <= 0}.
// Feasible inputs pass through unchanged. Otherwise the projection has the
// form w_S = v_S - mu s, w_Sc = soft_threshold(v_Sc, mu) for the unique
// mu > 0 at which the constraint holds with equality; the constraint value is
// continuous and strictly decreasing in mu until it saturates, so bisection
// applies.
inline Eigen::VectorXd project_tangent_cone(const Eigen::VectorXd& v, const SparseSignal& sig) {
    if (v.size() != sig.x0.size()) throw SpecError("project_tangent_cone: length mismatch");
    if (descent_cone_member(v, sig, 0.0)) return v;
    std::vector<bool> on(static_cast<std::size_t>(sig.n()), false);
    for (int i : sig.support) on[static_cast<std::size_t>(i)] = true;

    auto constraint = [&](double mu) {
        double c = 0.0;
        for (std::size_t j = 0; j < sig.support.size(); ++j)
            c += sig.signs[j] * v[sig.support[j]] - mu;
        for (int i = 0; i < sig.n(); ++i) {
            if (on[static_cast<std::size_t>(i)]) continue;
            double a = std::abs(v[i]) - mu;
            if (a > 0.0) c += a;
        }
        return c;
    };

    // constraint(0) > 0 since v is infeasible; at mu_hi every term is clamped
    // or negative, so constraint(mu_hi) <= 0. The upper bracket end is kept as
    // the answer: it stays on the feasible side, so the returned point always
    // passes the membership test (the midpoint could land slightly infeasible).
    double lo = 0.0, hi = v.cwiseAbs().maxCoeff() + 1.0;
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (constraint(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double mu = hi;

    Eigen::VectorXd w = v;
    for (std::size_t j = 0; j < sig.support.size(); ++j) {
        int i = sig.support[j];
        w[i] = v[i] - mu * sig.signs[j];
    }
    for (int i = 0; i < sig.n(); ++i) {
        if (on[static_cast<std::size_t>(i)]) continue;
        double a = std::abs(v[i]) - mu;
        w[i] = (a > 0.0) ? (v[i] > 0 ? a : -a) : 0.0;
    }
    return w;
}

}  // namespace classo
