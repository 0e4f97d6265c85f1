#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>

#include "classo/errors.hpp"
#include "classo/random.hpp"

namespace classo {

struct ScalarMinimum {
    double arg;
    double value;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi].
// Converges to |arg - arg*| < arg_tol; about 1.44 * log2((hi-lo)/arg_tol)
// evaluations.
template <typename F>
ScalarMinimum golden_section_min(F&& f, double lo, double hi, double arg_tol) {
    if (!(lo < hi)) throw SpecError("golden_section_min: need lo < hi");
    const double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > arg_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

template <typename F>
ScalarMinimum golden_section_max(F&& f, double lo, double hi, double arg_tol) {
    auto neg = [&f](double x) { return -f(x); };
    ScalarMinimum r = golden_section_min(neg, lo, hi, arg_tol);
    return {r.arg, -r.value};
}

// Minimize unimodal f on [lo, inf): doubles the bracket until the minimizer
// is interior, then refines. Guards against silent truncation when the
// initial hi guess is too small.
template <typename F>
ScalarMinimum golden_section_min_expanding(F&& f, double lo, double hi0, double arg_tol,
                                           int max_doublings = 60) {
    double hi = hi0;
    for (int round = 0; round <= max_doublings; ++round) {
        ScalarMinimum r = golden_section_min(f, lo, hi, arg_tol);
        if (r.arg < lo + 0.99 * (hi - lo)) return r;
        hi = lo + 2.0 * (hi - lo);
    }
    throw NumericalError("golden_section_min_expanding: minimum not interior after expansion");
}

// Root of a continuous, strictly decreasing g on [lo, hi] with
// g(lo) >= 0 >= g(hi); bisection to |arg - root| < arg_tol.
template <typename G>
double bisect_decreasing(G&& g, double lo, double hi, double arg_tol) {
    if (!(lo <= hi)) throw SpecError("bisect_decreasing: need lo <= hi");
    while (hi - lo > arg_tol) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Largest squared singular value of A by power iteration on A^T A.
// The start vector comes from a fixed internal substream (independent of any
// experiment seed) so results are reproducible; a random start avoids
// structural orthogonality to the top singular space (for example the all-ones
// vector is annihilated by every Hadamard row except the first).
inline double sigma_max_sq(const Eigen::MatrixXd& A, int iters = 50, double tol = 1e-10) {
    const auto n = A.cols();
    RandomStream s = RandomSource(0x51A9A1CEull).stream("power-iteration", A.rows(), n);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = s.gaussian();
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd av = A * v;
        double lambda_new = av.squaredNorm();
        Eigen::VectorXd w = A.transpose() * av;
        double wn = w.norm();
        if (wn == 0.0) return 0.0;
        v = w / wn;
        if (std::abs(lambda_new - lambda) <= tol * std::max(1.0, lambda_new)) return lambda_new;
        lambda = lambda_new;
    }
    return lambda;
}

// E[(|g| - tau)_+^2] for standard normal g, in closed form.
inline double expected_shrinkage_sq(double tau) {
    return (1.0 + tau * tau) * std::erfc(tau * 0.7071067811865475244) -
           tau * 0.7978845608028653559 * std::exp(-0.5 * tau * tau);
}

}  // namespace classo
