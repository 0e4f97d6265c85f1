#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>

#include "classo/ensembles.hpp"
#include "classo/errors.hpp"
#include "classo/geometry.hpp"
#include "classo/numeric.hpp"
#include "classo/predictions.hpp"
#include "classo/random.hpp"
#include "classo/signal.hpp"

namespace classo {

// Multi-restart heuristic estimate of the minimum conic singular value.
// value is an UPPER bound on the true mCSV: every witness is a feasible unit
// vector, and any feasible point upper-bounds an infimum. The estimate is
// exactly what a lower-bound theorem needs for validation (estimate < bound
// would falsify the bound); it must never be read as the true mCSV, because
// the sphere constraint makes the problem nonconvex.
struct McsvEstimate {
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd witness;
    int restarts_used = 0;
};

namespace detail {

// Core projected-descent loop with a pluggable cone projector, shared by the
// tangent-cone estimate and the whole-space (plain sigma_min) variant.
// Per restart: start from a seeded direction, iterate
// w <- normalize(project(w - eta A^T A w)) with eta = 1/sigma_max^2, and track
// the best feasible unit vector visited (the objective is non-increasing up
// to the renormalization step, which can scale it up, so the minimum over the
// visited trajectory is taken rather than the final point).
template <typename Projector, typename StartSampler>
McsvEstimate empirical_mcsv_impl(const Eigen::MatrixXd& A, Projector&& project,
                                 StartSampler&& sample_start, int restarts, int iters,
                                 const RandomSource& src) {
    if (restarts < 1) throw SpecError("empirical_mcsv: need restarts >= 1");
    if (iters < 1) throw SpecError("empirical_mcsv: need iters >= 1");
    const double lam = sigma_max_sq(A);
    if (!(lam > 0.0)) throw NumericalError("empirical_mcsv: zero operator norm");
    const double eta = 1.0 / lam;

    McsvEstimate best;
    for (int rs = 0; rs < restarts; ++rs) {
        RandomStream stream = src.stream("mcsv-restart", rs);
        Eigen::VectorXd w = project(sample_start(rs, stream));
        double nw = w.norm();
        if (nw < 1e-12) continue;  // degenerate start, restart skipped
        w /= nw;
        ++best.restarts_used;
        double v = (A * w).norm();
        if (v < best.value) {
            best.value = v;
            best.witness = w;
        }
        for (int it = 0; it < iters; ++it) {
            Eigen::VectorXd g = A.transpose() * (A * w);
            Eigen::VectorXd w2 = project(w - eta * g);
            nw = w2.norm();
            if (nw < 1e-12) break;  // trajectory collapsed onto the cone apex
            w = w2 / nw;
            v = (A * w).norm();
            if (v < best.value) {
                best.value = v;
                best.witness = w;
            }
        }
    }
    if (best.restarts_used == 0)
        throw NumericalError("empirical_mcsv: all restarts degenerate (zero projection)");
    return best;
}

}  // namespace detail

// Heuristic upper bound on the mCSV of A with respect to the l1 tangent cone
// at sig. Restart directions alternate between a uniform sphere sample
// projected onto the cone and a sample drawn inside the cone (support entries
// aligned against the signs, off-support l1 mass kept below the support
// margin), which covers the cone boundary where minima live.
inline McsvEstimate empirical_mcsv(const MeasurementMatrix& M, const SparseSignal& sig,
                                   int restarts, int iters, const RandomSource& src) {
    if (M.n() != sig.n()) throw SpecError("empirical_mcsv: dimension mismatch");
    auto project = [&sig](const Eigen::VectorXd& v) { return project_tangent_cone(v, sig); };
    auto sample_start = [&sig](int rs, RandomStream& stream) {
        const int n = sig.n();
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = stream.gaussian();
        if (rs % 2 == 0) return w;  // caller projects
        // interior sample: align the support against the signs, then scale the
        // off-support mass to a fraction of the support margin
        double margin = 0.0;
        for (std::size_t j = 0; j < sig.support.size(); ++j) {
            int i = sig.support[j];
            w[i] = -std::abs(w[i]) * sig.signs[j];
            margin += std::abs(w[i]);
        }
        double off = 0.0;
        for (int i = 0; i < n; ++i) off += std::abs(w[i]);
        off -= margin;
        if (off > 0.0) {
            double scale = margin * stream.uniform01() / off;
            std::vector<bool> on(static_cast<std::size_t>(n), false);
            for (int i : sig.support) on[static_cast<std::size_t>(i)] = true;
            for (int i = 0; i < n; ++i)
                if (!on[static_cast<std::size_t>(i)]) w[i] *= scale;
        }
        return w;
    };
    McsvEstimate e = detail::empirical_mcsv_impl(M.A, project, sample_start, restarts, iters, src);
    if (!descent_cone_member(e.witness, sig, 1e-8))
        throw NumericalError("empirical_mcsv: witness left the cone");
    return e;
}

// Whole-space variant: the cone is all of R^n, so the estimate targets the
// plain minimum singular value of A.
inline McsvEstimate empirical_min_singular_value(const Eigen::MatrixXd& A, int restarts, int iters,
                                                 const RandomSource& src) {
    auto project = [](const Eigen::VectorXd& v) { return v; };
    auto sample_start = [n = static_cast<int>(A.cols())](int, RandomStream& stream) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = stream.gaussian();
        return w;
    };
    return detail::empirical_mcsv_impl(A, project, sample_start, restarts, iters, src);
}

// Side-by-side record of the heuristic estimate and both closed-form bounds,
// as consumed by the mCSV sweep.
struct McsvGapReport {
    double empirical;
    double bound_iro;
    double bound_gaussian;
    double gap_iro;       // empirical - bound_iro
    double gap_gaussian;  // empirical - bound_gaussian
    double omega_sq_used;
    int restarts_used;
};

inline McsvGapReport mcsv_gap_report(const MeasurementMatrix& M, const SparseSignal& sig,
                                     int restarts, int iters, const RandomSource& src) {
    WidthEstimate w = width_closed_form_sparse(sig.n(), sig.k());
    double omega = std::sqrt(w.omega_sq);
    McsvEstimate e = empirical_mcsv(M, sig, restarts, iters, src);
    double bi = mcsv_bound_iro(M.n(), M.m(), omega, 0.0);
    double bg = mcsv_bound_gaussian(M.n(), M.m(), omega);
    return {e.value, bi, bg, e.value - bi, e.value - bg, w.omega_sq, e.restarts_used};
}

}  // namespace classo
