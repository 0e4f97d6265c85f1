#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "classo/errors.hpp"
#include "classo/random.hpp"

namespace classo {

// Ground-truth sparse vector with explicit support and sign pattern.
// Invariant: x0[i] != 0 exactly on the support, signs[j] = sign(x0[support[j]]),
// and k >= 1 so x0 is never a minimizer of the l1 norm.
struct SparseSignal {
    Eigen::VectorXd x0;
    std::vector<int> support;
    std::vector<double> signs;

    int n() const { return static_cast<int>(x0.size()); }
    int k() const { return static_cast<int>(support.size()); }
};

inline void validate(const SparseSignal& sig) {
    if (sig.k() < 1) throw SpecError("SparseSignal: support must be nonempty");
    if (sig.signs.size() != sig.support.size())
        throw SpecError("SparseSignal: signs and support size mismatch");
    std::vector<bool> on(static_cast<std::size_t>(sig.n()), false);
    for (std::size_t j = 0; j < sig.support.size(); ++j) {
        int i = sig.support[j];
        if (i < 0 || i >= sig.n()) throw SpecError("SparseSignal: support index out of range");
        if (on[static_cast<std::size_t>(i)]) throw SpecError("SparseSignal: duplicate support index");
        on[static_cast<std::size_t>(i)] = true;
        double s = sig.signs[j];
        if (s != 1.0 && s != -1.0) throw SpecError("SparseSignal: signs must be +1 or -1");
        double v = sig.x0[i];
        if (v == 0.0 || (v > 0) != (s > 0))
            throw SpecError("SparseSignal: x0 inconsistent with support/signs");
    }
    for (int i = 0; i < sig.n(); ++i)
        if (!on[static_cast<std::size_t>(i)] && sig.x0[i] != 0.0)
            throw SpecError("SparseSignal: nonzero off support");
}

// k-sparse unit-norm signal: support uniform without replacement, entries
// +-1/sqrt(k) with uniform signs. Sorted support gives a canonical layout.
inline SparseSignal make_sparse_signal(int n, int k, RandomStream& stream) {
    if (k < 1 || k > n) throw SpecError("make_sparse_signal: need 1 <= k <= n");
    SparseSignal sig;
    sig.x0 = Eigen::VectorXd::Zero(n);
    sig.support = stream.sample_without_replacement(n, k);
    std::sort(sig.support.begin(), sig.support.end());
    sig.signs.resize(static_cast<std::size_t>(k));
    const double amp = 1.0 / std::sqrt(static_cast<double>(k));
    for (int j = 0; j < k; ++j) {
        double s = stream.sign();
        sig.signs[static_cast<std::size_t>(j)] = s;
        sig.x0[sig.support[static_cast<std::size_t>(j)]] = s * amp;
    }
    return sig;
}

}  // namespace classo
