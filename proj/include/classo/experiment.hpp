#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "classo/ensembles.hpp"
#include "classo/errors.hpp"
#include "classo/geometry.hpp"
#include "classo/mcsv.hpp"
#include "classo/predictions.hpp"
#include "classo/random.hpp"
#include "classo/signal.hpp"
#include "classo/solver.hpp"

namespace classo {

// Full description of a sweep. CSV output is a pure function of this struct:
// per-trial substreams are derived from master_seed and the loop coordinates,
// and rows are emitted in sorted order, so scheduling can never change bytes.
struct ExperimentSpec {
    std::vector<Ensemble> ensembles{Ensemble::Iro};
    int n = 256;
    int k = 10;
    std::vector<int> m_list{128};
    std::vector<double> sigma_list{1e-3};
    int trials = 25;
    std::uint64_t master_seed = 0;
    bool has_seed = false;
    SolveConfig solver;
    WidthMethod width_method = WidthMethod::ClosedFormSparse;
    int width_samples = 10000;
    std::string output_path;       // empty writes to stdout
    std::vector<int> k_list;       // mcsv sweep grid; defaults to {k}
    int mcsv_restarts = 20;
    int mcsv_iters = 2000;
    int mcsv_trials = 0;           // empirical mCSV draws per grid point
};

struct TrialRecord {
    Ensemble ensemble;
    int n, m, k;
    double sigma;
    int trial_index;
    std::uint64_t seed_used;
    double omega_sq_used;
    double nse_empirical;
    double nse_predicted;
    int solver_iters;
    bool converged;
};

struct McsvRow {
    int n, m, k;
    double omega_sq;
    std::optional<double> bound_iro;
    std::optional<double> bound_gaussian;
    std::optional<double> empirical;
    int seed_index = -1;
    std::uint64_t seed_used = 0;
    std::string status;  // ok | m_eq_n_limit | out_of_regime
};

namespace detail {

// 17 significant digits: doubles round-trip exactly through the CSV.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline long long parse_ll(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(trim(s), &pos);
    } catch (const std::exception&) {
        throw SpecError(what + ": not an integer: '" + s + "'");
    }
    if (pos != trim(s).size()) throw SpecError(what + ": not an integer: '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::string t = trim(s);
    // Reject a sign outright: stoull would wrap "-3" around silently.
    if (!t.empty() && (t[0] == '-' || t[0] == '+'))
        throw SpecError(what + ": not an unsigned integer: '" + s + "'");
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(t, &pos);
    } catch (const std::exception&) {
        throw SpecError(what + ": not an unsigned integer: '" + s + "'");
    }
    if (pos != t.size()) throw SpecError(what + ": not an unsigned integer: '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(trim(s), &pos);
    } catch (const std::exception&) {
        throw SpecError(what + ": not a number: '" + s + "'");
    }
    if (pos != trim(s).size()) throw SpecError(what + ": not a number: '" + s + "'");
    return v;
}

inline Ensemble parse_ensemble(const std::string& s) {
    std::string t = trim(s);
    if (t == "gaussian") return Ensemble::Gaussian;
    if (t == "iro") return Ensemble::Iro;
    if (t == "pdct") return Ensemble::PartialDct;
    if (t == "phadamard") return Ensemble::PartialHadamard;
    throw SpecError("unknown ensemble '" + t + "' (expected gaussian|iro|pdct|phadamard)");
}

inline WidthMethod parse_width_method(const std::string& s) {
    std::string t = trim(s);
    if (t == "closed_form") return WidthMethod::ClosedFormSparse;
    if (t == "mc") return WidthMethod::MonteCarlo;
    if (t == "log_bound") return WidthMethod::LogBound;
    throw SpecError("unknown width_method '" + t + "' (expected closed_form|mc|log_bound)");
}

}  // namespace detail

// Flat key-value config: one `key = value` per line, '#' starts a comment,
// list values are comma-separated. Keys match the ExperimentSpec field names.
// Unknown keys are rejected so typos cannot silently change an experiment.
inline void apply_config_line(ExperimentSpec& spec, const std::string& key,
                              const std::string& value) {
    using namespace detail;
    if (key == "ensemble" || key == "ensembles") {
        spec.ensembles.clear();
        for (const std::string& e : split(value, ','))
            spec.ensembles.push_back(parse_ensemble(e));
    } else if (key == "n") {
        spec.n = static_cast<int>(parse_ll(value, "n"));
    } else if (key == "k") {
        spec.k = static_cast<int>(parse_ll(value, "k"));
    } else if (key == "m_list") {
        spec.m_list.clear();
        for (const std::string& s : split(value, ','))
            spec.m_list.push_back(static_cast<int>(parse_ll(s, "m_list")));
    } else if (key == "k_list") {
        spec.k_list.clear();
        for (const std::string& s : split(value, ','))
            spec.k_list.push_back(static_cast<int>(parse_ll(s, "k_list")));
    } else if (key == "sigma_list") {
        spec.sigma_list.clear();
        for (const std::string& s : split(value, ','))
            spec.sigma_list.push_back(parse_double(s, "sigma_list"));
    } else if (key == "trials") {
        spec.trials = static_cast<int>(parse_ll(value, "trials"));
    } else if (key == "master_seed") {
        spec.master_seed = parse_u64(value, "master_seed");
        spec.has_seed = true;
    } else if (key == "max_iters") {
        spec.solver.max_iters = static_cast<int>(parse_ll(value, "max_iters"));
    } else if (key == "grad_tol") {
        spec.solver.grad_tol = parse_double(value, "grad_tol");
    } else if (key == "width_method") {
        spec.width_method = parse_width_method(value);
    } else if (key == "width_samples") {
        spec.width_samples = static_cast<int>(parse_ll(value, "width_samples"));
    } else if (key == "output_path") {
        spec.output_path = detail::trim(value);
    } else if (key == "mcsv_restarts") {
        spec.mcsv_restarts = static_cast<int>(parse_ll(value, "mcsv_restarts"));
    } else if (key == "mcsv_iters") {
        spec.mcsv_iters = static_cast<int>(parse_ll(value, "mcsv_iters"));
    } else if (key == "mcsv_trials") {
        spec.mcsv_trials = static_cast<int>(parse_ll(value, "mcsv_trials"));
    } else {
        throw SpecError("unknown config key '" + key + "'");
    }
}

inline void load_config_file(ExperimentSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_line(spec, key, value);
        } catch (const SpecError& e) {
            throw SpecError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline void validate_common(const ExperimentSpec& spec) {
    if (!spec.has_seed)
        throw SpecError("no seed given: pass --seed or set master_seed in the config "
                        "(sweeps never seed from the clock)");
    if (spec.n < 2) throw SpecError("n must be >= 2");
    if (spec.k < 1 || spec.k >= spec.n) throw SpecError("need 1 <= k < n");
    if (spec.trials < 1) throw SpecError("trials must be >= 1");
    if (spec.ensembles.empty()) throw SpecError("ensemble list is empty");
    if (spec.sigma_list.empty()) throw SpecError("sigma_list is empty");
    for (double s : spec.sigma_list)
        if (!(s > 0.0)) throw SpecError("sigma values must be positive");
    for (Ensemble e : spec.ensembles)
        if (e == Ensemble::PartialHadamard && (spec.n & (spec.n - 1)) != 0)
            throw SpecError("phadamard requires n to be a power of two");
}

inline WidthEstimate sweep_width(const ExperimentSpec& spec, int k, const RandomSource& src) {
    RandomStream ws = src.stream("width", k);
    return estimate_width(spec.n, k, spec.width_method, spec.width_samples, ws);
}

inline MeasurementMatrix make_ensemble_matrix(Ensemble e, int m, int n, RandomStream& stream) {
    switch (e) {
        case Ensemble::Gaussian: return gen_gaussian(m, n, 1.0 / n, stream);
        case Ensemble::Iro: return gen_iro(m, n, stream);
        case Ensemble::PartialDct: return gen_partial_dct(m, n, stream);
        case Ensemble::PartialHadamard: return gen_partial_hadamard(m, n, stream);
    }
    throw SpecError("unknown ensemble");
}

// Monte Carlo NSE sweep over (ensemble, m, sigma, trial).
// Per-trial seeding: the matrix stream is keyed by
// (master_seed, ensemble, m, sigma index, trial) and recorded as seed_used;
// signal and noise streams are keyed the same way WITHOUT the ensemble, so
// different ensembles face identical signals and noise (paired comparison).
inline std::vector<TrialRecord> run_nse_sweep(const ExperimentSpec& spec) {
    validate_common(spec);
    RandomSource src(spec.master_seed);
    WidthEstimate width = sweep_width(spec, spec.k, src);
    for (int m : spec.m_list) {
        if (!(width.omega_sq < m && m < spec.n))
            throw SpecError("m=" + std::to_string(m) +
                            " violates omega_sq < m < n (omega_sq=" +
                            detail::fmt17(width.omega_sq) + ", n=" + std::to_string(spec.n) + ")");
    }

    std::vector<TrialRecord> rows;
    rows.reserve(spec.ensembles.size() * spec.m_list.size() * spec.sigma_list.size() *
                 static_cast<std::size_t>(spec.trials));
    for (Ensemble ens : spec.ensembles) {
        for (int m : spec.m_list) {
            ProblemDims dims{spec.n, m, width.omega_sq, Scaling::RowsOrthonormal};
            double predicted = (ens == Ensemble::Gaussian) ? nse_gaussian(dims) : nse_iro(dims);
            for (std::size_t si = 0; si < spec.sigma_list.size(); ++si) {
                double sigma = spec.sigma_list[si];
                SolveConfig cfg = spec.solver;
                if (sigma <= 1e-3) cfg.grad_tol = std::min(cfg.grad_tol, 1e-11);
                for (int trial = 0; trial < spec.trials; ++trial) {
                    std::uint64_t seed =
                        src.substream_seed(ensemble_name(ens), m, static_cast<int>(si), trial);
                    RandomStream mat_stream(seed);
                    RandomStream sig_stream =
                        src.stream("signal", m, static_cast<int>(si), trial);
                    RandomStream noise_stream =
                        src.stream("noise", m, static_cast<int>(si), trial);

                    MeasurementMatrix M = make_ensemble_matrix(ens, m, spec.n, mat_stream);
                    SparseSignal sig = make_sparse_signal(spec.n, spec.k, sig_stream);
                    Eigen::VectorXd v = gen_noise(m, noise_stream);
                    Eigen::VectorXd y = M.A * sig.x0 + sigma * v;
                    SolveResult sol = solve_classo(M.A, y, sig.x0.lpNorm<1>(), cfg);

                    TrialRecord r;
                    r.ensemble = ens;
                    r.n = spec.n;
                    r.m = m;
                    r.k = spec.k;
                    r.sigma = sigma;
                    r.trial_index = trial;
                    r.seed_used = seed;
                    r.omega_sq_used = width.omega_sq;
                    r.nse_empirical = nse(sol.x_hat, sig.x0, sigma);
                    r.nse_predicted = predicted;
                    r.solver_iters = sol.iters;
                    r.converged = sol.converged;
                    rows.push_back(r);
                }
            }
        }
    }
    return rows;
}

// Sigma profile: same machinery, framed as NSE(sigma) at fixed (ensemble, m).
inline std::vector<TrialRecord> run_sigma_profile(const ExperimentSpec& spec) {
    if (spec.sigma_list.empty()) throw SpecError("sigma-profile: sigma_list is empty");
    return run_nse_sweep(spec);
}

// mCSV sweep over the (m, k) grid. Bounds are deterministic; the optional
// empirical column draws mcsv_trials instances per grid point. Out-of-regime
// bound evaluations and the m = n limit are marked in the status column, never
// dropped.
inline std::vector<McsvRow> run_mcsv_sweep(const ExperimentSpec& spec) {
    validate_common(spec);
    RandomSource src(spec.master_seed);
    std::vector<int> ks = spec.k_list.empty() ? std::vector<int>{spec.k} : spec.k_list;
    for (int k : ks)
        if (k < 1 || k >= spec.n) throw SpecError("k_list entries must satisfy 1 <= k < n");
    for (int m : spec.m_list)
        if (m < 1 || m > spec.n) throw SpecError("m_list entries must satisfy 1 <= m <= n");

    std::vector<McsvRow> rows;
    for (int k : ks) {
        WidthEstimate width = sweep_width(spec, k, src);
        double omega = std::sqrt(width.omega_sq);
        for (int m : spec.m_list) {
            McsvRow base;
            base.n = spec.n;
            base.m = m;
            base.k = k;
            base.omega_sq = width.omega_sq;
            base.status = "ok";
            if (m == spec.n) {
                base.status = "m_eq_n_limit";
                base.bound_iro = mcsv_bound_iro_m_eq_n_limit(spec.n, omega);
            } else {
                try {
                    base.bound_iro = mcsv_bound_iro(spec.n, m, omega, 0.0);
                } catch (const SpecError&) {
                    base.status = "out_of_regime";
                }
            }
            try {
                base.bound_gaussian = mcsv_bound_gaussian(spec.n, m, omega);
            } catch (const SpecError&) {
                base.status = "out_of_regime";
            }

            if (spec.mcsv_trials < 1) {
                rows.push_back(base);
                continue;
            }
            for (int t = 0; t < spec.mcsv_trials; ++t) {
                McsvRow r = base;
                r.seed_index = t;
                r.seed_used = src.substream_seed("mcsv", k, m, t);
                RandomSource trial_src(r.seed_used);
                RandomStream mat_stream = trial_src.stream("matrix");
                RandomStream sig_stream = trial_src.stream("signal");
                MeasurementMatrix M = gen_iro(m, spec.n, mat_stream);
                SparseSignal sig = make_sparse_signal(spec.n, k, sig_stream);
                McsvEstimate e =
                    empirical_mcsv(M, sig, spec.mcsv_restarts, spec.mcsv_iters, trial_src);
                r.empirical = e.value;
                rows.push_back(r);
            }
        }
    }
    return rows;
}

inline void write_trial_csv(const std::vector<TrialRecord>& rows, std::ostream& out) {
    out << "ensemble,n,m,k,sigma,trial_index,seed_used,omega_sq_used,"
           "nse_empirical,nse_predicted,solver_iters,converged\n";
    for (const TrialRecord& r : rows) {
        out << ensemble_name(r.ensemble) << ',' << r.n << ',' << r.m << ',' << r.k << ','
            << detail::fmt17(r.sigma) << ',' << r.trial_index << ',' << r.seed_used << ','
            << detail::fmt17(r.omega_sq_used) << ',' << detail::fmt17(r.nse_empirical) << ','
            << detail::fmt17(r.nse_predicted) << ',' << r.solver_iters << ','
            << (r.converged ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("failed writing trial CSV");
}

inline void write_mcsv_csv(const std::vector<McsvRow>& rows, std::ostream& out) {
    auto opt17 = [](const std::optional<double>& v) { return v ? detail::fmt17(*v) : ""; };
    out << "n,m,k,omega_sq,bound_iro,bound_gaussian,empirical,seed_index,seed_used,status\n";
    for (const McsvRow& r : rows) {
        out << r.n << ',' << r.m << ',' << r.k << ',' << detail::fmt17(r.omega_sq) << ','
            << opt17(r.bound_iro) << ',' << opt17(r.bound_gaussian) << ',' << opt17(r.empirical)
            << ',' << r.seed_index << ',' << r.seed_used << ',' << r.status << '\n';
    }
    if (!out) throw IoError("failed writing mCSV CSV");
}

// Grouped summary of a trial CSV: per (ensemble, m, sigma), the mean, sample
// standard deviation, normal 95% CI of the empirical NSE, and the mean ratio
// to the prediction. Groups appear in first-occurrence order.
struct SummaryGroup {
    std::string ensemble;
    int m = 0;
    double sigma = 0.0;
    int count = 0;
    double mean_nse = 0.0;
    double std_dev = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double mean_ratio = 0.0;
    bool single = false;  // one row only: std reported as 0 with a flag
};

inline std::vector<SummaryGroup> summarize_rows(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw SpecError("csv line 1: empty file");
    std::vector<std::string> cols = detail::split(detail::trim(header), ',');
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return static_cast<int>(i);
        throw SpecError("csv line 1: missing column '" + name + "'");
    };
    int c_ens = col("ensemble"), c_m = col("m"), c_sigma = col("sigma"),
        c_emp = col("nse_empirical"), c_pred = col("nse_predicted");

    struct Acc {
        std::vector<double> nse;
        double ratio_sum = 0.0;
    };
    std::vector<std::tuple<std::string, int, double>> order;
    std::map<std::tuple<std::string, int, double>, Acc> groups;

    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f = detail::split(line, ',');
        if (f.size() != cols.size())
            throw SpecError("csv line " + std::to_string(lineno) + ": expected " +
                            std::to_string(cols.size()) + " fields, got " +
                            std::to_string(f.size()));
        std::string where = "csv line " + std::to_string(lineno);
        std::string ens = f[static_cast<std::size_t>(c_ens)];
        int m = static_cast<int>(detail::parse_ll(f[static_cast<std::size_t>(c_m)], where));
        double sigma = detail::parse_double(f[static_cast<std::size_t>(c_sigma)], where);
        double emp = detail::parse_double(f[static_cast<std::size_t>(c_emp)], where);
        double pred = detail::parse_double(f[static_cast<std::size_t>(c_pred)], where);
        auto key = std::make_tuple(ens, m, sigma);
        auto it = groups.find(key);
        if (it == groups.end()) {
            order.push_back(key);
            it = groups.emplace(key, Acc{}).first;
        }
        it->second.nse.push_back(emp);
        it->second.ratio_sum += (pred != 0.0) ? emp / pred : 0.0;
    }

    std::vector<SummaryGroup> out;
    for (const auto& key : order) {
        const Acc& a = groups.at(key);
        SummaryGroup g;
        g.ensemble = std::get<0>(key);
        g.m = std::get<1>(key);
        g.sigma = std::get<2>(key);
        g.count = static_cast<int>(a.nse.size());
        if (g.count == 0) continue;
        double sum = 0.0;
        for (double v : a.nse) sum += v;
        g.mean_nse = sum / g.count;
        if (g.count > 1) {
            double ss = 0.0;
            for (double v : a.nse) ss += (v - g.mean_nse) * (v - g.mean_nse);
            g.std_dev = std::sqrt(ss / (g.count - 1));
        } else {
            g.std_dev = 0.0;
            g.single = true;
        }
        double half = 1.959963984540054 * g.std_dev / std::sqrt(static_cast<double>(g.count));
        g.ci_lo = g.mean_nse - half;
        g.ci_hi = g.mean_nse + half;
        g.mean_ratio = a.ratio_sum / g.count;
        out.push_back(g);
    }
    return out;
}

inline std::string format_summary(const std::vector<SummaryGroup>& groups) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-10s %6s %12s %6s %14s %12s %14s %14s %10s %s\n", "ensemble",
                  "m", "sigma", "count", "mean_nse", "std", "ci95_lo", "ci95_hi", "mean_ratio",
                  "note");
    os << buf;
    for (const SummaryGroup& g : groups) {
        std::snprintf(buf, sizeof(buf), "%-10s %6d %12.5g %6d %14.6g %12.6g %14.6g %14.6g %10.4f %s\n",
                      g.ensemble.c_str(), g.m, g.sigma, g.count, g.mean_nse, g.std_dev, g.ci_lo,
                      g.ci_hi, g.mean_ratio, g.single ? "single" : "");
        os << buf;
    }
    return os.str();
}

inline std::vector<SummaryGroup> summarize_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open csv " + path);
    return summarize_rows(in);
}

}  // namespace classo
