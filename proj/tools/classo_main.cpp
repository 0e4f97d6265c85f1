// Command-line front end: NSE sweeps, mCSV sweeps, sigma profiles, width
// estimation, closed-form predictions, and CSV summaries.
//
// Exit codes: 0 success, 2 spec error, 3 I/O error, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "classo/experiment.hpp"

namespace {

using namespace classo;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> n, k, trials, max_iters, width_samples;
    std::optional<double> grad_tol;
    std::vector<int> m_list;
    std::vector<double> sigma_list;
    std::vector<std::string> ensembles;
    std::optional<std::string> width_method;
    std::string output_path;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "flat key-value config file (CLI flags override)");
    cmd->add_option("--seed", a.seed, "master seed (required for sweeps; no clock default)");
    cmd->add_option("-n,--n", a.n, "ambient dimension");
    cmd->add_option("-k,--k", a.k, "sparsity of the ground truth");
    cmd->add_option("-m,--m", a.m_list, "measurement counts (repeatable)")->delimiter(',');
    cmd->add_option("--sigma", a.sigma_list, "noise levels (repeatable)")->delimiter(',');
    cmd->add_option("--trials", a.trials, "Monte Carlo trials per grid point");
    cmd->add_option("--ensemble", a.ensembles, "gaussian|iro|pdct|phadamard (repeatable)")
        ->delimiter(',');
    cmd->add_option("--grad-tol", a.grad_tol, "solver fixed-point tolerance");
    cmd->add_option("--max-iters", a.max_iters, "solver iteration cap");
    cmd->add_option("--width-method", a.width_method, "closed_form|mc|log_bound");
    cmd->add_option("--width-samples", a.width_samples, "samples for the mc width");
    cmd->add_option("-o,--out", a.output_path, "output CSV path (default stdout)");
}

// Config file first, then flags, so explicit flags always win.
ExperimentSpec build_spec(const CommonArgs& a) {
    ExperimentSpec spec;
    if (!a.config_path.empty()) load_config_file(spec, a.config_path);
    if (a.seed) {
        spec.master_seed = *a.seed;
        spec.has_seed = true;
    }
    if (a.n) spec.n = *a.n;
    if (a.k) spec.k = *a.k;
    if (!a.m_list.empty()) spec.m_list = a.m_list;
    if (!a.sigma_list.empty()) spec.sigma_list = a.sigma_list;
    if (a.trials) spec.trials = *a.trials;
    if (!a.ensembles.empty()) {
        spec.ensembles.clear();
        for (const std::string& e : a.ensembles)
            spec.ensembles.push_back(detail::parse_ensemble(e));
    }
    if (a.grad_tol) spec.solver.grad_tol = *a.grad_tol;
    if (a.max_iters) spec.solver.max_iters = *a.max_iters;
    if (a.width_method) spec.width_method = detail::parse_width_method(*a.width_method);
    if (a.width_samples) spec.width_samples = *a.width_samples;
    if (!a.output_path.empty()) spec.output_path = a.output_path;
    return spec;
}

// Writes through a file when output_path is set, stdout otherwise.
template <typename WriteFn>
void emit(const std::string& output_path, WriteFn&& write) {
    if (output_path.empty()) {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file " + output_path);
    write(out);
    out.flush();
    if (!out) throw IoError("failed writing " + output_path);
}

int run_predict(int n, int m, int k, double omega_sq_flag, bool has_omega, bool alternate_chi) {
    double omega_sq = has_omega ? omega_sq_flag : width_closed_form_sparse(n, k).omega_sq;
    double omega = std::sqrt(omega_sq);
    std::printf("n=%d m=%d k=%d omega_sq=%.17g omega=%.17g\n", n, m, k, omega_sq, omega);

    ProblemDims ortho{n, m, omega_sq, Scaling::RowsOrthonormal};
    ProblemDims sqrtn{n, m, omega_sq, Scaling::RowsNormSqrtN};
    try {
        std::printf("nse_iro (rows orthonormal):        %.17g\n", nse_iro(ortho));
        std::printf("nse_iro (rows norm sqrt(n)):       %.17g\n", nse_iro(sqrtn));
        std::printf("nse_gaussian (variance 1/n):       %.17g\n", nse_gaussian(ortho));
        std::printf("nse_gaussian (variance 1):         %.17g\n", nse_gaussian(sqrtn));
        std::printf("nse ratio iro/gaussian:            %.17g\n", nse_ratio_iro_gaussian(ortho));
    } catch (const SpecError& e) {
        std::printf("nse predictions unavailable: %s\n", e.what());
    }

    try {
        AoConsistencyReport rep = ao_consistency_report(n, m, omega_sq);
        AOSaddle s = ao_saddle_closed_form(n, m, omega_sq);
        std::printf("ao saddle: beta_sq=%.17g t=%.17g value=%.17g\n", s.beta_sq, s.t, s.value);
        std::printf("ao reconstructed error^2:          %.17g\n", rep.ao_value);
        std::printf("nse formula (normative):           %.17g\n", rep.theorem_value);
        std::printf("ao/nse gap: %.17g (%s; the two agree only when n - m = m - omega_sq)\n",
                    rep.abs_gap, rep.consistent ? "consistent" : "flagged");
    } catch (const SpecError& e) {
        std::printf("ao saddle unavailable: %s\n", e.what());
    }

    if (m == n) {
        std::printf("mcsv_bound_iro: m = n, printed-formula limit = %.17g (prose claims 1)\n",
                    mcsv_bound_iro_m_eq_n_limit(n, omega));
    } else {
        try {
            double bi = mcsv_bound_iro(n, m, omega, 0.0);
            std::printf("mcsv_bound_iro (zeta=0):           %.17g\n", bi);
        } catch (const SpecError& e) {
            std::printf("mcsv_bound_iro out of regime: %s\n", e.what());
        }
        if (alternate_chi) {
            try {
                std::printf("mcsv_bound_iro (alternate chi):    %.17g\n",
                            mcsv_bound_iro(n, m, omega, 0.0, ChiParsing::AlternateSqrtRatio));
            } catch (const SpecError& e) {
                std::printf("mcsv_bound_iro (alternate chi) out of regime: %s\n", e.what());
            }
        }
    }
    try {
        std::printf("mcsv_bound_gaussian:               %.17g\n", mcsv_bound_gaussian(n, m, omega));
    } catch (const SpecError& e) {
        std::printf("mcsv_bound_gaussian unavailable: %s\n", e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained LASSO / minimum conic singular value workbench"};
    app.require_subcommand(1);

    CommonArgs nse_args, sigma_args, mcsv_args, width_args;
    std::vector<int> mcsv_k_list;
    int mcsv_restarts = 20, mcsv_iters = 2000, mcsv_trials = 0;

    CLI::App* cmd_nse = app.add_subcommand("nse", "Monte Carlo NSE sweep (CSV)");
    add_common(cmd_nse, nse_args);

    CLI::App* cmd_sigma =
        app.add_subcommand("sigma-profile", "NSE as a function of sigma at fixed m (CSV)");
    add_common(cmd_sigma, sigma_args);

    CLI::App* cmd_mcsv = app.add_subcommand("mcsv", "mCSV bounds and heuristic estimates (CSV)");
    add_common(cmd_mcsv, mcsv_args);
    cmd_mcsv->add_option("--k-list", mcsv_k_list, "sparsity grid (defaults to k)")->delimiter(',');
    cmd_mcsv->add_option("--restarts", mcsv_restarts, "restarts per empirical estimate");
    cmd_mcsv->add_option("--iters", mcsv_iters, "projected-descent iterations per restart");
    cmd_mcsv->add_option("--mcsv-trials", mcsv_trials,
                         "empirical draws per grid point (0 = bounds only)");

    CLI::App* cmd_width = app.add_subcommand("width", "statistical dimension of the l1 cone");
    add_common(cmd_width, width_args);

    int p_n = 256, p_m = 128, p_k = 10;
    double p_omega_sq = 0.0;
    bool p_alternate = false;
    CLI::App* cmd_predict = app.add_subcommand("predict", "closed-form predictions for (n, m, k)");
    cmd_predict->add_option("-n,--n", p_n, "ambient dimension");
    cmd_predict->add_option("-m,--m", p_m, "measurement count");
    cmd_predict->add_option("-k,--k", p_k, "sparsity (sets omega_sq unless given)");
    CLI::Option* p_omega_opt =
        cmd_predict->add_option("--omega-sq", p_omega_sq, "override the width value");
    cmd_predict->add_flag("--alternate-chi", p_alternate,
                          "also evaluate the alternate sqrt(m/n) reading of chi");

    std::string summarize_path;
    CLI::App* cmd_summarize = app.add_subcommand("summarize", "grouped stats for a trial CSV");
    cmd_summarize->add_option("csv", summarize_path, "trial CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_nse->parsed()) {
            ExperimentSpec spec = build_spec(nse_args);
            std::vector<TrialRecord> rows = run_nse_sweep(spec);
            emit(spec.output_path, [&](std::ostream& os) { write_trial_csv(rows, os); });
        } else if (cmd_sigma->parsed()) {
            ExperimentSpec spec = build_spec(sigma_args);
            std::vector<TrialRecord> rows = run_sigma_profile(spec);
            emit(spec.output_path, [&](std::ostream& os) { write_trial_csv(rows, os); });
        } else if (cmd_mcsv->parsed()) {
            ExperimentSpec spec = build_spec(mcsv_args);
            if (!mcsv_k_list.empty()) spec.k_list = mcsv_k_list;
            if (cmd_mcsv->count("--restarts")) spec.mcsv_restarts = mcsv_restarts;
            if (cmd_mcsv->count("--iters")) spec.mcsv_iters = mcsv_iters;
            if (cmd_mcsv->count("--mcsv-trials")) spec.mcsv_trials = mcsv_trials;
            std::vector<McsvRow> rows = run_mcsv_sweep(spec);
            emit(spec.output_path, [&](std::ostream& os) { write_mcsv_csv(rows, os); });
        } else if (cmd_width->parsed()) {
            ExperimentSpec spec = build_spec(width_args);
            if (spec.width_method == WidthMethod::MonteCarlo && !spec.has_seed)
                throw SpecError("width --width-method mc needs --seed");
            RandomSource src(spec.master_seed);
            RandomStream ws = src.stream("width", spec.k);
            WidthEstimate w =
                estimate_width(spec.n, spec.k, spec.width_method, spec.width_samples, ws);
            const char* method = w.method == WidthMethod::MonteCarlo
                                     ? "mc"
                                     : (w.method == WidthMethod::LogBound ? "log_bound"
                                                                          : "closed_form");
            std::printf("n=%d k=%d method=%s omega_sq=%.17g std_err=%.17g samples=%d\n", spec.n,
                        spec.k, method, w.omega_sq, w.std_err, w.samples);
        } else if (cmd_predict->parsed()) {
            return run_predict(p_n, p_m, p_k, p_omega_sq, p_omega_opt->count() > 0, p_alternate);
        } else if (cmd_summarize->parsed()) {
            std::fputs(format_summary(summarize_file(summarize_path)).c_str(), stdout);
        }
    } catch (const RegimeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const SpecError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
