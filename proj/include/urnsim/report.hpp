#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urnsim/sweep.hpp"

namespace urnsim {

// All emitters write to a temporary file in the target directory and
// rename it into place, so a failed run never leaves a partial artifact.
// Floats are written with 17 significant digits (lossless round-trip);
// every file carries a `# spec_hash=... seed=...` provenance comment.

// Columns: D,K_mc_mean,K_mc_std,K_analytic,replicates,seed_hash
void emit_trajectory_csv(const SweepResult& result, const std::string& path);

// Columns: k,count  (pooled final-checkpoint histogram)
void emit_histogram_csv(const SweepResult& result, const std::string& path);

// Columns: D,loss_mc_mean,loss_model,replicates,seed_hash
void emit_loss_csv(const SweepResult& result, const std::string& path);

// Human-readable summary of the attached fits.
void emit_fit_report(const SweepResult& result, const std::string& path);

// Static SVG: log10 axes, MC points with error bars, analytic overlay,
// knee annotation at log10(bN/c).
void emit_plot(const SweepResult& result, const std::string& path);

// Analytic-only variant (no simulation data).
void emit_analytic_plot(const ModelParams& params, const DGrid& grid,
                        const std::string& path);

// Dispatch every output request in the spec, with paths resolved against
// out_dir (absolute request paths are used as-is).
void emit_outputs(const SweepResult& result, const std::string& out_dir);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const; // throws IoError
    std::vector<double> column(const std::string& name) const;
};

// Comma-separated, `#` comment lines skipped, numeric cells only.
CsvTable read_csv(const std::string& path);

void write_atomic(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// verify: simulation-against-theory checks with explicit tolerances

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    double measured = 0;
    double limit = 0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_string() const; // one PASS/FAIL/SKIP line per check
};

// Runs three checks against a sweep of the given spec:
//   growth-law            max |K_mc - K_analytic| in standard errors of
//                         the replicate mean, against verify.k_sigma
//   steady-state-freqs    KS distance between the pooled final positive-
//                         count histogram and the exact finite-N marginal
//                         of the reinforcement process
//   loss-decay            power-law fit of the mixture-loss sweep (falling
//                         section): exponent in (0,1) and rmse below
//                         verify.loss_rmse_frac of (l_noise - l_opt)
// inject_analytic_b perturbs only the analytic growth curve; it exists as
// a negative control for the growth-law check.
VerifyReport run_verify(const ExperimentSpec& spec, unsigned workers = 0,
                        std::optional<double> inject_analytic_b = std::nullopt);

// Desk-scale defaults used by `verify` when no spec file is given.
ExperimentSpec default_desk_spec();

} // namespace urnsim
