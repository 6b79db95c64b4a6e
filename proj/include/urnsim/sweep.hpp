#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urnsim/estimators.hpp"
#include "urnsim/spec.hpp"

namespace urnsim {

struct CheckpointStat {
    double d = 0;
    double k_mc_mean = 0;
    double k_mc_std = 0; // sample standard deviation across replicates
    double k_analytic = 0;
    double loss_mc_mean = 0; // NaN when no loss params configured
    double loss_model = 0;   // NaN when no loss params configured
};

struct SweepResult {
    ExperimentSpec spec;
    std::uint64_t hash = 0;
    std::string tool_version;
    std::vector<CheckpointStat> rows;
    Histogram pooled_final_histogram; // merged across replicates
    std::uint64_t pooled_final_activations = 0;

    std::optional<BreakpointFit> k_knee_fit; // log10 K vs log10 D
    std::optional<PowerLawFit> count_fit;    // pooled final counts
    std::optional<LossCurveFit> loss_fit;    // loss_mc_mean vs D
    std::vector<std::string> notes;          // fits that were skipped, and why
};

// Runs `spec.replicates` independent simulations (replicate r uses the RNG
// stream derived from (seed, r)) and aggregates per checkpoint. Replicates
// fan out across an OpenMP worker pool; aggregation happens afterwards in
// replicate order, so the result is a pure function of the spec and never
// of the worker count. workers == 0 means one worker per hardware thread.
SweepResult run_sweep(const ExperimentSpec& spec, unsigned workers = 0);

// Analytic-side b override used by verify's negative control.
SweepResult run_sweep_injected(const ExperimentSpec& spec, unsigned workers,
                               std::optional<double> analytic_b_override);

} // namespace urnsim
