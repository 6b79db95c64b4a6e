#include "urnsim/sweep.hpp"

#include <cmath>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "urnsim/errors.hpp"
#include "urnsim/version.hpp"

namespace urnsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

} // namespace

SweepResult run_sweep_injected(const ExperimentSpec& spec, unsigned workers,
                               std::optional<double> analytic_b_override) {
    spec.validate();
    const auto schedule = spec.checkpoint_schedule();
    const UrnConfig cfg = spec.urn_config();
    const std::uint64_t d_target = schedule.back();
    const std::size_t n_rep = spec.replicates;

    std::vector<Trajectory> trajectories(n_rep);
    std::vector<std::exception_ptr> errors(n_rep);

#ifdef _OPENMP
    const int n_threads = workers == 0 ? omp_get_max_threads() : static_cast<int>(workers);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
    for (std::size_t r = 0; r < n_rep; ++r) {
        try {
            trajectories[r] = simulate(cfg, d_target, schedule, r);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
#ifndef _OPENMP
    (void)workers;
#endif
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ModelParams analytic_params = spec.model;
    if (analytic_b_override) analytic_params.b = *analytic_b_override;

    SweepResult result;
    result.spec = spec;
    result.hash = spec_hash(spec);
    result.tool_version = std::string(kToolVersion);
    result.rows.reserve(schedule.size());

    for (std::size_t ci = 0; ci < schedule.size(); ++ci) {
        CheckpointStat row;
        row.d = static_cast<double>(schedule[ci]);

        double mean = 0.0;
        for (std::size_t r = 0; r < n_rep; ++r)
            mean += static_cast<double>(trajectories[r].checkpoints[ci].working);
        mean /= static_cast<double>(n_rep);
        double ss = 0.0;
        for (std::size_t r = 0; r < n_rep; ++r) {
            const double dev =
                static_cast<double>(trajectories[r].checkpoints[ci].working) - mean;
            ss += dev * dev;
        }
        row.k_mc_mean = mean;
        row.k_mc_std = n_rep > 1 ? std::sqrt(ss / static_cast<double>(n_rep - 1)) : 0.0;
        row.k_analytic = k_closed_form(analytic_params, row.d);

        if (spec.loss) {
            double lsum = 0.0;
            for (std::size_t r = 0; r < n_rep; ++r)
                lsum += mixture_loss(trajectories[r].checkpoints[ci].histogram, row.d,
                                     *spec.loss, spec.model);
            row.loss_mc_mean = lsum / static_cast<double>(n_rep);
            row.loss_model = expected_loss(*spec.loss, spec.model, row.d);
        } else {
            row.loss_mc_mean = kNan;
            row.loss_model = kNan;
        }
        result.rows.push_back(row);
    }

    for (std::size_t r = 0; r < n_rep; ++r) {
        const Checkpoint& last = trajectories[r].checkpoints.back();
        for (const auto& [k, cnt] : last.histogram)
            result.pooled_final_histogram[k] += cnt;
        result.pooled_final_activations += last.total_activations;
    }

    // attached fits; a fit that cannot run is recorded, not fatal
    if (result.rows.size() >= 8) {
        bool positive = true;
        for (const auto& row : result.rows)
            if (!(row.k_mc_mean > 0)) positive = false;
        if (positive) {
            std::vector<double> xs, ys;
            for (const auto& row : result.rows) {
                xs.push_back(std::log10(row.d));
                ys.push_back(std::log10(row.k_mc_mean));
            }
            try {
                result.k_knee_fit = fit_breakpoint(xs, ys);
            } catch (const FitError& e) {
                result.notes.push_back(std::string("k_knee_fit skipped: ") + e.what());
            }
        } else {
            result.notes.push_back("k_knee_fit skipped: zero K at some checkpoint");
        }
    } else {
        result.notes.push_back("k_knee_fit skipped: fewer than 8 checkpoints");
    }

    try {
        result.count_fit = fit_power_law(histogram_samples(result.pooled_final_histogram));
    } catch (const FitError& e) {
        result.notes.push_back(std::string("count_fit skipped: ") + e.what());
    }

    if (spec.loss) {
        // fit the falling section only; the noise plateau bends the other
        // way and breaks the bracket of the l_opt search
        const double gap = spec.loss->l_noise - spec.loss->l_opt;
        std::vector<double> ds, ls;
        for (const auto& row : result.rows) {
            if (row.loss_mc_mean < spec.loss->l_noise - 0.10 * gap) {
                ds.push_back(row.d);
                ls.push_back(row.loss_mc_mean);
            }
        }
        if (ds.size() >= 6) {
            try {
                result.loss_fit = fit_loss_curve(ds, ls);
            } catch (const FitError& e) {
                result.notes.push_back(std::string("loss_fit skipped: ") + e.what());
            }
        } else {
            result.notes.push_back(
                "loss_fit skipped: fewer than 6 checkpoints past the noise plateau");
        }
    }

    return result;
}

SweepResult run_sweep(const ExperimentSpec& spec, unsigned workers) {
    return run_sweep_injected(spec, workers, std::nullopt);
}

} // namespace urnsim
