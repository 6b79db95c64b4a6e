// Acceptance suite. Each numbered check prints one PASS/FAIL line with its
// measured values and wall time; the exit code is the number of failures.
//
// Checks 3 and 4 pin the idealized balance-equation histogram and the
// b*N/c knee location. The exact process law disagrees with both at the
// pinned parameters (see the fit/KS numbers the checks print); they are
// kept as stated rather than loosened, and are expected to come out red.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "urnsim/errors.hpp"
#include "urnsim/report.hpp"

using namespace urnsim;
namespace chrono = std::chrono;

namespace {

int g_failures = 0;

struct Timer {
    chrono::steady_clock::time_point t0 = chrono::steady_clock::now();
    double seconds() const {
        return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, const char* name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] criterion %d (%s): %s (%.2f s)\n", pass ? "PASS" : "FAIL", id,
                name, detail.c_str(), seconds);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

// ---------------------------------------------------------------------- 1
void criterion_1_ode_vs_closed_form() {
    Timer timer;
    std::mt19937_64 gen(1);
    const auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    double worst = 0;
    for (int set = 0; set < 20; ++set) {
        ModelParams p;
        p.n = std::floor(std::pow(10.0, 2.0 + 4.0 * uniform()));
        p.b = 0.25 * std::pow(16.0, uniform());
        p.c = 1.0 + std::floor(uniform() * std::min(p.n - 1.0, 99.0));
        p.k0 = std::floor(uniform() * p.n / 2.0);
        p.d0 = std::floor(uniform() * 100.0);
        const double m = p.b * p.n / p.c;
        const double d_hi = 1e9 * m;
        for (int j = 1; j <= 12; ++j) {
            const double f = static_cast<double>(j) / 12.0;
            const double d = p.d0 + (std::pow(10.0, f * std::log10(1.0 + d_hi - p.d0)) - 1.0);
            const double decades = std::log10((d + m) / (p.d0 + m)) + 1.0;
            const auto steps = static_cast<std::uint64_t>(10000.0 * decades);
            const double ode = k_ode(p, d, steps);
            const double closed = k_closed_form(p, d);
            const double rel = std::abs(ode - closed) / std::max(std::abs(closed), 1e-300);
            worst = std::max(worst, rel);
        }
    }
    const double secs = timer.seconds();
    const bool pass = worst <= 1e-6 && secs < 10.0;
    report(1, "ode-vs-closed-form", pass,
           "max relative deviation " + fmt("%.3g", worst) + " over 20 random parameter sets"
           " (tolerance 1e-6, budget 10 s)",
           secs);
}

// ---------------------------------------------------------------------- 2
void criterion_2_mc_growth_law() {
    // The per-sample activation reading matters at this precision. In
    // bernoulli mode the growth recurrence is the exact expectation of the
    // process, so the comparison tests the closed form alone; fixed-c
    // draws without replacement carry a small extra bias (greedier free-
    // neuron pickup within a sample) and are reported alongside.
    Timer timer;
    ExperimentSpec spec;
    spec.model = ModelParams{1000, 1.0, 10, 0, 0};
    spec.seed = 42;
    spec.d_grid = DGrid{20, 1e2, 1e5};
    spec.replicates = 32;

    const auto worst_of = [&](ActivationMode mode) {
        ExperimentSpec s = spec;
        s.mode = mode;
        const SweepResult result = run_sweep(s, /*workers=*/1);
        double worst_z = 0, worst_d = 0;
        for (const auto& row : result.rows) {
            const double se = row.k_mc_std / std::sqrt(32.0);
            const double z = std::abs(row.k_mc_mean - row.k_analytic) / se;
            if (z > worst_z) {
                worst_z = z;
                worst_d = row.d;
            }
        }
        return std::pair<double, double>{worst_z, worst_d};
    };

    const auto [z_bern, d_bern] = worst_of(ActivationMode::Bernoulli);
    const auto [z_fixed, d_fixed] = worst_of(ActivationMode::FixedC);
    const double secs = timer.seconds();
    const bool pass = z_bern <= 3.0 && secs < 60.0;
    report(2, "mc-growth-law", pass,
           "max |K_mc - K_analytic| = " + fmt("%.2f", z_bern) +
               " standard errors at D=" + fmt("%.0f", d_bern) +
               " over 20 checkpoints, 32 replicates (limit 3, budget 60 s "
               "single-threaded); fixed-c reading for reference: " +
               fmt("%.2f", z_fixed) + " at D=" + fmt("%.0f", d_fixed),
           secs);
}

// ---------------------------------------------------------------------- 3
void criterion_3_steady_state_distribution() {
    Timer timer;
    UrnConfig cfg;
    cfg.neurons = 10000;
    cfg.seed_weight = 1.0;
    cfg.budget = 10;
    cfg.seed = 42;
    const std::uint64_t d = 1000000;
    const Trajectory t = simulate(cfg, d, std::vector<std::uint64_t>{d});
    const auto& hist = t.checkpoints.back().histogram;
    const auto samples = histogram_samples(hist);
    const std::uint64_t k_max = hist.rbegin()->first;

    const double ks = ks_distance(samples, steady_state_pmf_exact(1.0, k_max));
    double alpha_hat = -1;
    std::string alpha_note;
    try {
        alpha_hat = fit_power_law(samples).alpha_hat;
    } catch (const FitError& e) {
        alpha_note = e.what();
    }
    const double secs = timer.seconds();
    const bool alpha_ok = alpha_hat > 0.0 && alpha_hat < 1.0;
    const bool pass = ks < 0.05 && alpha_ok && secs < 120.0;
    report(3, "steady-state-distribution", pass,
           "KS vs balance-equation pmf = " + fmt("%.3f", ks) +
               " (limit 0.05); fitted alpha_hat = " + fmt("%.3f", alpha_hat) +
               (alpha_ok ? " in (0,1)" : " outside (0,1)") +
               (alpha_note.empty() ? "" : " [" + alpha_note + "]"),
           secs);
}

// ---------------------------------------------------------------------- 4
void criterion_4_phase_transition_knee() {
    Timer timer;
    const ModelParams fig{1e11, 1e3, 1e5, 0, 0};
    std::vector<double> xs, ys;
    for (double x = 0; x <= 14.0001; x += 0.25) {
        xs.push_back(x);
        ys.push_back(std::log10(k_large_limit(fig, std::pow(10.0, x))));
    }
    const BreakpointFit fit = fit_breakpoint(xs, ys);
    const double secs = timer.seconds();
    const bool knee_ok = std::abs(fit.breakpoint - 9.0) <= 1.0;
    const bool slopes_ok =
        std::abs(fit.slope_left - 1.0) <= 0.05 && std::abs(fit.slope_right) <= 0.05;
    const bool pass = knee_ok && slopes_ok && secs < 1.0;
    report(4, "phase-transition-knee", pass,
           "fitted breakpoint " + fmt("%.2f", fit.breakpoint) +
               " vs log10(bN/c) = 9 (tolerance 1.0); slopes (" +
               fmt("%.3f", fit.slope_left) + ", " + fmt("%.3f", fit.slope_right) +
               ") vs (1, 0) +- 0.05",
           secs);
}

// ---------------------------------------------------------------------- 5
void criterion_5_power_law_loss_decay() {
    Timer timer;

    // closed-form recovery
    LossParams lp;
    lp.l_noise = 1.0;
    lp.l_opt = 0.1;
    lp.alpha = 0.5;
    lp.b_sub = 1.0;
    lp.c_sub = 10.0;
    lp.n_sub = 1e4;
    lp.epsilon = 0.5;
    const ModelParams mp{1000, 1.0, 10, 0, 0};
    std::vector<double> ds, ls;
    for (double d = 1e2; d <= 1.0001e6; d *= std::pow(10.0, 0.25)) {
        ds.push_back(d);
        ls.push_back(expected_loss(lp, mp, d));
    }
    const LossCurveFit closed = fit_loss_curve(ds, ls);
    const bool closed_ok = std::abs(closed.exponent_hat - 0.5) <= 0.01 &&
                           std::abs(closed.l_opt_hat - 0.1) <= 0.01 * 0.1;

    // end-to-end: simulated histograms -> mixture sweep -> fit
    ExperimentSpec spec;
    spec.model = ModelParams{1000, 0.5, 10, 0, 0};
    spec.seed = 42;
    spec.d_grid = DGrid{16, 3162, 158489};
    spec.replicates = 8;
    LossParams sweep_loss = lp;
    sweep_loss.n_sub = 1e3; // knee at 100 activations
    sweep_loss.epsilon = 1.0;
    spec.loss = sweep_loss;
    const SweepResult result = run_sweep(spec, 0);
    std::vector<double> sd, sl;
    for (const auto& row : result.rows) {
        sd.push_back(row.d);
        sl.push_back(row.loss_mc_mean);
    }
    double e2e_exponent = -1, e2e_rmse = 1e300;
    std::string e2e_note;
    try {
        const LossCurveFit fit = fit_loss_curve(sd, sl);
        e2e_exponent = fit.exponent_hat;
        e2e_rmse = fit.rmse;
    } catch (const FitError& e) {
        e2e_note = e.what();
    }
    const double gap = sweep_loss.l_noise - sweep_loss.l_opt;
    const bool e2e_ok =
        e2e_exponent > 0.0 && e2e_exponent < 1.0 && e2e_rmse < 0.05 * gap;

    const double secs = timer.seconds();
    const bool pass = closed_ok && e2e_ok && secs < 120.0;
    report(5, "power-law-loss-decay", pass,
           "closed form: exponent " + fmt("%.4f", closed.exponent_hat) +
               " (0.5 +- 0.01), l_opt " + fmt("%.5f", closed.l_opt_hat) +
               " (0.1 +- 1%); end-to-end: exponent " + fmt("%.3f", e2e_exponent) +
               " in (0,1), rmse/gap " + fmt("%.4f", e2e_rmse / gap) + " (limit 0.05)" +
               (e2e_note.empty() ? "" : " [" + e2e_note + "]"),
           secs);
}

// ---------------------------------------------------------------------- 6
void criterion_6_compressibility() {
    Timer timer;
    double worst = 0;
    bool monotone = true;
    for (double b : {0.5, 1.0, 2.0, 8.0, 32.0, 128.0, 1000.0}) {
        for (double n : {1e3, 1e6, 1e11}) {
            for (double c : {1.0, 10.0, 1000.0}) {
                if (c > n) continue;
                const ModelParams p{n, b, c, 0, 0};
                const double c1 = (b / c) * n;
                for (int j = 0; j < 10; ++j) {
                    const double d = std::pow(10.0, j * 1.5);
                    const double got = compressibility_ratio(p, d);
                    const double form = std::pow(c1 / (d + c1), b);
                    const double rel =
                        form > 0 ? std::abs(got - form) / form : std::abs(got - form);
                    worst = std::max(worst, rel);
                }
                // strict N-monotonicity on a knee-centered grid, skipping
                // the regime where the power underflows to zero for both
                for (int j = 0; j < 10; ++j) {
                    const double d = c1 * std::pow(10.0, (j - 4.5) * 2.0 / 3.0);
                    const double small = compressibility_ratio(p, d);
                    ModelParams big = p;
                    big.n = 10 * n;
                    if (small < 1e-290) continue;
                    if (!(compressibility_ratio(big, d) > small)) monotone = false;
                }
            }
        }
    }
    const double secs = timer.seconds();
    const bool pass = worst <= 1e-12 && monotone;
    report(6, "compressibility-predictions", pass,
           "max deviation from (C1/(D+C1))^C2 = " + fmt("%.3g", worst) +
               " (limit 1e-12); ratio strictly increases with N: " +
               (monotone ? "yes" : "no"),
           secs);
}

// ---------------------------------------------------------------------- 7
void criterion_7_sampler_equivalence() {
    Timer timer;
    std::mt19937_64 gen(7);
    const auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };

    // a pool of states: fresh, evolved, and adversarially heavy-tailed
    std::vector<UrnState> states;
    for (int i = 0; i < 48; ++i) {
        const std::uint64_t n = 1 + gen() % 4096;
        UrnConfig cfg;
        cfg.neurons = n;
        cfg.seed_weight = 0.05 + 4.0 * uniform();
        cfg.budget = 1 + gen() % std::min<std::uint64_t>(n, 16);
        cfg.seed = gen();
        UrnState state(cfg);
        const int kind = i % 3;
        if (kind >= 1) {
            Rng rng(derive_stream_seed(cfg.seed, 0));
            const int steps = 50 + static_cast<int>(gen() % 500);
            for (int s = 0; s < steps; ++s) state.apply_sample(state.draw_sample(rng));
        }
        if (kind == 2) {
            // pile a huge count onto a few indices
            for (int h = 0; h < 3; ++h) {
                const std::uint64_t idx = gen() % n;
                std::vector<std::uint64_t> one{idx};
                for (int rep = 0; rep < 64; ++rep) state.apply_sample(one);
            }
        }
        states.push_back(std::move(state));
    }

    std::uint64_t mismatches = 0;
    const std::uint64_t cases = 1000000;
    for (std::uint64_t t = 0; t < cases; ++t) {
        const UrnState& s = states[t % states.size()];
        double u = uniform();
        if (t % 9973 == 0) u = 0.0;
        if (t % 9974 == 0) u = 1.0 - 0x1.0p-53;
        if (s.reference_draw(u) != s.indexed_draw(u)) ++mismatches;
    }
    const double secs = timer.seconds();
    report(7, "sampler-oracle-equivalence", mismatches == 0,
           std::to_string(mismatches) + " mismatches over 1e6 randomized (state, u) cases",
           secs);
}

// ---------------------------------------------------------------------- 8
void criterion_8_sweep_determinism() {
    Timer timer;
    ExperimentSpec spec;
    spec.model = ModelParams{500, 1.0, 5, 0, 0};
    spec.seed = 42;
    spec.d_grid = DGrid{12, 50, 20000};
    spec.replicates = 8;
    LossParams lp;
    lp.l_noise = 1.0;
    lp.l_opt = 0.1;
    lp.alpha = 0.5;
    lp.b_sub = 1.0;
    lp.c_sub = 5.0;
    lp.n_sub = 500.0;
    lp.epsilon = 1.0;
    spec.loss = lp;

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "urnsim_acceptance_det";
    fs::create_directories(dir);
    std::vector<std::string> blobs;
    for (unsigned workers : {1u, 4u, 8u}) {
        const SweepResult r = run_sweep(spec, workers);
        const fs::path traj = dir / ("t" + std::to_string(workers) + ".csv");
        const fs::path loss = dir / ("l" + std::to_string(workers) + ".csv");
        const fs::path fits = dir / ("f" + std::to_string(workers) + ".txt");
        emit_trajectory_csv(r, traj.string());
        emit_loss_csv(r, loss.string());
        emit_fit_report(r, fits.string());
        std::string blob;
        for (const auto& p : {traj, loss, fits}) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            blob += ss.str();
        }
        blobs.push_back(blob);
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    const bool pass = blobs[0] == blobs[1] && blobs[1] == blobs[2];
    report(8, "sweep-determinism", pass,
           std::string("emitted artifacts byte-identical across worker counts {1,4,8}: ") +
               (pass ? "yes" : "NO"),
           timer.seconds());
}

// ---------------------------------------------------------------------- 9
void criterion_9_loss_phase_transition() {
    Timer timer;
    ExperimentSpec spec;
    spec.model = ModelParams{1000, 1.0, 10, 0, 0};
    spec.seed = 42;
    spec.d_grid = DGrid{33, 1e2, 3162278}; // 10^6.5
    spec.replicates = 8;
    LossParams lp;
    lp.l_noise = 1.0;
    lp.l_opt = 0.1;
    lp.alpha = 0.5;
    lp.b_sub = 1.0;
    lp.c_sub = 10.0;
    lp.n_sub = 1e3; // knee at 100 activations
    lp.epsilon = 0.5;
    spec.loss = lp;
    const SweepResult result = run_sweep(spec, 0);
    const double gap = lp.l_noise - lp.l_opt;

    // split the sweep at the half-gap crossing, then fit each side
    std::vector<double> xs, ls;
    for (const auto& row : result.rows) {
        xs.push_back(std::log10(row.d));
        ls.push_back(row.loss_mc_mean);
    }
    std::size_t mid = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const double dev = std::abs(ls[i] - (lp.l_opt + gap / 2));
        if (dev < best) {
            best = dev;
            mid = i;
        }
    }
    const auto left_x = std::vector<double>(xs.begin(), xs.begin() + mid + 2);
    const auto left_l = std::vector<double>(ls.begin(), ls.begin() + mid + 2);
    const auto right_x = std::vector<double>(xs.begin() + mid - 1, xs.end());
    const auto right_l = std::vector<double>(ls.begin() + mid - 1, ls.end());
    const BreakpointFit left = fit_breakpoint(left_x, left_l);
    const BreakpointFit right = fit_breakpoint(right_x, right_l);

    const double secs = timer.seconds();
    const bool shape_ok = left.slope_left > -0.15 && left.slope_right < left.slope_left &&
                          right.slope_right > -0.15 && right.slope_left < right.slope_right;
    const bool pass =
        left.rmse <= 0.02 * gap && right.rmse <= 0.02 * gap && shape_ok;
    report(9, "loss-phase-transition-shape", pass,
           "two-stage knee fits: rmse/gap = " + fmt("%.4f", left.rmse / gap) + " and " +
               fmt("%.4f", right.rmse / gap) +
               " (limit 0.02); segment slopes (" + fmt("%.3f", left.slope_left) + " -> " +
               fmt("%.3f", left.slope_right) + "), (" + fmt("%.3f", right.slope_left) +
               " -> " + fmt("%.3f", right.slope_right) + ")",
           secs);
}

} // namespace

int main() {
    criterion_1_ode_vs_closed_form();
    criterion_2_mc_growth_law();
    criterion_3_steady_state_distribution();
    criterion_4_phase_transition_knee();
    criterion_5_power_law_loss_decay();
    criterion_6_compressibility();
    criterion_7_sampler_equivalence();
    criterion_8_sweep_determinism();
    criterion_9_loss_phase_transition();
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
