// Command-line front end: simulate, analytic, loss, fit, sweep, verify, plot.
// Exit codes: 0 success, 1 usage/domain error, 2 verification failure, 3 I/O.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urnsim/errors.hpp"
#include "urnsim/report.hpp"
#include "urnsim/version.hpp"

namespace {

using namespace urnsim;

struct Grid {
    double min_d = 1;
    double max_d = 1;
    std::uint64_t count = 2;
};

Grid parse_grid(const std::string& s) {
    Grid g;
    const auto p1 = s.find(':');
    const auto p2 = s.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw ConfigError("grid must be MIN:MAX:COUNT, e.g. 1:1e14:50");
    try {
        g.min_d = std::stod(s.substr(0, p1));
        g.max_d = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
        g.count = std::stoull(s.substr(p2 + 1));
    } catch (...) {
        throw ConfigError("grid must be MIN:MAX:COUNT with numeric fields");
    }
    if (!(g.min_d > 0) || !(g.max_d >= g.min_d) || g.count < 1)
        throw ConfigError("grid requires 0 < MIN <= MAX and COUNT >= 1");
    return g;
}

std::vector<double> grid_points(const Grid& g) {
    std::vector<double> out;
    if (g.count == 1) {
        out.push_back(g.max_d);
        return out;
    }
    const double l0 = std::log10(g.min_d);
    const double l1 = std::log10(g.max_d);
    for (std::uint64_t i = 0; i < g.count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(g.count - 1);
        out.push_back(std::pow(10.0, l0 + f * (l1 - l0)));
    }
    return out;
}

std::vector<std::uint64_t> integer_schedule(const Grid& g) {
    std::vector<std::uint64_t> out;
    for (double d : grid_points(g)) {
        const auto v = static_cast<std::uint64_t>(std::llround(d));
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    return out;
}

std::string f17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    if (path == "-" || path.empty())
        std::fwrite(content.data(), 1, content.size(), stdout);
    else
        write_atomic(path, content);
}

// ---------------------------------------------------------------------------

int cmd_simulate(double n, double b, double c, const std::string& mode,
                 std::uint64_t seed, std::uint64_t replicate, double d_target,
                 std::optional<std::string> grid_str, const std::string& out,
                 const std::string& hist_out) {
    UrnConfig cfg;
    cfg.neurons = static_cast<std::uint64_t>(n);
    cfg.seed_weight = b;
    cfg.budget = static_cast<std::uint64_t>(c);
    cfg.mode = activation_mode_from_string(mode);
    cfg.seed = seed;
    const auto d = static_cast<std::uint64_t>(std::llround(d_target));
    Grid g{1, static_cast<double>(std::max<std::uint64_t>(d, 1)), 20};
    if (grid_str) g = parse_grid(*grid_str);
    auto schedule = integer_schedule(g);
    while (!schedule.empty() && schedule.back() > d) schedule.pop_back();
    const Trajectory traj = simulate(cfg, d, schedule, replicate);

    std::ostringstream os;
    char prov[128];
    std::snprintf(prov, sizeof(prov), "# seed=%llu replicate=%llu tool=urnsim-%s\n",
                  static_cast<unsigned long long>(seed),
                  static_cast<unsigned long long>(replicate),
                  std::string(kToolVersion).c_str());
    os << prov << "D,K,activations\n";
    for (const auto& cp : traj.checkpoints)
        os << cp.samples << ',' << cp.working << ',' << cp.total_activations << '\n';
    write_text(out, os.str());

    if (!hist_out.empty()) {
        std::ostringstream hs;
        hs << prov << "k,count\n";
        for (const auto& [k, count] : traj.checkpoints.back().histogram)
            hs << k << ',' << count << '\n';
        write_text(hist_out, hs.str());
    }
    return 0;
}

int cmd_analytic_k(const ModelParams& p, const Grid& g, std::uint64_t ode_per_decade,
                   const std::string& out) {
    p.validate();
    std::ostringstream os;
    os << "D,K_closed_form,K_large_limit,K_ode,compressibility_ratio,avg_samples_per_working\n";
    const double m = p.b * p.n / p.c;
    for (double d : grid_points(g)) {
        const double kc = k_closed_form(p, d);
        const double kl = k_large_limit(p, d);
        double ko = std::numeric_limits<double>::quiet_NaN();
        if (ode_per_decade > 0) {
            const double decades =
                std::max(1.0, std::log10((d + m) / (p.d0 + m)) + 1.0);
            ko = k_ode(p, d, static_cast<std::uint64_t>(decades * ode_per_decade));
        }
        const double ratio = compressibility_ratio(p, d);
        const double avg = kc > 0 && d > 0 ? p.c * d / kc
                                           : std::numeric_limits<double>::quiet_NaN();
        os << f17(d) << ',' << f17(kc) << ',' << f17(kl) << ',' << f17(ko) << ','
           << f17(ratio) << ',' << f17(avg) << '\n';
    }
    write_text(out, os.str());
    return 0;
}

int cmd_fit_powerlaw(const std::string& input, const std::string& column,
                     const std::string& count_column) {
    const CsvTable table = read_csv(input);
    const auto values = table.column(column);
    std::vector<std::uint64_t> samples;
    const auto push_value = [&](double v, std::uint64_t times) {
        if (!(v >= 1) || std::abs(v - std::llround(v)) > 1e-9)
            throw FitError("fit powerlaw: column values must be positive integers");
        for (std::uint64_t i = 0; i < times; ++i)
            samples.push_back(static_cast<std::uint64_t>(std::llround(v)));
    };
    if (count_column.empty()) {
        for (double v : values) push_value(v, 1);
    } else {
        const auto counts = table.column(count_column);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(counts[i] >= 0))
                throw FitError("fit powerlaw: counts must be non-negative");
            push_value(values[i], static_cast<std::uint64_t>(std::llround(counts[i])));
        }
    }
    const PowerLawFit fit = fit_power_law(samples);
    std::printf("alpha_hat=%s x_min=%llu n_tail=%zu ks_distance=%s log_likelihood=%s\n",
                f17(fit.alpha_hat).c_str(),
                static_cast<unsigned long long>(fit.x_min), fit.n_tail,
                f17(fit.ks_distance).c_str(), f17(fit.log_likelihood).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic neuron-activation simulator and analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(urnsim::kToolVersion));

    // ------------------------------------------------------------- simulate
    auto* sim = app.add_subcommand("simulate", "Run one replicate of the activation process");
    double sim_n = 0, sim_b = 1, sim_c = 1, sim_d = 0;
    std::string sim_mode = "fixed-c", sim_out = "-", sim_hist_out;
    std::uint64_t sim_seed = 42, sim_rep = 0;
    std::string sim_grid;
    sim->add_option("--n", sim_n, "neuron count N")->required();
    sim->add_option("--b", sim_b, "seeding constant b")->required();
    sim->add_option("--c", sim_c, "activations per sample c")->required();
    sim->add_option("--d", sim_d, "target sample count D")->required();
    sim->add_option("--mode", sim_mode, "fixed-c | bernoulli | single-draw");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--replicate", sim_rep, "replicate id (stream selector)");
    sim->add_option("--grid", sim_grid, "checkpoint grid MIN:MAX:COUNT (default 1:D:20)");
    sim->add_option("--out", sim_out, "output csv path or - for stdout");
    sim->add_option("--histogram-out", sim_hist_out, "final histogram csv path");

    // ------------------------------------------------------------- analytic
    auto* ana = app.add_subcommand("analytic", "Closed-form growth-law curves");
    auto* ana_k = ana->add_subcommand("k", "Tabulate K(D) and derived quantities");
    double ak_n = 0, ak_b = 1, ak_c = 1, ak_k0 = 0, ak_d0 = 0;
    std::string ak_grid = "1:1e9:40", ak_out = "-";
    std::uint64_t ak_ode = 10000;
    ana_k->add_option("--n", ak_n, "neuron count N")->required();
    ana_k->add_option("--b", ak_b, "seeding constant b")->required();
    ana_k->add_option("--c", ak_c, "activations per sample c")->required();
    ana_k->add_option("--k0", ak_k0, "initial working count");
    ana_k->add_option("--d0", ak_d0, "initial sample count");
    ana_k->add_option("--d-grid", ak_grid, "evaluation grid MIN:MAX:COUNT");
    ana_k->add_option("--ode-steps-per-decade", ak_ode, "RK4 steps per decade (0 = skip)");
    ana_k->add_option("--out", ak_out, "output csv path or - for stdout");

    auto* ana_r = ana->add_subcommand("regime", "Classify a point against the knee");
    double ar_n = 0, ar_b = 1, ar_c = 1, ar_logd = 0, ar_eps = 0.5;
    ana_r->add_option("--n", ar_n)->required();
    ana_r->add_option("--b", ar_b)->required();
    ana_r->add_option("--c", ar_c)->required();
    ana_r->add_option("--log10-d", ar_logd, "log10 of the sample count")->required();
    ana_r->add_option("--epsilon", ar_eps, "transition half-width, log10 units");
    ana->require_subcommand(1);

    // ----------------------------------------------------------------- loss
    auto* loss = app.add_subcommand("loss", "Loss-model curves and distributions");
    auto* loss_exp = loss->add_subcommand("expected", "Closed-form loss curve");
    double le_lnoise = 1, le_lopt = 0, le_alpha = 0.5, le_bsub = 1, le_csub = 1,
           le_nsub = 1, le_eps = 0.5;
    double le_mn = 1, le_mb = 1, le_mc = 1;
    std::string le_grid = "1:1e9:40", le_out = "-";
    loss_exp->add_option("--l-noise", le_lnoise)->required();
    loss_exp->add_option("--l-opt", le_lopt)->required();
    loss_exp->add_option("--alpha", le_alpha)->required();
    loss_exp->add_option("--b-sub", le_bsub)->required();
    loss_exp->add_option("--c-sub", le_csub)->required();
    loss_exp->add_option("--n-sub", le_nsub)->required();
    loss_exp->add_option("--epsilon", le_eps);
    loss_exp->add_option("--model-n", le_mn, "layer N (only c enters the curve)");
    loss_exp->add_option("--model-b", le_mb, "layer b");
    loss_exp->add_option("--model-c", le_mc, "layer c");
    loss_exp->add_option("--d-grid", le_grid, "evaluation grid MIN:MAX:COUNT");
    loss_exp->add_option("--out", le_out);

    auto* loss_pmf = loss->add_subcommand("pmf", "Steady-state count distributions");
    std::string lp_kind = "exact", lp_out = "-";
    double lp_b = 1, lp_alpha = 0.5, lp_n = 0;
    std::uint64_t lp_dmax = 100, lp_activations = 0;
    loss_pmf->add_option("--kind", lp_kind, "exact | powerlaw | marginal");
    loss_pmf->add_option("--b", lp_b, "seeding constant (exact, marginal)");
    loss_pmf->add_option("--alpha", lp_alpha, "power-law shape (powerlaw)");
    loss_pmf->add_option("--d-max", lp_dmax, "support upper end (exact, powerlaw)");
    loss_pmf->add_option("--n", lp_n, "neuron count (marginal)");
    loss_pmf->add_option("--activations", lp_activations, "total activations (marginal)");
    loss_pmf->add_option("--out", lp_out);

    auto* loss_band = loss->add_subcommand("band", "Transition-band mass");
    double lb_alpha = 0.5, lb_eps = 0.5, lb_bsub = 1, lb_csub = 1, lb_nsub = 1,
           lb_dmax = 0;
    loss_band->add_option("--alpha", lb_alpha)->required();
    loss_band->add_option("--epsilon", lb_eps, "half-width, log10 units")->required();
    loss_band->add_option("--b-sub", lb_bsub)->required();
    loss_band->add_option("--c-sub", lb_csub)->required();
    loss_band->add_option("--n-sub", lb_nsub)->required();
    loss_band->add_option("--d-max", lb_dmax)->required();
    loss->require_subcommand(1);

    // ------------------------------------------------------------------ fit
    auto* fit = app.add_subcommand("fit", "Fit estimators to CSV data");
    auto* fit_pl = fit->add_subcommand("powerlaw", "Discrete power-law MLE");
    std::string fp_input, fp_col = "d_i", fp_count_col;
    fit_pl->add_option("--input", fp_input, "csv file")->required();
    fit_pl->add_option("--column", fp_col, "value column name");
    fit_pl->add_option("--count-column", fp_count_col,
                       "optional multiplicity column (histogram input)");

    auto* fit_bp = fit->add_subcommand("breakpoint", "Two-segment piecewise-linear fit");
    std::string fb_input, fb_x = "D", fb_y = "K_mc_mean";
    bool fb_log_x = false, fb_log_y = false;
    fit_bp->add_option("--input", fb_input)->required();
    fit_bp->add_option("--x-col", fb_x, "x column name");
    fit_bp->add_option("--y-col", fb_y, "y column name");
    fit_bp->add_flag("--log10-x", fb_log_x, "apply log10 to x");
    fit_bp->add_flag("--log10-y", fb_log_y, "apply log10 to y");

    auto* fit_lc = fit->add_subcommand("losscurve", "L = l_opt + a D^-s fit");
    std::string fl_input, fl_d = "D", fl_l = "loss_mc_mean";
    fit_lc->add_option("--input", fl_input)->required();
    fit_lc->add_option("--d-col", fl_d);
    fit_lc->add_option("--l-col", fl_l);
    fit->require_subcommand(1);

    // ---------------------------------------------------------------- sweep
    auto* sweep = app.add_subcommand("sweep", "Replicate sweep from a TOML spec");
    std::string sw_config, sw_out_dir = ".";
    std::uint64_t sw_seed = 0;
    bool sw_seed_set = false;
    unsigned sw_workers = 0;
    sweep->add_option("--config", sw_config, "experiment spec (TOML)")->required();
    sweep->add_option("--seed", sw_seed, "override the spec seed")
        ->each([&](const std::string&) { sw_seed_set = true; });
    sweep->add_option("--workers", sw_workers, "worker threads (0 = hardware)");
    sweep->add_option("--out-dir", sw_out_dir, "directory for requested outputs");

    // --------------------------------------------------------------- verify
    auto* verify = app.add_subcommand("verify", "Simulation-vs-theory checks");
    std::string vf_config;
    std::uint64_t vf_seed = 0;
    bool vf_seed_set = false;
    unsigned vf_workers = 0;
    double vf_inject_b = 0;
    bool vf_inject_set = false;
    verify->add_option("--config", vf_config, "experiment spec (default: built-in desk scale)");
    verify->add_option("--seed", vf_seed, "override the spec seed")
        ->each([&](const std::string&) { vf_seed_set = true; });
    verify->add_option("--workers", vf_workers);
    verify->add_option("--inject-analytic-b", vf_inject_b,
                       "perturb the analytic b (negative control)")
        ->each([&](const std::string&) { vf_inject_set = true; });

    // ----------------------------------------------------------------- plot
    auto* plot = app.add_subcommand("plot", "Static SVG of K(D)");
    std::string pl_config, pl_out;
    double pn = 0, pb = 1, pc = 1;
    std::string pl_grid = "1:1e14:60";
    unsigned pl_workers = 0;
    plot->add_option("--out", pl_out, "output svg path")->required();
    plot->add_option("--config", pl_config, "spec file: sweep plot with MC points");
    plot->add_option("--n", pn, "analytic-only: neuron count");
    plot->add_option("--b", pb, "analytic-only: seeding constant");
    plot->add_option("--c", pc, "analytic-only: activations per sample");
    plot->add_option("--d-grid", pl_grid, "analytic-only grid MIN:MAX:COUNT");
    plot->add_option("--workers", pl_workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_n, sim_b, sim_c, sim_mode, sim_seed, sim_rep, sim_d,
                                sim_grid.empty() ? std::nullopt
                                                 : std::optional<std::string>(sim_grid),
                                sim_out, sim_hist_out);

        if (ana->parsed()) {
            if (ana_k->parsed())
                return cmd_analytic_k(ModelParams{ak_n, ak_b, ak_c, ak_k0, ak_d0},
                                      parse_grid(ak_grid), ak_ode, ak_out);
            const auto rep = urnsim::regime_classify(ModelParams{ar_n, ar_b, ar_c, 0, 0},
                                                     ar_logd, ar_eps);
            std::printf("breakpoint_log10=%s epsilon=%s regime=%s\n",
                        f17(rep.breakpoint_log10).c_str(), f17(rep.epsilon).c_str(),
                        urnsim::to_string(rep.regime).c_str());
            return 0;
        }

        if (loss->parsed()) {
            if (loss_exp->parsed()) {
                LossParams lp{le_lnoise, le_lopt, le_alpha, le_bsub, le_csub,
                              le_nsub, le_eps, TransitionShape::LinearInLogD};
                const ModelParams mp{le_mn, le_mb, le_mc, 0, 0};
                std::ostringstream os;
                os << "D,expected_loss\n";
                for (double d : grid_points(parse_grid(le_grid)))
                    os << f17(d) << ',' << f17(expected_loss(lp, mp, d)) << '\n';
                write_text(le_out, os.str());
                return 0;
            }
            if (loss_pmf->parsed()) {
                Pmf pmf;
                if (lp_kind == "exact") {
                    pmf = steady_state_pmf_exact(lp_b, lp_dmax);
                } else if (lp_kind == "powerlaw") {
                    pmf = steady_state_pmf_powerlaw(lp_alpha, lp_dmax);
                } else if (lp_kind == "marginal") {
                    if (!(lp_n >= 2) || lp_activations == 0)
                        throw ConfigError("loss pmf --kind marginal needs --n and --activations");
                    pmf = polya_marginal_pmf(lp_b, static_cast<std::uint64_t>(lp_n),
                                             lp_activations)
                              .positive;
                } else {
                    throw ConfigError("loss pmf: unknown kind '" + lp_kind + "'");
                }
                std::ostringstream os;
                os << "k,p\n";
                for (std::uint64_t k = 1; k <= pmf.d_max(); ++k)
                    os << k << ',' << f17(pmf.at(k)) << '\n';
                write_text(lp_out, os.str());
                return 0;
            }
            LossParams lp{1.0, 0.0, lb_alpha, lb_bsub, lb_csub,
                          lb_nsub, lb_eps, TransitionShape::LinearInLogD};
            std::printf("transition_mass=%s\n", f17(transition_mass(lp, lb_dmax)).c_str());
            return 0;
        }

        if (fit->parsed()) {
            if (fit_pl->parsed()) return cmd_fit_powerlaw(fp_input, fp_col, fp_count_col);
            if (fit_bp->parsed()) {
                const CsvTable t = read_csv(fb_input);
                auto xs = t.column(fb_x);
                auto ys = t.column(fb_y);
                if (fb_log_x)
                    for (double& v : xs) v = std::log10(v);
                if (fb_log_y)
                    for (double& v : ys) v = std::log10(v);
                const BreakpointFit f = fit_breakpoint(xs, ys);
                std::printf("breakpoint=%s slope_left=%s slope_right=%s rmse=%s\n",
                            f17(f.breakpoint).c_str(), f17(f.slope_left).c_str(),
                            f17(f.slope_right).c_str(), f17(f.rmse).c_str());
                return 0;
            }
            const CsvTable t = read_csv(fl_input);
            const LossCurveFit f = fit_loss_curve(t.column(fl_d), t.column(fl_l));
            std::printf("l_opt_hat=%s amplitude_hat=%s exponent_hat=%s rmse=%s\n",
                        f17(f.l_opt_hat).c_str(), f17(f.amplitude_hat).c_str(),
                        f17(f.exponent_hat).c_str(), f17(f.rmse).c_str());
            return 0;
        }

        if (sweep->parsed()) {
            ExperimentSpec spec = load_spec(sw_config);
            if (sw_seed_set) spec.seed = sw_seed;
            const SweepResult result = run_sweep(spec, sw_workers);
            emit_outputs(result, sw_out_dir);
            std::printf("sweep: %zu checkpoints, %llu replicates, spec_hash=%016llx\n",
                        result.rows.size(),
                        static_cast<unsigned long long>(spec.replicates),
                        static_cast<unsigned long long>(result.hash));
            if (result.k_knee_fit)
                std::printf("k knee: breakpoint=%.4f slopes=(%.4f, %.4f)\n",
                            result.k_knee_fit->breakpoint, result.k_knee_fit->slope_left,
                            result.k_knee_fit->slope_right);
            if (result.count_fit)
                std::printf("count power law: alpha_hat=%.4f x_min=%llu ks=%.4f\n",
                            result.count_fit->alpha_hat,
                            static_cast<unsigned long long>(result.count_fit->x_min),
                            result.count_fit->ks_distance);
            if (result.loss_fit)
                std::printf("loss curve: exponent_hat=%.4f l_opt_hat=%.4f rmse=%.5f\n",
                            result.loss_fit->exponent_hat, result.loss_fit->l_opt_hat,
                            result.loss_fit->rmse);
            for (const auto& note : result.notes) std::printf("%s\n", note.c_str());
            return 0;
        }

        if (verify->parsed()) {
            ExperimentSpec spec =
                vf_config.empty() ? default_desk_spec() : load_spec(vf_config);
            if (vf_seed_set) spec.seed = vf_seed;
            const VerifyReport report = run_verify(
                spec, vf_workers,
                vf_inject_set ? std::optional<double>(vf_inject_b) : std::nullopt);
            std::fputs(report.to_string().c_str(), stdout);
            return report.all_pass() ? 0 : 2;
        }

        if (plot->parsed()) {
            if (!pl_config.empty()) {
                const ExperimentSpec spec = load_spec(pl_config);
                const SweepResult result = run_sweep(spec, pl_workers);
                emit_plot(result, pl_out);
            } else {
                if (!(pn >= 1))
                    throw ConfigError("plot: give either --config or --n/--b/--c");
                const Grid g = parse_grid(pl_grid);
                emit_analytic_plot(ModelParams{pn, pb, pc, 0, 0},
                                   DGrid{g.count, g.min_d, g.max_d}, pl_out);
            }
            return 0;
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
