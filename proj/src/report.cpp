#include "urnsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "urnsim/errors.hpp"
#include "urnsim/rng.hpp"
#include "urnsim/version.hpp"

namespace urnsim {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::uint64_t seed_hash_of(const SweepResult& r) {
    std::uint64_t s = r.hash ^ (0x9E3779B97F4A7C15ULL * (r.spec.seed + 1));
    return splitmix64(s);
}

std::string provenance_line(const SweepResult& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "# spec_hash=%016llx seed=%llu tool=urnsim-%s\n",
                  static_cast<unsigned long long>(r.hash),
                  static_cast<unsigned long long>(r.spec.seed),
                  std::string(r.tool_version).c_str());
    return buf;
}

std::string seed_hash_hex(const SweepResult& r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(seed_hash_of(r)));
    return buf;
}

} // namespace

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into place: " + path);
    }
}

void emit_trajectory_csv(const SweepResult& result, const std::string& path) {
    std::ostringstream out;
    out << provenance_line(result);
    out << "D,K_mc_mean,K_mc_std,K_analytic,replicates,seed_hash\n";
    const std::string sh = seed_hash_hex(result);
    for (const auto& row : result.rows)
        out << fmt17(row.d) << ',' << fmt17(row.k_mc_mean) << ',' << fmt17(row.k_mc_std)
            << ',' << fmt17(row.k_analytic) << ',' << result.spec.replicates << ','
            << sh << '\n';
    write_atomic(path, out.str());
}

void emit_histogram_csv(const SweepResult& result, const std::string& path) {
    std::ostringstream out;
    out << provenance_line(result);
    out << "k,count\n";
    for (const auto& [k, count] : result.pooled_final_histogram)
        out << k << ',' << count << '\n';
    write_atomic(path, out.str());
}

void emit_loss_csv(const SweepResult& result, const std::string& path) {
    if (!result.spec.loss)
        throw DomainError("emit_loss_csv: spec has no loss parameters");
    std::ostringstream out;
    out << provenance_line(result);
    out << "D,loss_mc_mean,loss_model,replicates,seed_hash\n";
    const std::string sh = seed_hash_hex(result);
    for (const auto& row : result.rows)
        out << fmt17(row.d) << ',' << fmt17(row.loss_mc_mean) << ','
            << fmt17(row.loss_model) << ',' << result.spec.replicates << ',' << sh
            << '\n';
    write_atomic(path, out.str());
}

void emit_fit_report(const SweepResult& result, const std::string& path) {
    std::ostringstream out;
    out << provenance_line(result);
    if (result.k_knee_fit) {
        const auto& f = *result.k_knee_fit;
        out << "k_knee_fit: breakpoint=" << fmt17(f.breakpoint)
            << " slope_left=" << fmt17(f.slope_left)
            << " slope_right=" << fmt17(f.slope_right) << " rmse=" << fmt17(f.rmse)
            << "\n";
    }
    if (result.count_fit) {
        const auto& f = *result.count_fit;
        out << "count_fit: alpha_hat=" << fmt17(f.alpha_hat) << " x_min=" << f.x_min
            << " n_tail=" << f.n_tail << " ks_distance=" << fmt17(f.ks_distance)
            << " log_likelihood=" << fmt17(f.log_likelihood) << "\n";
    }
    if (result.loss_fit) {
        const auto& f = *result.loss_fit;
        out << "loss_fit: l_opt_hat=" << fmt17(f.l_opt_hat)
            << " amplitude_hat=" << fmt17(f.amplitude_hat)
            << " exponent_hat=" << fmt17(f.exponent_hat) << " rmse=" << fmt17(f.rmse)
            << "\n";
    }
    for (const auto& note : result.notes) out << "note: " << note << "\n";
    write_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct PlotPoint {
    double x, y; // log10 coordinates
};

struct PlotSeries {
    std::vector<PlotPoint> curve;            // analytic overlay
    std::vector<PlotPoint> mc;               // replicate means
    std::vector<double> mc_err;              // +- one std, linear K units
    std::vector<double> mc_k;                // linear K (for error bars)
    double knee_log10 = 0;
    std::string title;
    std::string provenance;
};

void render_svg(const PlotSeries& s, const std::string& path) {
    constexpr double kW = 720, kH = 540;
    constexpr double kL = 70, kR = 24, kT = 40, kB = 56;

    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    const auto absorb = [&](const PlotPoint& p) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    };
    for (const auto& p : s.curve) absorb(p);
    for (const auto& p : s.mc) absorb(p);
    x_min = std::floor(x_min);
    x_max = std::ceil(std::max(x_max, x_min + 1));
    y_min = std::floor(y_min);
    y_max = std::ceil(std::max(y_max, y_min + 1));
    // keep the knee inside the frame when it is close
    if (s.knee_log10 > x_min && s.knee_log10 > x_max) x_max = std::ceil(s.knee_log10);

    const auto px = [&](double x) { return kL + (x - x_min) / (x_max - x_min) * (kW - kL - kR); };
    const auto py = [&](double y) { return kH - kB - (y - y_min) / (y_max - y_min) * (kH - kT - kB); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    o << "<!-- " << s.provenance << " -->\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << s.title << "</text>\n";

    // frame and decade grid
    o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << (kW - kL - kR)
      << "\" height=\"" << (kH - kT - kB)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int d = static_cast<int>(x_min); d <= static_cast<int>(x_max); ++d) {
        const double x = px(d);
        o << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << kT << "\" x2=\""
          << fmt("%.2f", x) << "\" y2=\"" << (kH - kB)
          << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << (kH - kB + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e"
          << d << "</text>\n";
    }
    for (int d = static_cast<int>(y_min); d <= static_cast<int>(y_max); ++d) {
        const double y = py(d);
        o << "<line x1=\"" << kL << "\" y1=\"" << fmt("%.2f", y) << "\" x2=\""
          << (kW - kR) << "\" y2=\"" << fmt("%.2f", y)
          << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << (kL - 8) << "\" y=\"" << fmt("%.2f", y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
          << "</text>\n";
    }
    o << "<text x=\"" << kW / 2 << "\" y=\"" << (kH - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">D (samples)</text>\n";
    o << "<text x=\"18\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kH / 2 << ")\">K (working neurons)</text>\n";

    // knee annotation
    if (s.knee_log10 >= x_min && s.knee_log10 <= x_max) {
        const double x = px(s.knee_log10);
        o << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << kT << "\" x2=\""
          << fmt("%.2f", x) << "\" y2=\"" << (kH - kB)
          << "\" stroke=\"#cc3333\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
        o << "<text x=\"" << fmt("%.2f", x + 5) << "\" y=\"" << (kT + 14)
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#cc3333\">log10(b*N/c) = "
          << fmt("%.2f", s.knee_log10) << "</text>\n";
    }

    if (!s.curve.empty()) {
        o << "<polyline fill=\"none\" stroke=\"#3355bb\" stroke-width=\"1.8\" points=\"";
        for (const auto& p : s.curve)
            o << fmt("%.2f", px(p.x)) << ',' << fmt("%.2f", py(p.y)) << ' ';
        o << "\"/>\n";
    }

    for (std::size_t i = 0; i < s.mc.size(); ++i) {
        const double x = px(s.mc[i].x);
        const double y = py(s.mc[i].y);
        const double k = s.mc_k[i];
        const double err = s.mc_err[i];
        const double y_hi = py(std::log10(std::max(k + err, 1e-300)));
        const double y_lo = (k - err > 0) ? py(std::log10(k - err)) : (kH - kB);
        o << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << fmt("%.2f", y_lo)
          << "\" x2=\"" << fmt("%.2f", x) << "\" y2=\"" << fmt("%.2f", y_hi)
          << "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
        o << "<circle cx=\"" << fmt("%.2f", x) << "\" cy=\"" << fmt("%.2f", y)
          << "\" r=\"3\" fill=\"#222222\"/>\n";
    }

    o << "</svg>\n";
    write_atomic(path, o.str());
}

} // namespace

void emit_plot(const SweepResult& result, const std::string& path) {
    PlotSeries s;
    const ModelParams& p = result.spec.model;
    s.knee_log10 = std::log10(p.b * p.n / p.c);
    char title[160];
    std::snprintf(title, sizeof(title), "Working neurons, N=%.3g b=%.3g c=%.3g (%llu replicates)",
                  p.n, p.b, p.c, static_cast<unsigned long long>(result.spec.replicates));
    s.title = title;
    {
        char prov[160];
        std::snprintf(prov, sizeof(prov), "spec_hash=%016llx seed=%llu tool=urnsim-%s",
                      static_cast<unsigned long long>(result.hash),
                      static_cast<unsigned long long>(result.spec.seed),
                      result.tool_version.c_str());
        s.provenance = prov;
    }
    for (const auto& row : result.rows) {
        if (row.k_analytic > 0)
            s.curve.push_back({std::log10(row.d), std::log10(row.k_analytic)});
        if (row.k_mc_mean > 0) {
            s.mc.push_back({std::log10(row.d), std::log10(row.k_mc_mean)});
            s.mc_k.push_back(row.k_mc_mean);
            s.mc_err.push_back(row.k_mc_std);
        }
    }
    render_svg(s, path);
}

void emit_analytic_plot(const ModelParams& params, const DGrid& grid,
                        const std::string& path) {
    params.validate();
    if (grid.count < 2) throw ConfigError("emit_analytic_plot: grid needs >= 2 points");
    PlotSeries s;
    s.knee_log10 = std::log10(params.b * params.n / params.c);
    char title[160];
    std::snprintf(title, sizeof(title), "Working neurons (analytic), N=%.3g b=%.3g c=%.3g",
                  params.n, params.b, params.c);
    s.title = title;
    s.provenance = "analytic-only tool=urnsim-" + std::string(kToolVersion);
    const double l0 = std::log10(grid.min_d);
    const double l1 = std::log10(grid.max_d);
    for (std::uint64_t i = 0; i < grid.count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(grid.count - 1);
        const double d = std::pow(10.0, l0 + f * (l1 - l0));
        const double k = k_closed_form(params, d);
        if (k > 0) s.curve.push_back({std::log10(d), std::log10(k)});
    }
    render_svg(s, path);
}

void emit_outputs(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    for (const auto& req : result.spec.outputs) {
        fs::path p(req.path);
        if (!p.is_absolute()) p = fs::path(out_dir) / p;
        if (p.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(p.parent_path(), ec);
        }
        switch (req.kind) {
            case OutputKind::TrajectoryCsv: emit_trajectory_csv(result, p.string()); break;
            case OutputKind::HistogramCsv: emit_histogram_csv(result, p.string()); break;
            case OutputKind::LossSweepCsv: emit_loss_csv(result, p.string()); break;
            case OutputKind::FitReport: emit_fit_report(result, p.string()); break;
            case OutputKind::SvgPlot: emit_plot(result, p.string()); break;
        }
    }
}

// ---------------------------------------------------------------------------
// CSV reading

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw IoError("csv: no column named '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open csv: " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    const auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : l) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        cells.push_back(cur);
        return cells;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line);
        if (!have_header) {
            table.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            try {
                std::size_t used = 0;
                // hex cells (seed_hash) parse as 0 via stod failure -> map to NaN
                const double v = std::stod(cell, &used);
                row.push_back(used == cell.size() ? v
                                                  : std::numeric_limits<double>::quiet_NaN());
            } catch (...) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        if (row.size() != table.header.size())
            throw IoError("csv: ragged row at line " + std::to_string(line_no) + " in " + path);
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw IoError("csv: missing header in " + path);
    return table;
}

// ---------------------------------------------------------------------------
// verify

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.skipped && !c.pass) return false;
    return true;
}

std::string VerifyReport::to_string() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        const char* tag = c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL");
        out << tag << ' ' << c.name;
        if (!c.skipped)
            out << ": measured=" << fmt("%.6g", c.measured) << " limit="
                << fmt("%.6g", c.limit);
        if (!c.detail.empty()) out << " (" << c.detail << ')';
        out << '\n';
    }
    return out.str();
}

ExperimentSpec default_desk_spec() {
    ExperimentSpec spec;
    spec.model = ModelParams{1000, 1.0, 10, 0, 0};
    spec.mode = ActivationMode::FixedC;
    spec.seed = 42;
    spec.d_grid = DGrid{16, 1e2, 1e5};
    spec.replicates = 16;
    LossParams lp;
    lp.l_noise = 1.0;
    lp.l_opt = 0.1;
    lp.alpha = 0.5;
    lp.b_sub = 1.0;
    lp.c_sub = 10.0;
    lp.n_sub = 1000.0;
    lp.epsilon = 1.0;
    lp.shape = TransitionShape::LinearInLogD;
    spec.loss = lp;
    return spec;
}

VerifyReport run_verify(const ExperimentSpec& spec, unsigned workers,
                        std::optional<double> inject_analytic_b) {
    spec.validate();
    const SweepResult result = run_sweep_injected(spec, workers, inject_analytic_b);
    VerifyReport report;

    { // growth law
        CheckResult c;
        c.name = "growth-law";
        c.limit = spec.verify.k_sigma;
        double worst = 0;
        double worst_d = 0;
        const double sqrt_r = std::sqrt(static_cast<double>(spec.replicates));
        for (const auto& row : result.rows) {
            const double diff = std::abs(row.k_mc_mean - row.k_analytic);
            const double se = row.k_mc_std / sqrt_r;
            const double z = se > 0 ? diff / se
                                    : (diff == 0 ? 0 : std::numeric_limits<double>::infinity());
            if (z > worst) {
                worst = z;
                worst_d = row.d;
            }
        }
        c.measured = worst;
        c.pass = worst <= c.limit;
        c.detail = "worst checkpoint D=" + fmt("%.6g", worst_d);
        report.checks.push_back(c);
    }

    { // steady-state frequencies against the exact finite-N marginal
        CheckResult c;
        c.name = "steady-state-freqs";
        c.limit = spec.verify.pmf_ks_max;
        const auto samples = histogram_samples(result.pooled_final_histogram);
        if (samples.empty()) {
            c.skipped = true;
            c.detail = "no working neurons at the final checkpoint";
        } else {
            const std::uint64_t t_per_rep =
                result.pooled_final_activations / spec.replicates;
            const std::uint64_t k_max =
                result.pooled_final_histogram.rbegin()->first;
            const FiniteMarginal ref = polya_marginal_pmf(
                spec.model.b, static_cast<std::uint64_t>(spec.model.n), t_per_rep, k_max);
            c.measured = ks_distance(samples, ref.positive);
            c.pass = c.measured <= c.limit;
            c.detail = "n=" + std::to_string(samples.size()) +
                       " T=" + std::to_string(t_per_rep);
        }
        report.checks.push_back(c);
    }

    { // loss decay
        CheckResult c;
        c.name = "loss-decay";
        if (!spec.loss) {
            c.skipped = true;
            c.detail = "no loss parameters configured";
        } else {
            const double gap = spec.loss->l_noise - spec.loss->l_opt;
            c.limit = spec.verify.loss_rmse_frac * gap;
            // fit only the falling section: drop the noise plateau and its
            // shoulder, which bend the other way and spoil the bracket
            std::vector<double> ds, ls;
            for (const auto& row : result.rows) {
                if (row.loss_mc_mean < spec.loss->l_noise - 0.10 * gap) {
                    ds.push_back(row.d);
                    ls.push_back(row.loss_mc_mean);
                }
            }
            if (ds.size() < 6) {
                c.skipped = true;
                c.detail = "fewer than 6 checkpoints past the noise plateau";
            } else {
                try {
                    const LossCurveFit fit = fit_loss_curve(ds, ls);
                    c.measured = fit.rmse;
                    c.pass = fit.rmse <= c.limit && fit.exponent_hat > 0 &&
                             fit.exponent_hat < 1;
                    c.detail = "exponent_hat=" + fmt("%.4g", fit.exponent_hat) +
                               " over " + std::to_string(ds.size()) + " points";
                } catch (const FitError& e) {
                    c.pass = false;
                    c.measured = std::numeric_limits<double>::quiet_NaN();
                    c.detail = e.what();
                }
            }
        }
        report.checks.push_back(c);
    }

    return report;
}

} // namespace urnsim
