#include "urnsim/spec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "urnsim/errors.hpp"

namespace urnsim {

std::string to_string(OutputKind k) {
    switch (k) {
        case OutputKind::TrajectoryCsv: return "trajectory_csv";
        case OutputKind::HistogramCsv: return "histogram_csv";
        case OutputKind::LossSweepCsv: return "loss_sweep_csv";
        case OutputKind::FitReport: return "fit_report";
        case OutputKind::SvgPlot: return "svg_plot";
    }
    return "?";
}

namespace {

std::optional<OutputKind> output_kind_from_key(const std::string& key) {
    if (key == "trajectory_csv") return OutputKind::TrajectoryCsv;
    if (key == "histogram_csv") return OutputKind::HistogramCsv;
    if (key == "loss_sweep_csv") return OutputKind::LossSweepCsv;
    if (key == "fit_report") return OutputKind::FitReport;
    if (key == "svg_plot") return OutputKind::SvgPlot;
    return std::nullopt;
}

// %.17g: shortest round-trip-exact form is not needed, 17 significant
// digits always round-trips a double.
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

UrnConfig ExperimentSpec::urn_config() const {
    UrnConfig cfg;
    cfg.neurons = static_cast<std::uint64_t>(model.n);
    cfg.seed_weight = model.b;
    cfg.budget = static_cast<std::uint64_t>(model.c);
    cfg.mode = mode;
    cfg.seed = seed;
    cfg.rebuild_interval = rebuild_interval;
    return cfg;
}

std::vector<std::uint64_t> ExperimentSpec::checkpoint_schedule() const {
    std::set<std::uint64_t> pts;
    if (d_grid.count == 1) {
        pts.insert(static_cast<std::uint64_t>(std::llround(d_grid.max_d)));
    } else {
        const double l0 = std::log10(d_grid.min_d);
        const double l1 = std::log10(d_grid.max_d);
        for (std::uint64_t i = 0; i < d_grid.count; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(d_grid.count - 1);
            pts.insert(static_cast<std::uint64_t>(
                std::llround(std::pow(10.0, l0 + f * (l1 - l0)))));
        }
    }
    return {pts.begin(), pts.end()};
}

void ExperimentSpec::validate() const {
    model.validate();
    // the urn side needs integral N and c
    if (model.n != std::floor(model.n) || model.n > 9e15)
        throw ConfigError("spec: model.n must be a (representable) integer");
    if (model.c != std::floor(model.c))
        throw ConfigError("spec: model.c must be an integer");
    urn_config().validate();
    if (d_grid.count < 1) throw ConfigError("spec: sweep.d_count must be >= 1");
    if (!(d_grid.min_d >= 1)) throw ConfigError("spec: sweep.d_min must be >= 1");
    if (!(d_grid.max_d >= d_grid.min_d))
        throw ConfigError("spec: sweep.d_max must be >= sweep.d_min");
    if (replicates < 1) throw ConfigError("spec: sweep.replicates must be >= 1");
    if (loss) loss->validate();
    for (const auto& out : outputs)
        if (out.path.empty())
            throw ConfigError("spec: output " + to_string(out.kind) + " has an empty path");
    if (!(verify.k_sigma > 0) || !(verify.pmf_ks_max > 0) || !(verify.loss_rmse_frac > 0))
        throw ConfigError("spec: verify thresholds must be positive");
}

ExperimentSpec spec_from_toml(const toml::Table& table) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    const auto take = [&](const std::string& key) -> const toml::Value* {
        const auto it = table.find(key);
        if (it == table.end()) return nullptr;
        seen.insert(key);
        return &it->second;
    };
    const auto require = [&](const std::string& key) -> const toml::Value& {
        const toml::Value* v = take(key);
        if (!v) throw ConfigError("spec: missing required key '" + key + "'");
        return *v;
    };

    spec.model.n = require("model.n").as_double();
    spec.model.b = require("model.b").as_double();
    spec.model.c = require("model.c").as_double();
    if (const auto* v = take("model.k0")) spec.model.k0 = v->as_double();
    if (const auto* v = take("model.d0")) spec.model.d0 = v->as_double();

    if (const auto* v = take("urn.mode"))
        spec.mode = activation_mode_from_string(v->as_string());
    if (const auto* v = take("urn.seed"))
        spec.seed = static_cast<std::uint64_t>(v->as_integer());
    if (const auto* v = take("urn.rebuild_interval"))
        spec.rebuild_interval = static_cast<std::uint64_t>(v->as_integer());

    spec.d_grid.count = static_cast<std::uint64_t>(require("sweep.d_count").as_integer());
    spec.d_grid.min_d = require("sweep.d_min").as_double();
    spec.d_grid.max_d = require("sweep.d_max").as_double();
    if (const auto* v = take("sweep.replicates"))
        spec.replicates = static_cast<std::uint64_t>(v->as_integer());

    const bool has_loss = std::any_of(table.begin(), table.end(), [](const auto& kv) {
        return kv.first.rfind("loss.", 0) == 0;
    });
    if (has_loss) {
        LossParams lp;
        lp.l_noise = require("loss.l_noise").as_double();
        lp.l_opt = require("loss.l_opt").as_double();
        lp.alpha = require("loss.alpha").as_double();
        lp.b_sub = require("loss.b_sub").as_double();
        lp.c_sub = require("loss.c_sub").as_double();
        lp.n_sub = require("loss.n_sub").as_double();
        if (const auto* v = take("loss.epsilon")) lp.epsilon = v->as_double();
        if (const auto* v = take("loss.transition_shape"))
            lp.shape = transition_shape_from_string(v->as_string());
        spec.loss = lp;
    }

    for (const auto& [key, value] : table) {
        if (key.rfind("outputs.", 0) != 0) continue;
        const std::string name = key.substr(8);
        const auto kind = output_kind_from_key(name);
        if (!kind) throw ConfigError("spec: unknown output kind '" + name + "'");
        spec.outputs.push_back({*kind, value.as_string()});
        seen.insert(key);
    }

    if (const auto* v = take("verify.k_sigma")) spec.verify.k_sigma = v->as_double();
    if (const auto* v = take("verify.pmf_ks_max")) spec.verify.pmf_ks_max = v->as_double();
    if (const auto* v = take("verify.loss_rmse_frac"))
        spec.verify.loss_rmse_frac = v->as_double();

    for (const auto& [key, _] : table)
        if (!seen.count(key))
            throw ConfigError("spec: unknown key '" + key + "'");

    spec.validate();
    return spec;
}

ExperimentSpec parse_spec(std::string_view text) {
    return spec_from_toml(toml::parse(text));
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

std::string serialize_spec(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "[model]\n";
    out << "n = " << fmt17(spec.model.n) << "\n";
    out << "b = " << fmt17(spec.model.b) << "\n";
    out << "c = " << fmt17(spec.model.c) << "\n";
    out << "k0 = " << fmt17(spec.model.k0) << "\n";
    out << "d0 = " << fmt17(spec.model.d0) << "\n";
    out << "\n[urn]\n";
    out << "mode = \"" << to_string(spec.mode) << "\"\n";
    out << "seed = " << spec.seed << "\n";
    out << "rebuild_interval = " << spec.rebuild_interval << "\n";
    out << "\n[sweep]\n";
    out << "d_count = " << spec.d_grid.count << "\n";
    out << "d_min = " << fmt17(spec.d_grid.min_d) << "\n";
    out << "d_max = " << fmt17(spec.d_grid.max_d) << "\n";
    out << "replicates = " << spec.replicates << "\n";
    if (spec.loss) {
        const LossParams& lp = *spec.loss;
        out << "\n[loss]\n";
        out << "l_noise = " << fmt17(lp.l_noise) << "\n";
        out << "l_opt = " << fmt17(lp.l_opt) << "\n";
        out << "alpha = " << fmt17(lp.alpha) << "\n";
        out << "b_sub = " << fmt17(lp.b_sub) << "\n";
        out << "c_sub = " << fmt17(lp.c_sub) << "\n";
        out << "n_sub = " << fmt17(lp.n_sub) << "\n";
        out << "epsilon = " << fmt17(lp.epsilon) << "\n";
        out << "transition_shape = \"" << to_string(lp.shape) << "\"\n";
    }
    if (!spec.outputs.empty()) {
        out << "\n[outputs]\n";
        std::vector<OutputRequest> sorted = spec.outputs;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return to_string(a.kind) < to_string(b.kind);
        });
        for (const auto& o : sorted)
            out << to_string(o.kind) << " = \"" << o.path << "\"\n";
    }
    out << "\n[verify]\n";
    out << "k_sigma = " << fmt17(spec.verify.k_sigma) << "\n";
    out << "pmf_ks_max = " << fmt17(spec.verify.pmf_ks_max) << "\n";
    out << "loss_rmse_frac = " << fmt17(spec.verify.loss_rmse_frac) << "\n";
    return out.str();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    const std::string s = serialize_spec(spec);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace urnsim
