#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urnsim/analytic.hpp"
#include "urnsim/loss.hpp"
#include "urnsim/toml.hpp"
#include "urnsim/urn.hpp"

namespace urnsim {

// Log-spaced checkpoint grid over sample counts.
struct DGrid {
    std::uint64_t count = 0;
    double min_d = 1;
    double max_d = 1;

    bool operator==(const DGrid&) const = default;
};

enum class OutputKind { TrajectoryCsv, HistogramCsv, LossSweepCsv, FitReport, SvgPlot };

std::string to_string(OutputKind k);

struct OutputRequest {
    OutputKind kind;
    std::string path;

    bool operator==(const OutputRequest&) const = default;
};

// Tolerances applied by the verify subcommand.
struct VerifyThresholds {
    double k_sigma = 3.0;        // growth-law deviation, in standard errors
    double pmf_ks_max = 0.05;    // steady-state frequency check
    double loss_rmse_frac = 0.05; // loss fit rmse as a fraction of the gap

    bool operator==(const VerifyThresholds&) const = default;
};

struct ExperimentSpec {
    ModelParams model;
    ActivationMode mode = ActivationMode::FixedC;
    std::uint64_t seed = 42;
    std::uint64_t rebuild_interval = 1ull << 20;
    DGrid d_grid;
    std::uint64_t replicates = 8;
    std::optional<LossParams> loss;
    std::vector<OutputRequest> outputs;
    VerifyThresholds verify;

    UrnConfig urn_config() const;
    std::vector<std::uint64_t> checkpoint_schedule() const;
    void validate() const;

    bool operator==(const ExperimentSpec&) const = default;
};

ExperimentSpec spec_from_toml(const toml::Table& table);
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::string& path);

// Canonical serialization; load(serialize(s)) == s.
std::string serialize_spec(const ExperimentSpec& spec);

// FNV-1a over the canonical serialization.
std::uint64_t spec_hash(const ExperimentSpec& spec);

} // namespace urnsim
