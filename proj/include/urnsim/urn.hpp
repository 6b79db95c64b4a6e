#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "urnsim/fenwick.hpp"
#include "urnsim/rng.hpp"

namespace urnsim {

enum class ActivationMode { FixedC, Bernoulli, SingleDraw };

std::string to_string(ActivationMode mode);
ActivationMode activation_mode_from_string(const std::string& s);

struct UrnConfig {
    std::uint64_t neurons = 0;       // N
    double seed_weight = 1.0;        // b, additive prior weight per neuron
    std::uint64_t budget = 1;        // c, activations per sample
    ActivationMode mode = ActivationMode::FixedC;
    std::uint64_t seed = 0;
    std::uint64_t rebuild_interval = 1ull << 20;

    void validate() const; // throws ConfigError naming the violated bound
    bool operator==(const UrnConfig&) const = default;
};

// k -> number of neurons with activation count k (k >= 1; the k = 0 bucket
// is implicit: N minus the sum of all values).
using Histogram = std::map<std::uint64_t, std::uint64_t>;

// Flatten a histogram into one sample value per neuron.
std::vector<std::uint64_t> histogram_samples(const Histogram& h);

struct Checkpoint {
    std::uint64_t samples = 0;           // D at this checkpoint
    std::uint64_t working = 0;           // K
    std::uint64_t total_activations = 0; // sum of all counts
    Histogram histogram;

    bool operator==(const Checkpoint&) const = default;
};

struct Trajectory {
    UrnConfig config;
    std::uint64_t replicate_id = 0;
    std::vector<Checkpoint> checkpoints;

    bool operator==(const Trajectory&) const = default;
};

// Dynamic index over the activation weights w_i = counts_i + b.
//
// The b part is factored out analytically: two integer Fenwick trees hold
// the raw counts and the active-index indicator, and every cumulative
// weight is evaluated as the one expression
//
//     (double)count_prefix + b * (double)active_prefix
//
// from exact integer prefix sums. The linear reference search and the
// logarithmic tree search therefore evaluate the same predicate on the
// same values and return bit-identical indices for any (state, u). There
// is no incremental floating-point drift; rebuild() recomputes the trees
// from scratch and reports the (always zero) relative discrepancy.
class WeightIndex {
  public:
    WeightIndex() = default;
    WeightIndex(std::size_t n, double seed_weight);

    std::size_t size() const { return n_; }
    double seed_weight() const { return b_; }

    void add_count(std::size_t i, std::int64_t delta);

    // Temporarily remove index i (weight becomes 0) for sampling without
    // replacement; unmask restores it. Counts must not change in between.
    void mask(std::size_t i);
    void unmask(std::size_t i);

    std::uint64_t count(std::size_t i) const { return counts_[i]; }
    bool masked(std::size_t i) const { return masked_[i] != 0; }

    std::int64_t count_total() const { return count_tree_.total(); }
    std::int64_t active_total() const { return active_tree_.total(); }
    double total_weight() const;

    // Smallest index i with cumulative weight(0..i) > threshold, skipping
    // masked indices. Falls back to the last active index when rounding
    // pushes the threshold to the total. Logarithmic tree descent.
    std::size_t find(double threshold) const;

    // Same contract via a linear scan; the test oracle for find().
    std::size_t find_linear(double threshold) const;

    // Recompute both trees from the stored counts. Returns the relative
    // discrepancy between the incremental and recomputed totals.
    double rebuild();

  private:
    std::size_t last_active() const;

    std::size_t n_ = 0;
    double b_ = 1.0;
    std::size_t top_ = 0; // highest power of two <= n
    Fenwick count_tree_;
    Fenwick active_tree_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint8_t> masked_;
};

// Live state of the activation process: per-neuron counts, totals, and the
// weight index. One instance is confined to a single thread.
class UrnState {
  public:
    explicit UrnState(UrnConfig config); // init: all counts zero

    const UrnConfig& config() const { return config_; }
    std::uint64_t samples() const { return samples_; }             // D
    std::uint64_t working() const { return working_; }             // K
    std::uint64_t total_activations() const { return activations_; }
    std::span<const std::uint64_t> counts() const { return counts_; }

    const WeightIndex& weight_index() const { return index_; }

    // (counts_i + b) / (D + (b/c) N); sums to c over all neurons.
    double activation_probability(std::uint64_t i) const;

    // CDF inversion over w_i = counts_i + b for one uniform u in [0, 1).
    // reference_draw scans linearly; indexed_draw descends the weight
    // index. Both return the same index for the same (state, u).
    std::uint64_t reference_draw(double u) const;
    std::uint64_t indexed_draw(double u) const;

    // One sample's activation set, per the configured mode:
    //   FixedC     exactly c distinct indices, sequential weighted draws
    //              without replacement (masked in the index, then restored)
    //   Bernoulli  each neuron independently with prob min(1, c*w_i/W)
    //   SingleDraw exactly one index
    std::vector<std::uint64_t> draw_sample(Rng& rng);

    // Record one sample: increments each activated count, K for newly
    // working neurons, and D. Rejects duplicate or out-of-range indices.
    void apply_sample(std::span<const std::uint64_t> activated);

    Histogram histogram() const;

  private:
    UrnConfig config_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t samples_ = 0;
    std::uint64_t working_ = 0;
    std::uint64_t activations_ = 0;
    std::uint64_t updates_since_rebuild_ = 0;
    WeightIndex index_;
};

inline constexpr std::uint64_t kDefaultMemoryCap = 2ull << 30;

// Run the process to D = d_target, recording (D, K, histogram) at each
// scheduled sample count. The schedule must be strictly increasing with
// max <= d_target; an empty schedule records d_target only. Deterministic
// in (config.seed, replicate_id).
Trajectory simulate(const UrnConfig& config, std::uint64_t d_target,
                    std::span<const std::uint64_t> checkpoint_schedule,
                    std::uint64_t replicate_id = 0,
                    bool record_histograms = true,
                    std::uint64_t memory_cap_bytes = kDefaultMemoryCap);

} // namespace urnsim
