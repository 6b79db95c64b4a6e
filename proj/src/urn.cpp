#include "urnsim/urn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "urnsim/errors.hpp"

namespace urnsim {

std::string to_string(ActivationMode mode) {
    switch (mode) {
        case ActivationMode::FixedC: return "fixed-c";
        case ActivationMode::Bernoulli: return "bernoulli";
        case ActivationMode::SingleDraw: return "single-draw";
    }
    return "?";
}

std::vector<std::uint64_t> histogram_samples(const Histogram& h) {
    std::vector<std::uint64_t> out;
    for (const auto& [k, count] : h)
        for (std::uint64_t i = 0; i < count; ++i) out.push_back(k);
    return out;
}

ActivationMode activation_mode_from_string(const std::string& s) {
    if (s == "fixed-c") return ActivationMode::FixedC;
    if (s == "bernoulli") return ActivationMode::Bernoulli;
    if (s == "single-draw") return ActivationMode::SingleDraw;
    throw ConfigError("unknown activation mode '" + s +
                      "' (expected fixed-c, bernoulli or single-draw)");
}

void UrnConfig::validate() const {
    if (neurons < 1) throw ConfigError("urn config: N must be >= 1");
    if (!(seed_weight > 0.0) || !std::isfinite(seed_weight))
        throw ConfigError("urn config: b must be a positive finite real");
    if (budget < 1) throw ConfigError("urn config: c must be >= 1");
    if (budget > neurons) throw ConfigError("urn config: c must be <= N");
    if (rebuild_interval < 1) throw ConfigError("urn config: rebuild_interval must be >= 1");
}

// ---------------------------------------------------------------------------
// WeightIndex

WeightIndex::WeightIndex(std::size_t n, double seed_weight)
    : n_(n), b_(seed_weight), count_tree_(n), active_tree_(n),
      counts_(n, 0), masked_(n, 0) {
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
    for (std::size_t i = 0; i < n_; ++i) active_tree_.add(i, 1);
}

void WeightIndex::add_count(std::size_t i, std::int64_t delta) {
    counts_[i] = static_cast<std::uint64_t>(static_cast<std::int64_t>(counts_[i]) + delta);
    if (!masked_[i]) count_tree_.add(i, delta);
}

void WeightIndex::mask(std::size_t i) {
    if (masked_[i]) return;
    masked_[i] = 1;
    active_tree_.add(i, -1);
    count_tree_.add(i, -static_cast<std::int64_t>(counts_[i]));
}

void WeightIndex::unmask(std::size_t i) {
    if (!masked_[i]) return;
    masked_[i] = 0;
    active_tree_.add(i, 1);
    count_tree_.add(i, static_cast<std::int64_t>(counts_[i]));
}

double WeightIndex::total_weight() const {
    return static_cast<double>(count_tree_.total()) +
           b_ * static_cast<double>(active_tree_.total());
}

std::size_t WeightIndex::last_active() const {
    const std::int64_t n_active = active_tree_.total();
    if (n_active == 0) throw DomainError("weight index: no active indices");
    // position of the n_active-th active element
    std::size_t pos = 0;
    std::int64_t acc = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next > n_) continue;
        const std::int64_t cand = acc + active_tree_.node(next);
        if (cand <= n_active - 1) {
            pos = next;
            acc = cand;
        }
    }
    return pos;
}

std::size_t WeightIndex::find(double threshold) const {
    // Largest prefix length with cumulative weight <= threshold; the answer
    // index equals that length. The predicate is evaluated on exact integer
    // partial sums, so it matches find_linear() decision for decision.
    std::size_t pos = 0;
    std::int64_t acc_count = 0;
    std::int64_t acc_active = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next > n_) continue;
        const std::int64_t cs = acc_count + count_tree_.node(next);
        const std::int64_t ca = acc_active + active_tree_.node(next);
        const double cum = static_cast<double>(cs) + b_ * static_cast<double>(ca);
        if (!(cum > threshold)) {
            pos = next;
            acc_count = cs;
            acc_active = ca;
        }
    }
    // pos is the maximal prefix with cum <= threshold, so index pos carries
    // nonzero weight and is never masked.
    if (pos == n_) return last_active();
    return pos;
}

std::size_t WeightIndex::find_linear(double threshold) const {
    std::int64_t s = 0;
    std::int64_t a = 0;
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < n_; ++i) {
        if (masked_[i]) continue;
        s += static_cast<std::int64_t>(counts_[i]);
        a += 1;
        const double cum = static_cast<double>(s) + b_ * static_cast<double>(a);
        if (cum > threshold) return i;
        last = i;
    }
    if (last == std::numeric_limits<std::size_t>::max())
        throw DomainError("weight index: no active indices");
    return last;
}

double WeightIndex::rebuild() {
    const std::int64_t old_counts = count_tree_.total();
    const std::int64_t old_active = active_tree_.total();
    count_tree_.clear();
    active_tree_.clear();
    for (std::size_t i = 0; i < n_; ++i) {
        if (masked_[i]) continue;
        active_tree_.add(i, 1);
        count_tree_.add(i, static_cast<std::int64_t>(counts_[i]));
    }
    const double before = static_cast<double>(old_counts) + b_ * static_cast<double>(old_active);
    const double after = total_weight();
    if (after == 0.0) return before == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(before - after) / std::abs(after);
}

// ---------------------------------------------------------------------------
// UrnState

UrnState::UrnState(UrnConfig config) : config_(config) {
    config_.validate();
    counts_.assign(config_.neurons, 0);
    index_ = WeightIndex(config_.neurons, config_.seed_weight);
}

double UrnState::activation_probability(std::uint64_t i) const {
    if (i >= config_.neurons)
        throw DomainError("activation_probability: neuron index out of range");
    const double n = static_cast<double>(config_.neurons);
    const double c = static_cast<double>(config_.budget);
    const double b = config_.seed_weight;
    // (D_i + b) / (D + (b/c) N) with c D read off the recorded activations,
    // so the sum over neurons is c in every mode
    const double denom = (static_cast<double>(activations_) + b * n) / c;
    return (static_cast<double>(counts_[i]) + b) / denom;
}

std::uint64_t UrnState::reference_draw(double u) const {
    return index_.find_linear(u * index_.total_weight());
}

std::uint64_t UrnState::indexed_draw(double u) const {
    return index_.find(u * index_.total_weight());
}

std::vector<std::uint64_t> UrnState::draw_sample(Rng& rng) {
    std::vector<std::uint64_t> activated;
    switch (config_.mode) {
        case ActivationMode::FixedC: {
            activated.reserve(config_.budget);
            for (std::uint64_t j = 0; j < config_.budget; ++j) {
                const double t = rng.uniform() * index_.total_weight();
                const std::size_t i = index_.find(t);
                activated.push_back(i);
                index_.mask(i);
            }
            for (std::uint64_t i : activated) index_.unmask(i);
            break;
        }
        case ActivationMode::Bernoulli: {
            const double b = config_.seed_weight;
            const double c = static_cast<double>(config_.budget);
            const double denom = static_cast<double>(activations_) +
                                 b * static_cast<double>(config_.neurons);
            for (std::uint64_t i = 0; i < config_.neurons; ++i) {
                const double p =
                    std::min(1.0, c * (static_cast<double>(counts_[i]) + b) / denom);
                if (rng.uniform() < p) activated.push_back(i);
            }
            break;
        }
        case ActivationMode::SingleDraw: {
            const double t = rng.uniform() * index_.total_weight();
            activated.push_back(index_.find(t));
            break;
        }
    }
    return activated;
}

void UrnState::apply_sample(std::span<const std::uint64_t> activated) {
    for (std::uint64_t i : activated)
        if (i >= config_.neurons)
            throw DomainError("apply_sample: neuron index out of range");
    if (activated.size() > 1) {
        std::vector<std::uint64_t> sorted(activated.begin(), activated.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DomainError("apply_sample: duplicate neuron index");
    }
    for (std::uint64_t i : activated) {
        if (counts_[i] == 0) ++working_;
        ++counts_[i];
        ++activations_;
        index_.add_count(i, 1);
        ++updates_since_rebuild_;
    }
    ++samples_;
    if (updates_since_rebuild_ >= config_.rebuild_interval) {
        index_.rebuild();
        updates_since_rebuild_ = 0;
    }
}

Histogram UrnState::histogram() const {
    Histogram h;
    for (std::uint64_t k : counts_)
        if (k > 0) ++h[k];
    return h;
}

Trajectory simulate(const UrnConfig& config, std::uint64_t d_target,
                    std::span<const std::uint64_t> checkpoint_schedule,
                    std::uint64_t replicate_id, bool record_histograms,
                    std::uint64_t memory_cap_bytes) {
    config.validate();
    if (config.neurons * 8 > memory_cap_bytes)
        throw ResourceError("simulate: N*8 bytes exceeds the memory cap");

    std::vector<std::uint64_t> schedule(checkpoint_schedule.begin(),
                                        checkpoint_schedule.end());
    if (schedule.empty()) schedule.push_back(d_target);
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw ConfigError("simulate: checkpoint schedule must be strictly increasing");
    if (schedule.back() > d_target)
        throw ConfigError("simulate: checkpoint schedule exceeds d_target");

    UrnState state(config);
    Rng rng(derive_stream_seed(config.seed, replicate_id));

    Trajectory traj;
    traj.config = config;
    traj.replicate_id = replicate_id;
    traj.checkpoints.reserve(schedule.size());

    std::size_t next = 0;
    for (std::uint64_t d = 0;; ++d) {
        while (next < schedule.size() && state.samples() == schedule[next]) {
            Checkpoint cp;
            cp.samples = state.samples();
            cp.working = state.working();
            cp.total_activations = state.total_activations();
            if (record_histograms) cp.histogram = state.histogram();
            traj.checkpoints.push_back(std::move(cp));
            ++next;
        }
        if (d >= d_target || next >= schedule.size()) break;
        const auto activated = state.draw_sample(rng);
        state.apply_sample(activated);
    }
    return traj;
}

} // namespace urnsim
