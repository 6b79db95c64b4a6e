#pragma once

#include <cstdint>
#include <random>

namespace urnsim {

// splitmix64; used for seed derivation only, never for the main stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent per-replicate stream seed. Hash-derived so that adding
// replicates never perturbs existing streams.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t replicate_id) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (replicate_id + 1);
    (void)splitmix64(s);
    return splitmix64(s);
}

// mt19937_64 is fully pinned by the standard, so streams are reproducible
// across platforms. Doubles are built from the top 53 bits explicitly;
// std::uniform_real_distribution is implementation-defined and not used.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace urnsim
