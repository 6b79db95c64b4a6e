// Throughput comparison: indexed sampler vs the linear reference sampler,
// and the replicate sweep on 1 worker vs all hardware threads.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "urnsim/report.hpp"

using namespace urnsim;
namespace chrono = std::chrono;

namespace {

double seconds_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

// warm state: run some samples first so the weights are skewed
UrnState warmed_state(std::uint64_t n, std::uint64_t warm_samples) {
    UrnConfig cfg;
    cfg.neurons = n;
    cfg.seed_weight = 1.0;
    cfg.budget = 10;
    cfg.seed = 7;
    UrnState state(cfg);
    Rng rng(derive_stream_seed(cfg.seed, 0));
    for (std::uint64_t d = 0; d < warm_samples; ++d)
        state.apply_sample(state.draw_sample(rng));
    return state;
}

void bench_samplers(std::uint64_t n, std::uint64_t draws) {
    UrnState state = warmed_state(n, n / 2);
    Rng rng(123);

    volatile std::uint64_t sink = 0;

    auto t0 = chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < draws; ++i) sink = sink + state.indexed_draw(rng.uniform());
    const double indexed = seconds_since(t0);

    const std::uint64_t ref_draws = n >= 100000 ? draws / 100 : draws / 10;
    t0 = chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < ref_draws; ++i) sink = sink + state.reference_draw(rng.uniform());
    const double reference = seconds_since(t0);

    const double idx_rate = static_cast<double>(draws) / indexed;
    const double ref_rate = static_cast<double>(ref_draws) / reference;
    std::printf("N=%-8llu indexed %10.3g draws/s   reference %10.3g draws/s   speedup %8.1fx\n",
                static_cast<unsigned long long>(n), idx_rate, ref_rate, idx_rate / ref_rate);
}

void bench_sweep() {
    ExperimentSpec spec = default_desk_spec();
    spec.replicates = 32;
    spec.loss.reset();

    auto t0 = chrono::steady_clock::now();
    const SweepResult serial = run_sweep(spec, 1);
    const double t_serial = seconds_since(t0);

#ifdef _OPENMP
    const int hw = omp_get_max_threads();
#else
    const int hw = 1;
#endif
    t0 = chrono::steady_clock::now();
    const SweepResult parallel = run_sweep(spec, 0);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.rows.size() == parallel.rows.size();
    for (std::size_t i = 0; identical && i < serial.rows.size(); ++i)
        identical = serial.rows[i].k_mc_mean == parallel.rows[i].k_mc_mean &&
                    serial.rows[i].k_mc_std == parallel.rows[i].k_mc_std;

    std::printf("sweep (32 replicates, N=1000, D=1e5): 1 worker %.3fs, %d workers %.3fs, "
                "speedup %.2fx, results identical: %s\n",
                t_serial, hw, t_parallel, t_serial / t_parallel,
                identical ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t draws = 2000000;
    if (argc > 1) draws = std::strtoull(argv[1], nullptr, 10);

    std::printf("sampler throughput (%llu indexed draws per size):\n",
                static_cast<unsigned long long>(draws));
    for (std::uint64_t n : {1000ull, 10000ull, 100000ull, 1000000ull})
        bench_samplers(n, draws);

    std::printf("\n");
    bench_sweep();
    return 0;
}
