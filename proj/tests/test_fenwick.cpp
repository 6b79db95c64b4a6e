#include <doctest.h>

#include <random>
#include <vector>

#include "urnsim/fenwick.hpp"
#include "urnsim/urn.hpp"

using namespace urnsim;

TEST_CASE("fenwick prefix sums match a naive accumulator") {
    std::mt19937_64 gen(11);
    for (std::size_t n : {1u, 2u, 7u, 64u, 1000u}) {
        Fenwick f(n);
        std::vector<std::int64_t> plain(n, 0);
        for (int step = 0; step < 500; ++step) {
            const std::size_t i = gen() % n;
            const std::int64_t delta = static_cast<std::int64_t>(gen() % 21) - 10;
            f.add(i, delta);
            plain[i] += delta;
        }
        std::int64_t acc = 0;
        for (std::size_t len = 0; len <= n; ++len) {
            CHECK(f.prefix(len) == acc);
            if (len < n) acc += plain[len];
        }
        CHECK(f.total() == acc);
    }
}

TEST_CASE("weight index: tree search equals the linear reference search") {
    std::mt19937_64 gen(19);
    const auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    for (int round = 0; round < 40; ++round) {
        const std::size_t n = 1 + gen() % 300;
        const double b = 0.05 + 3.0 * uniform();
        WeightIndex idx(n, b);
        for (std::size_t i = 0; i < n; ++i)
            if (gen() % 2) idx.add_count(i, static_cast<std::int64_t>(gen() % 50));
        // mask a few indices, but never all of them
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (gen() % 5 == 0) idx.mask(i);

        const double w = idx.total_weight();
        for (int t = 0; t < 200; ++t) {
            const double threshold = uniform() * w;
            CHECK(idx.find(threshold) == idx.find_linear(threshold));
        }
        // boundary thresholds
        CHECK(idx.find(0.0) == idx.find_linear(0.0));
        CHECK(idx.find(w) == idx.find_linear(w));
    }
}

TEST_CASE("weight index totals are exact and rebuild reports zero drift") {
    WeightIndex idx(100, 0.25);
    std::mt19937_64 gen(3);
    for (int step = 0; step < 10000; ++step)
        idx.add_count(gen() % 100, 1);
    CHECK(idx.count_total() == 10000);
    CHECK(idx.active_total() == 100);
    CHECK(idx.total_weight() == 10000.0 + 0.25 * 100.0);
    CHECK(idx.rebuild() == 0.0);
    CHECK(idx.total_weight() == 10000.0 + 0.25 * 100.0);
}

TEST_CASE("weight index mask removes both count and seed weight") {
    WeightIndex idx(4, 1.0);
    idx.add_count(2, 5);
    CHECK(idx.total_weight() == 5.0 + 4.0);
    idx.mask(2);
    CHECK(idx.total_weight() == 3.0);
    idx.unmask(2);
    CHECK(idx.total_weight() == 9.0);
}
