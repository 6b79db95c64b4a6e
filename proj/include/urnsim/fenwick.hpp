#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace urnsim {

// Binary indexed tree over signed 64-bit values. Point update and prefix
// sum in O(log n). Internal array is 1-based.
class Fenwick {
  public:
    Fenwick() = default;
    explicit Fenwick(std::size_t n) : n_(n), tree_(n + 1, 0) {}

    std::size_t size() const { return n_; }

    void add(std::size_t i, std::int64_t delta) {
        for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
    }

    // sum of elements [0, len)
    std::int64_t prefix(std::size_t len) const {
        std::int64_t s = 0;
        for (std::size_t j = len; j > 0; j -= j & (~j + 1)) s += tree_[j];
        return s;
    }

    std::int64_t total() const { return prefix(n_); }

    // raw node value; used by the combined descent in WeightIndex
    std::int64_t node(std::size_t j) const { return tree_[j]; }

    void clear() { tree_.assign(n_ + 1, 0); }

  private:
    std::size_t n_ = 0;
    std::vector<std::int64_t> tree_;
};

} // namespace urnsim
