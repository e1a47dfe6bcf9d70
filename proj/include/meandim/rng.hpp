#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include "meandim/rational.hpp"

namespace meandim {

/// SplitMix64 step; used to derive independent per-trial seeds from a root seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for child `index` of `root` in the deterministic seed tree.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

/// Deterministic generator. Only the raw mt19937_64 output stream is used, so
/// results do not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi);

    /// Uniform element of {0, 1/den, ..., den/den}.
    Rational unit_rational(std::uint64_t den);

    bool coin() { return (next() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// Worker count: min(hardware concurrency, MEANDIM_THREADS if set), at least 1.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. The body
/// must write only to per-index storage; callers reduce in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace meandim
