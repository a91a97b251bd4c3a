#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace oam {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for a path of indices below `master`, e.g.
/// derive_seed(master, {class_index, split, ordinal}). Each step is
/// s <- mix64(s ^ mix64(index + 1)); distinct paths give distinct streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// mt19937_64 with distribution code spelled out so that draws are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, both variates used).
    double normal();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace oam
