#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "archipelago/errors.hpp"

namespace archipelago {

/// splitmix64 finalizer; full-period mixing of a 64-bit value.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and up to three
/// context values (purpose tag, ecological step, island/species index).
/// Every random stream in the system is re-derived statelessly this way,
/// so checkpoints never need to persist generator state.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(master ^ 0x5bf0f5252f2ee9d3ULL);
    s = mix64(s ^ mix64(a));
    s = mix64(s ^ mix64(b));
    s = mix64(s ^ mix64(c));
    return s;
}

/// Stream purpose tags for derive_seed.
namespace seed_tag {
constexpr std::uint64_t allocation = 1;   // categorical island sampling
constexpr std::uint64_t environment = 2;  // in-episode world stochasticity
constexpr std::uint64_t action = 3;       // policy action sampling
constexpr std::uint64_t params = 4;       // network parameter init
}  // namespace seed_tag

/// mt19937_64 wrapped with a draw counter. The counter is written into
/// episode logs so replays can verify they consumed the generator
/// identically.
class CountingRng {
  public:
    CountingRng() : CountingRng(0) {}
    explicit CountingRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() {
        ++draws_;
        return engine_();
    }

    std::uint64_t draws() const { return draws_; }
    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(CountingRng& rng) {
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline int uniform_index(CountingRng& rng, int n) {
    if (n <= 0) throw ArgumentError("uniform_index: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
        x = rng.next();
    } while (x >= limit);
    return static_cast<int>(x % un);
}

/// Single categorical draw by inverse CDF over index order, one 64-bit
/// uniform per draw. Probabilities need not sum exactly to one; any
/// residual mass falls on the last index.
inline int categorical(CountingRng& rng, std::span<const double> probs) {
    if (probs.empty()) throw ArgumentError("categorical: empty distribution");
    const double u = uniform_double(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

/// In-place Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle(std::vector<T>& items, CountingRng& rng) {
    for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
        const int j = uniform_index(rng, i + 1);
        std::swap(items[i], items[static_cast<std::size_t>(j)]);
    }
}

}  // namespace archipelago
