#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace csirl {

// Deterministic random stream. All library randomness flows through this type
// so that identical seeds reproduce identical runs bit-for-bit; distributions
// are hand-rolled rather than taken from <random>, whose algorithms are
// implementation-defined.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // splitmix-style warmup so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller (no cached spare, keeps the stream simple).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Independent child stream; used to give each consumer (env resets,
    // action noise, batch sampling, ...) its own reproducible sequence.
    Rng child(std::string_view tag) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (const char c : tag) {
            h ^= static_cast<uint8_t>(c);
            h *= 0x100000001b3ull;
        }
        return Rng(state_ ^ h);
    }

    Rng child(uint64_t salt) const { return Rng(state_ ^ (salt * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull)); }

  private:
    uint64_t state_;
};

}  // namespace csirl
