#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ohit {

// Seeded generator with explicit bit mappings, so a given seed reproduces the
// same draw sequence run after run. std::mt19937_64 output is specified by the
// standard; the distributions wrapped here avoid the implementation-defined
// std::*_distribution classes.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Multiply-shift bounding; bias is O(n / 2^64).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log argument positive.
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ohit
