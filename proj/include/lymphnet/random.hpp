#pragma once

// Portable seeded randomness. std::mt19937_64 output is fully specified by
// the standard; the distributions in <random> are not, so the conversions
// to reals and directions are done here.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lymphnet {

/// SplitMix64 step, used to derive independent per-trial seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept {
  return splitmix64(base ^ splitmix64(trial));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniformly distributed unit vector in `dim` dimensions (1..3); unused
  /// trailing components are zero.
  std::array<double, 3> direction(int dim) {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    switch (dim) {
    case 1:
      v[0] = uniform() < 0.5 ? -1.0 : 1.0;
      break;
    case 2: {
      const double phi = 2.0 * std::numbers::pi * uniform();
      v[0] = std::cos(phi);
      v[1] = std::sin(phi);
      break;
    }
    default: {
      // Archimedes: z uniform on [-1, 1] gives a uniform point on the sphere.
      const double z = uniform(-1.0, 1.0);
      const double phi = 2.0 * std::numbers::pi * uniform();
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      v[0] = r * std::cos(phi);
      v[1] = r * std::sin(phi);
      v[2] = z;
      break;
    }
    }
    return v;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace lymphnet
