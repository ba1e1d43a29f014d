#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "random.hpp"
#include "types.hpp"

namespace lymphnet {

/// Monte Carlo estimate of a geometric mean together with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean Euclidean distance from a uniform point of the unit d-cube to the
/// cube's center, estimated from `samples` draws.
inline MeanEstimate estimate_mean_center_distance(int dim, std::uint64_t samples,
                                                  std::uint64_t seed) {
  if (dim < 1 || dim > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (samples < 2) throw DomainError("need at least two samples");
  Rng rng(seed);
  // Welford accumulation keeps the variance stable over millions of samples.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    double sq = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double c = rng.uniform() - 0.5;
      sq += c * c;
    }
    const double x = std::sqrt(sq);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

inline constexpr std::uint64_t kGeometrySamples = 1ULL << 22;
inline constexpr std::uint64_t kGeometrySeed = 0x6C796D70686E6574ULL;

/// Cached geometry constant mu_d, computed once per process.
inline const MeanEstimate& mean_center_distance(int dim) {
  static const std::array<MeanEstimate, 3> table = [] {
    std::array<MeanEstimate, 3> t{};
    for (int d = 1; d <= 3; ++d)
      t[static_cast<std::size_t>(d - 1)] =
          estimate_mean_center_distance(d, kGeometrySamples, kGeometrySeed);
    return t;
  }();
  if (dim < 1 || dim > 3) throw DomainError("dimension must be 1, 2 or 3");
  return table[static_cast<std::size_t>(dim - 1)];
}

} // namespace lymphnet
