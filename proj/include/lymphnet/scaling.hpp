#pragma once

// Closed-form scaling laws for a hub-and-region detection network.
//
// A system of mass M is tiled into draining regions, each served by one hub.
// Detection cost grows with region size; recruitment cost grows with the
// number of peer hubs the infected hub has to contact; expansion doubles the
// activated responder pool until the antibody target is met.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "types.hpp"

namespace lymphnet {

namespace detail {

inline void require_positive_mass(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("mass must be > 0");
}

// Relative slack for quantities that are exact in real arithmetic but pick
// up a few ulps in floating point (integral ratios, pool == B_crit).
inline constexpr double kRelSlack = 1e-12;

} // namespace detail

/// Antibody units needed to reach a fixed concentration: k_ab * M.
inline double antibody_requirement(double mass, const ModelParams& params) {
  detail::require_positive_mass(mass);
  return params.antibody_coefficient * mass;
}

struct HubCount {
  double continuous = 0.0;
  std::int64_t rounded = 1;
};

inline HubCount hub_count(double mass, const ArchitectureSpec& arch) {
  detail::require_positive_mass(mass);
  const double n = arch.base_hub_count * std::pow(mass, arch.exponent);
  return {n, std::max<std::int64_t>(1, std::llround(n))};
}

/// Hub size in IS-cell units.
inline double hub_size(double mass, const ArchitectureSpec& arch) {
  detail::require_positive_mass(mass);
  return arch.base_hub_size * std::pow(mass, 1.0 - arch.exponent);
}

/// Volume of one draining region, c_v * M / N(M). Written as
/// (c_v / n0) * M^(1-a) so that a = 1 gives the same value for every M.
inline double region_volume(double mass, const ArchitectureSpec& arch,
                            const ModelParams& params) {
  detail::require_positive_mass(mass);
  return params.body_volume_coefficient / arch.base_hub_count *
         std::pow(mass, 1.0 - arch.exponent);
}

/// Linear extent of one draining region.
inline double dr_extent(double mass, const ArchitectureSpec& arch, const ModelParams& params) {
  const double v = region_volume(mass, arch, params);
  switch (arch.dimension) {
  case 1: return v;
  case 2: return std::sqrt(v);
  case 3: return std::cbrt(v);
  default: throw DomainError("dimension must be 1, 2 or 3");
  }
}

inline double detection_time(double mass, const ArchitectureSpec& arch,
                             const ModelParams& params, DetectionMode mode) {
  switch (mode) {
  case DetectionMode::spatial:
    return mean_center_distance(arch.dimension).mean * dr_extent(mass, arch, params) /
           params.detector_speed;
  case DetectionMode::contention:
    // Detector population per hub, with detector density folded into rho.
    detail::require_positive_mass(mass);
    return params.contention_coefficient *
           (std::pow(mass, 1.0 - arch.exponent) / arch.base_hub_count);
  }
  throw UsageError("unknown detection mode");
}

/// Antigen-specific responders resident in a single hub.
inline double local_cognate_pool(double mass, const ArchitectureSpec& arch,
                                 const ModelParams& params) {
  return params.cognate_frequency * hub_size(mass, arch);
}

/// Responders that must be activated: B_crit(M) = beta * M.
inline double critical_responders(double mass, const ModelParams& params) {
  detail::require_positive_mass(mass);
  return params.bcrit_coefficient * mass;
}

/// Throws InfeasibleParameters when the whole system holds fewer cognate
/// responders than B_crit. The condition is mass independent:
/// f * n0 * s0 * M >= beta * M.
inline void require_feasible(const ArchitectureSpec& arch, const ModelParams& params) {
  const double total = params.cognate_frequency * arch.base_hub_count * arch.base_hub_size;
  if (total < params.bcrit_coefficient * (1.0 - detail::kRelSlack))
    throw InfeasibleParameters("system cognate pool f*n0*s0 = " + std::to_string(total) +
                               " is below bcrit_coefficient = " +
                               std::to_string(params.bcrit_coefficient));
}

/// Number of peer hubs the infected hub contacts to assemble B_crit.
inline std::int64_t recruitment_demand(double mass, const ArchitectureSpec& arch,
                                       const ModelParams& params) {
  require_feasible(arch, params);
  const double per_hub = local_cognate_pool(mass, arch, params);
  const double shortfall = critical_responders(mass, params) - per_hub;
  if (shortfall <= 0.0) return 0;
  // Shortfalls that are an exact multiple of per_hub must not round up.
  const double ratio = shortfall / per_hub;
  const auto k = static_cast<std::int64_t>(std::ceil(ratio * (1.0 - detail::kRelSlack)));
  return std::clamp<std::int64_t>(k, 0, hub_count(mass, arch).rounded - 1);
}

/// Responders activated after recruitment. Only B_crit are activated; the
/// pool falls short of B_crit only when the rounded hub count caps k.
inline double activated_pool(double mass, const ArchitectureSpec& arch,
                             const ModelParams& params) {
  const double per_hub = local_cognate_pool(mass, arch, params);
  const auto k = recruitment_demand(mass, arch, params);
  const double bcrit = critical_responders(mass, params);
  const double pool = per_hub * static_cast<double>(k + 1);
  if (pool >= bcrit * (1.0 - detail::kRelSlack)) return bcrit;
  return pool;
}

/// Time spent contacting peer hubs, from a known contact count. `extent`
/// feeds the optional distance-dependent transit term.
inline double recruitment_time_for(std::int64_t contacts, double extent, int dimension,
                                   const ModelParams& params) {
  if (contacts <= 0) return 0.0;
  const double k = static_cast<double>(contacts);
  double t = params.recruitment == RecruitmentComposition::serial
                 ? params.contact_latency * k
                 : params.contact_latency * std::log2(k + 1.0);
  if (params.transit_coefficient > 0.0)
    t += params.transit_coefficient * extent * std::pow(k, 1.0 / dimension);
  return t;
}

inline double recruitment_time(double mass, const ArchitectureSpec& arch,
                               const ModelParams& params) {
  const auto k = recruitment_demand(mass, arch, params);
  const double extent = params.transit_coefficient > 0.0 ? dr_extent(mass, arch, params) : 0.0;
  return recruitment_time_for(k, extent, arch.dimension, params);
}

/// Time for a population doubling every `doubling_time` to grow from
/// `initial` to `target`; zero when the target is already met.
inline double expansion_time(double initial, double target, double doubling_time) {
  if (!(initial > 0.0) || !(target > 0.0))
    throw DomainError("populations must be > 0");
  if (!(doubling_time > 0.0)) throw DomainError("doubling_time must be > 0");
  return std::max(0.0, doubling_time * std::log2(target / initial));
}

/// Expansion time when every system activates the same baseline pool,
/// B_crit(1), regardless of its mass.
inline double fixed_pool_expansion_time(double mass, const ModelParams& params) {
  return expansion_time(params.bcrit_coefficient,
                        antibody_requirement(mass, params) / params.plasma_yield,
                        params.doubling_time);
}

inline TimingBreakdown total_response_time(double mass, const ArchitectureSpec& arch,
                                           const ModelParams& params, DetectionMode mode) {
  arch.validate();
  require_feasible(arch, params);
  const double detect = detection_time(mass, arch, params, mode);
  const double recruit = recruitment_time(mass, arch, params);
  const double expand =
      expansion_time(activated_pool(mass, arch, params),
                     antibody_requirement(mass, params) / params.plasma_yield,
                     params.doubling_time);
  return TimingBreakdown::from_phases(detect, recruit, expand);
}

/// Which exponents the optimizer may choose from.
enum class ExponentRange {
  closed,   ///< {0, 1/n, ..., 1}
  interior, ///< {1/n, ..., (n-1)/n}: sub-modular designs only
};

inline std::vector<double> exponent_grid(int steps, ExponentRange range = ExponentRange::closed) {
  if (steps <= 0) throw DomainError("grid resolution must be > 0");
  if (range == ExponentRange::interior && steps < 2)
    throw DomainError("interior grid needs a resolution of at least 2");
  const int lo = range == ExponentRange::closed ? 0 : 1;
  const int hi = range == ExponentRange::closed ? steps : steps - 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int i = lo; i <= hi; ++i)
    grid.push_back(static_cast<double>(i) / static_cast<double>(steps));
  return grid;
}

struct OptimalExponent {
  double exponent = 0.0;
  TimingBreakdown timing;
};

/// Grid search for the exponent minimizing total response time. `base`
/// supplies n0, s0 and d; its exponent is ignored. Ties go to the smaller
/// exponent.
inline OptimalExponent optimal_exponent(double mass, const ArchitectureSpec& base,
                                        const ModelParams& params, DetectionMode mode,
                                        int grid_resolution,
                                        ExponentRange range = ExponentRange::closed) {
  OptimalExponent best;
  bool first = true;
  for (double a : exponent_grid(grid_resolution, range)) {
    const auto t = total_response_time(mass, base.with_exponent(a), params, mode);
    if (first || t.t_total < best.timing.t_total) {
      best = {a, t};
      first = false;
    }
  }
  return best;
}

struct SweepRow {
  double mass = 0.0;
  double exponent = 0.0;
  TimingBreakdown timing;
};

/// Evaluates every (M, a) pair, M-major.
inline std::vector<SweepRow> sweep(std::span<const double> masses,
                                   std::span<const double> exponents,
                                   const ArchitectureSpec& base, const ModelParams& params,
                                   DetectionMode mode) {
  if (masses.empty() || exponents.empty()) throw DomainError("sweep lists must be non-empty");
  std::vector<SweepRow> rows;
  rows.reserve(masses.size() * exponents.size());
  for (double m : masses)
    for (double a : exponents)
      rows.push_back({m, a, total_response_time(m, base.with_exponent(a), params, mode)});
  return rows;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DomainError("slope fit needs two or more paired points");
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("log-log fit needs positive data");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("log-log fit needs distinct x values");
  return (n * sxy - sx * sy) / denom;
}

} // namespace lymphnet
