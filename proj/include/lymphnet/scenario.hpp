#pragma once

// Bandwidth-constraint scenarios: which of the two channels (detector-hub,
// hub-hub) is limited, and which architecture then responds fastest.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scaling.hpp"
#include "types.hpp"

namespace lymphnet {

enum class Channel { unlimited, limited };

struct ScenarioProfile {
  Channel detector_channel = Channel::unlimited;
  Channel hub_channel = Channel::unlimited;
  double limited_rho = 1.0;
  double limited_lambda = 1.0;

  void validate() const {
    if (!(limited_rho > 0.0)) throw DomainError("limited_rho must be > 0");
    if (!(limited_lambda > 0.0)) throw DomainError("limited_lambda must be > 0");
  }

  /// Model parameters with rho / lambda set from the channel limits.
  [[nodiscard]] ModelParams apply(ModelParams params) const {
    params.contention_coefficient = detector_channel == Channel::limited ? limited_rho : 0.0;
    params.contact_latency = hub_channel == Channel::limited ? limited_lambda : 0.0;
    return params;
  }

  /// "limited-unlimited" style name: detector channel first.
  [[nodiscard]] std::string name() const {
    auto part = [](Channel c) { return c == Channel::limited ? "limited" : "unlimited"; };
    return std::string(part(detector_channel)) + "-" + part(hub_channel);
  }
};

/// The four profiles in canonical order: both unlimited, detector limited,
/// hub limited, both limited.
inline std::array<ScenarioProfile, 4> standard_profiles(double limited_rho = 1.0,
                                                        double limited_lambda = 1.0) {
  using enum Channel;
  return {{{unlimited, unlimited, limited_rho, limited_lambda},
           {limited, unlimited, limited_rho, limited_lambda},
           {unlimited, limited, limited_rho, limited_lambda},
           {limited, limited, limited_rho, limited_lambda}}};
}

inline ScenarioProfile parse_profile(std::string_view name, double limited_rho = 1.0,
                                     double limited_lambda = 1.0) {
  for (const auto& p : standard_profiles(limited_rho, limited_lambda))
    if (p.name() == name) return p;
  throw UsageError("unknown scenario profile '" + std::string(name) + "'");
}

enum class Winner { model1, model2, model3, tie };

inline std::string_view to_string(Winner w) {
  switch (w) {
  case Winner::model1: return "model1";
  case Winner::model2: return "model2";
  case Winner::model3: return "model3";
  case Winner::tie: return "tie";
  }
  return "?";
}

inline constexpr double kTieEpsilon = 1e-9;

struct ScenarioPoint {
  double mass = 0.0;
  double model3_exponent = 0.5;
  std::array<TimingBreakdown, 3> timings; ///< model1, model2, model3
  Winner winner = Winner::tie;
};

struct ScenarioVerdict {
  ScenarioProfile profile;
  std::vector<ScenarioPoint> points;
  Winner overall = Winner::tie; ///< winner at the largest mass
};

/// Winner among three totals. A tie needs all three within kTieEpsilon
/// relative spread; otherwise the minimum wins, lowest model on equality.
inline Winner pick_winner(const std::array<double, 3>& totals) {
  const auto [mn, mx] = std::minmax_element(totals.begin(), totals.end());
  const double scale = std::max(std::abs(*mx), std::abs(*mn));
  if (*mx - *mn <= kTieEpsilon * scale) return Winner::tie;
  return static_cast<Winner>(std::distance(totals.begin(), mn));
}

struct ScenarioOptions {
  std::optional<double> model3_exponent; ///< empty: optimize per mass
  int grid_resolution = 20;
};

inline ScenarioVerdict evaluate_scenario(const ScenarioProfile& profile,
                                         std::span<const double> masses,
                                         const ArchitectureSpec& base, const ModelParams& params,
                                         const ScenarioOptions& options = {}) {
  profile.validate();
  if (masses.empty()) throw DomainError("mass list must be non-empty");
  if (options.model3_exponent &&
      !(*options.model3_exponent > 0.0 && *options.model3_exponent < 1.0))
    throw DomainError("a fixed model3 exponent must lie strictly inside (0, 1)");

  const ModelParams tuned = profile.apply(params);
  constexpr auto mode = DetectionMode::contention;

  ScenarioVerdict verdict;
  verdict.profile = profile;
  for (double m : masses) {
    ScenarioPoint pt;
    pt.mass = m;
    pt.timings[0] = total_response_time(m, base.with_exponent(1.0), tuned, mode);
    pt.timings[1] = total_response_time(m, base.with_exponent(0.0), tuned, mode);
    if (options.model3_exponent) {
      pt.model3_exponent = *options.model3_exponent;
      pt.timings[2] = total_response_time(m, base.with_exponent(pt.model3_exponent), tuned, mode);
    } else {
      const auto best = optimal_exponent(m, base, tuned, mode, options.grid_resolution,
                                         ExponentRange::interior);
      pt.model3_exponent = best.exponent;
      pt.timings[2] = best.timing;
    }
    pt.winner =
        pick_winner({pt.timings[0].t_total, pt.timings[1].t_total, pt.timings[2].t_total});
    verdict.points.push_back(pt);
  }
  const auto largest = std::max_element(
      verdict.points.begin(), verdict.points.end(),
      [](const ScenarioPoint& a, const ScenarioPoint& b) { return a.mass < b.mass; });
  verdict.overall = largest->winner;
  return verdict;
}

struct ScenarioRow {
  ScenarioProfile profile;
  Winner winner = Winner::tie;
};

/// Overall winner for each of the four standard profiles, in order.
inline std::array<ScenarioRow, 4> scenario_table(std::span<const double> masses,
                                                 const ArchitectureSpec& base,
                                                 const ModelParams& params,
                                                 double limited_rho = 1.0,
                                                 double limited_lambda = 1.0,
                                                 const ScenarioOptions& options = {}) {
  std::array<ScenarioRow, 4> rows;
  const auto profiles = standard_profiles(limited_rho, limited_lambda);
  for (std::size_t i = 0; i < profiles.size(); ++i)
    rows[i] = {profiles[i], evaluate_scenario(profiles[i], masses, base, params, options).overall};
  return rows;
}

} // namespace lymphnet
