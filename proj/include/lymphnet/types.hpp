#pragma once

// Core value types shared by the analytic model, the simulator and the CLI.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lymphnet {

/// Raised for inputs outside an operation's mathematical domain (M <= 0,
/// non-positive populations, exponent outside [0, 1], ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The whole system does not hold enough antigen-specific responders to
/// reach the critical activated population.
class InfeasibleParameters : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad command line, unknown mode names and similar caller mistakes.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// How hub count and hub size grow with system mass M.
///
///   hub count  N(M) = base_hub_count * M^exponent
///   hub size   S(M) = base_hub_size  * M^(1 - exponent)
///
/// exponent = 1 is the fully modular network (more hubs, fixed size),
/// exponent = 0 the non-modular one (fixed hub count, hubs grow) and
/// anything in between is sub-modular.
struct ArchitectureSpec {
  double exponent = 0.5;
  double base_hub_count = 1.0;
  double base_hub_size = 1e6; // IS-cell units
  int dimension = 2;

  void validate() const {
    if (!(exponent >= 0.0 && exponent <= 1.0))
      throw DomainError("exponent must lie in [0, 1]");
    if (!(base_hub_count >= 1.0) || !std::isfinite(base_hub_count))
      throw DomainError("base_hub_count must be >= 1");
    if (!(base_hub_size > 0.0) || !std::isfinite(base_hub_size))
      throw DomainError("base_hub_size must be > 0");
    if (dimension < 1 || dimension > 3)
      throw DomainError("dimension must be 1, 2 or 3");
  }

  [[nodiscard]] ArchitectureSpec with_exponent(double a) const {
    ArchitectureSpec copy = *this;
    copy.exponent = a;
    return copy;
  }

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

/// Composition of peer-hub contacts during recruitment.
enum class RecruitmentComposition {
  serial, ///< contacts queue on the infected hub's outbound channel: lambda * k
  tree,   ///< fan-out tree: lambda * log2(k + 1)
};

/// Rate constants of the detection/recruitment/expansion model.
struct ModelParams {
  double cognate_frequency = 1e-6;     ///< fraction of cells specific to the antigen
  double bcrit_coefficient = 1.0;      ///< responders needed per unit mass
  double antibody_coefficient = 16.0;  ///< antibody units per unit mass
  double plasma_yield = 1.0;           ///< antibody units per responder
  double doubling_time = 1.0;
  double detector_speed = 1.0;
  double contact_latency = 0.2;        ///< per peer hub contacted; 0 = unlimited
  double contention_coefficient = 1.0; ///< per detector sharing a hub; 0 = unlimited
  double body_volume_coefficient = 1.0;
  double transit_coefficient = 0.0;    ///< distance-dependent recruitment transit, off by default
  RecruitmentComposition recruitment = RecruitmentComposition::serial;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be > 0");
    };
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be >= 0");
    };
    positive(cognate_frequency, "cognate_frequency");
    positive(bcrit_coefficient, "bcrit_coefficient");
    positive(antibody_coefficient, "antibody_coefficient");
    positive(plasma_yield, "plasma_yield");
    positive(doubling_time, "doubling_time");
    positive(detector_speed, "detector_speed");
    non_negative(contact_latency, "contact_latency");
    non_negative(contention_coefficient, "contention_coefficient");
    positive(body_volume_coefficient, "body_volume_coefficient");
    non_negative(transit_coefficient, "transit_coefficient");
  }

  /// Antibody target (in responder units) per unit of B_crit. The default
  /// calibration makes expansion from B_crit take `baseline_time`.
  [[nodiscard]] static double calibrated_antibody_coefficient(double bcrit, double yield,
                                                              double doubling,
                                                              double baseline_time = 4.0) {
    return std::exp2(baseline_time / doubling) * bcrit * yield;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Detection cost model: travel distance or channel contention.
enum class DetectionMode { spatial, contention };

enum class Movement { straight, random_walk };

/// Three-phase latency decomposition.
struct TimingBreakdown {
  double t_detect = 0.0;
  double t_recruit = 0.0;
  double t_expand = 0.0;
  double t_total = 0.0;

  static TimingBreakdown from_phases(double detect, double recruit, double expand) {
    return {detect, recruit, expand, detect + recruit + expand};
  }

  friend bool operator==(const TimingBreakdown&, const TimingBreakdown&) = default;
};

inline std::string_view to_string(DetectionMode m) {
  return m == DetectionMode::spatial ? "spatial" : "contention";
}

inline DetectionMode parse_detection_mode(std::string_view s) {
  if (s == "spatial") return DetectionMode::spatial;
  if (s == "contention") return DetectionMode::contention;
  throw UsageError("unknown detection mode '" + std::string(s) + "'");
}

inline std::string_view to_string(Movement m) {
  return m == Movement::straight ? "straight" : "random_walk";
}

inline Movement parse_movement(std::string_view s) {
  if (s == "straight") return Movement::straight;
  if (s == "random_walk") return Movement::random_walk;
  throw UsageError("unknown movement '" + std::string(s) + "'");
}

inline std::string_view to_string(RecruitmentComposition r) {
  return r == RecruitmentComposition::serial ? "serial" : "tree";
}

inline RecruitmentComposition parse_recruitment(std::string_view s) {
  if (s == "serial") return RecruitmentComposition::serial;
  if (s == "tree") return RecruitmentComposition::tree;
  throw UsageError("unknown recruitment composition '" + std::string(s) + "'");
}

/// Architecture label used in tables: model1 (a = 1), model2 (a = 0),
/// model3 (sub-modular, anything in between).
inline std::string_view model_label(double exponent) {
  if (exponent == 1.0) return "model1";
  if (exponent == 0.0) return "model2";
  return "model3";
}

} // namespace lymphnet
