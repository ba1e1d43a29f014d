#pragma once

// Flat `key = value` run configuration. `#` starts a comment; blank lines
// are ignored; every key is optional and may appear at most once.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scaling.hpp"
#include "sim.hpp"
#include "types.hpp"

namespace lymphnet {

/// Parse failure tied to a key and its 1-based line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, std::size_t line, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line) + ", key '" + key + "': " + what),
        key_(std::move(key)), line_(line) {}

  [[nodiscard]] const std::string& key() const { return key_; }
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::string key_;
  std::size_t line_;
};

struct RunConfig {
  ModelParams params;
  ArchitectureSpec arch;
  std::vector<double> exponents; // empty: regular grid of grid_resolution steps
  int grid_resolution = 20;
  std::vector<double> masses{1.0, 10.0, 100.0, 1000.0, 10000.0};
  DetectionMode mode = DetectionMode::spatial;
  Movement movement = Movement::straight;
  std::int64_t trials = 100;
  std::uint64_t seed = 42;
  std::string output; // empty: stdout
  std::int64_t detectors = 1;
  double walk_step_fraction = 0.05;
  std::optional<Point> infection_site; // empty: random
  double limited_rho = 1.0;
  double limited_lambda = 1.0;
  std::optional<double> model3_exponent; // empty: auto

  /// Exponents used by sweeps: the explicit list or the regular grid.
  [[nodiscard]] std::vector<double> exponent_list() const {
    return exponents.empty() ? exponent_grid(grid_resolution) : exponents;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> to_list(std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    const auto v = to_double(s.substr(0, comma));
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

} // namespace detail

/// Parses and validates a configuration. Omitted keys keep their defaults.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::string_view key;

  auto fail = [&](const std::string& what) -> void {
    throw ConfigError(std::string(key), line_no, what);
  };
  auto number = [&](std::string_view v) {
    const auto d = detail::to_double(v);
    if (!d) fail("expected a number, got '" + std::string(v) + "'");
    return *d;
  };
  auto integer = [&](std::string_view v) {
    const auto i = detail::to_int(v);
    if (!i) fail("expected an integer, got '" + std::string(v) + "'");
    return *i;
  };
  auto positive = [&](std::string_view v) {
    const double d = number(v);
    if (!(d > 0.0) || !std::isfinite(d)) fail("must be > 0");
    return d;
  };
  auto non_negative = [&](std::string_view v) {
    const double d = number(v);
    if (!(d >= 0.0) || !std::isfinite(d)) fail("must be >= 0");
    return d;
  };
  auto in_unit = [&](double a) {
    if (!(a >= 0.0 && a <= 1.0)) fail("exponent must lie in [0, 1]");
    return a;
  };
  auto choice = [&](auto parser, std::string_view v) {
    try {
      return parser(v);
    } catch (const UsageError& e) {
      fail(e.what());
      throw;
    }
  };

  using Setter = std::function<void(std::string_view)>;
  const std::map<std::string_view, Setter> setters{
      {"cognate_frequency", [&](auto v) { cfg.params.cognate_frequency = positive(v); }},
      {"bcrit_coefficient", [&](auto v) { cfg.params.bcrit_coefficient = positive(v); }},
      {"antibody_coefficient", [&](auto v) { cfg.params.antibody_coefficient = positive(v); }},
      {"plasma_yield", [&](auto v) { cfg.params.plasma_yield = positive(v); }},
      {"doubling_time", [&](auto v) { cfg.params.doubling_time = positive(v); }},
      {"detector_speed", [&](auto v) { cfg.params.detector_speed = positive(v); }},
      {"contact_latency", [&](auto v) { cfg.params.contact_latency = non_negative(v); }},
      {"contention_coefficient",
       [&](auto v) { cfg.params.contention_coefficient = non_negative(v); }},
      {"body_volume_coefficient",
       [&](auto v) { cfg.params.body_volume_coefficient = positive(v); }},
      {"transit_coefficient", [&](auto v) { cfg.params.transit_coefficient = non_negative(v); }},
      {"recruitment", [&](auto v) { cfg.params.recruitment = choice(parse_recruitment, v); }},
      {"exponent", [&](auto v) { cfg.arch.exponent = in_unit(number(v)); }},
      {"base_hub_count",
       [&](auto v) {
         const double n = number(v);
         if (!(n >= 1.0) || !std::isfinite(n)) fail("must be >= 1");
         cfg.arch.base_hub_count = n;
       }},
      {"base_hub_size", [&](auto v) { cfg.arch.base_hub_size = positive(v); }},
      {"dimension",
       [&](auto v) {
         const auto d = integer(v);
         if (d < 1 || d > 3) fail("must be 1, 2 or 3");
         cfg.arch.dimension = static_cast<int>(d);
       }},
      {"exponents",
       [&](auto v) {
         const auto xs = detail::to_list(v);
         if (!xs) fail("expected a comma separated list of numbers");
         for (double a : *xs) in_unit(a);
         cfg.exponents = *xs;
       }},
      {"grid_resolution",
       [&](auto v) {
         const auto n = integer(v);
         if (n < 2 || n > 1'000'000) fail("must lie in [2, 1000000]");
         cfg.grid_resolution = static_cast<int>(n);
       }},
      {"masses",
       [&](auto v) {
         const auto xs = detail::to_list(v);
         if (!xs || xs->empty()) fail("expected a non-empty comma separated list of numbers");
         for (double m : *xs)
           if (!(m > 0.0) || !std::isfinite(m)) fail("masses must be > 0");
         cfg.masses = *xs;
       }},
      {"mode", [&](auto v) { cfg.mode = choice(parse_detection_mode, v); }},
      {"movement", [&](auto v) { cfg.movement = choice(parse_movement, v); }},
      {"trials",
       [&](auto v) {
         const auto n = integer(v);
         if (n < 1) fail("must be >= 1");
         cfg.trials = n;
       }},
      {"seed",
       [&](auto v) {
         std::uint64_t s = 0;
         const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
           fail("expected an unsigned 64-bit integer");
         cfg.seed = s;
       }},
      {"output", [&](auto v) { cfg.output = std::string(v); }},
      {"detectors",
       [&](auto v) {
         const auto n = integer(v);
         if (n < 1) fail("must be >= 1");
         cfg.detectors = n;
       }},
      {"walk_step_fraction",
       [&](auto v) {
         const double f = positive(v);
         if (f > 0.5) fail("must be <= 0.5");
         cfg.walk_step_fraction = f;
       }},
      {"infection_site",
       [&](auto v) {
         if (v == "random") {
           cfg.infection_site.reset();
           return;
         }
         const auto xs = detail::to_list(v);
         if (!xs || xs->empty() || xs->size() > 3)
           fail("expected 'random' or 1 to 3 comma separated coordinates");
         Point p{0.0, 0.0, 0.0};
         for (std::size_t i = 0; i < xs->size(); ++i) p[i] = (*xs)[i];
         cfg.infection_site = p;
       }},
      {"limited_rho", [&](auto v) { cfg.limited_rho = positive(v); }},
      {"limited_lambda", [&](auto v) { cfg.limited_lambda = positive(v); }},
      {"model3_exponent",
       [&](auto v) {
         if (v == "auto") {
           cfg.model3_exponent.reset();
           return;
         }
         const double a = number(v);
         if (!(a > 0.0 && a < 1.0)) fail("must be 'auto' or lie strictly inside (0, 1)");
         cfg.model3_exponent = a;
       }},
  };

  std::set<std::string_view> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    key = detail::trim(line.substr(0, eq));
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const auto value = detail::trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key");
    if (!seen.insert(it->first).second) fail("duplicate key");
    it->second(value);
  }

  if (cfg.infection_site) {
    key = "infection_site";
    for (int i = cfg.arch.dimension; i < 3; ++i)
      if ((*cfg.infection_site)[static_cast<std::size_t>(i)] != 0.0)
        fail("has more coordinates than the dimension");
  }
  return cfg;
}

/// Writes every key, so the output is a complete, lossless description.
inline std::string emit_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto kv = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  const auto& p = cfg.params;
  kv("cognate_frequency", detail::format_double(p.cognate_frequency));
  kv("bcrit_coefficient", detail::format_double(p.bcrit_coefficient));
  kv("antibody_coefficient", detail::format_double(p.antibody_coefficient));
  kv("plasma_yield", detail::format_double(p.plasma_yield));
  kv("doubling_time", detail::format_double(p.doubling_time));
  kv("detector_speed", detail::format_double(p.detector_speed));
  kv("contact_latency", detail::format_double(p.contact_latency));
  kv("contention_coefficient", detail::format_double(p.contention_coefficient));
  kv("body_volume_coefficient", detail::format_double(p.body_volume_coefficient));
  kv("transit_coefficient", detail::format_double(p.transit_coefficient));
  kv("recruitment", std::string(to_string(p.recruitment)));
  kv("exponent", detail::format_double(cfg.arch.exponent));
  kv("base_hub_count", detail::format_double(cfg.arch.base_hub_count));
  kv("base_hub_size", detail::format_double(cfg.arch.base_hub_size));
  kv("dimension", std::to_string(cfg.arch.dimension));
  kv("exponents", detail::format_list(cfg.exponents));
  kv("grid_resolution", std::to_string(cfg.grid_resolution));
  kv("masses", detail::format_list(cfg.masses));
  kv("mode", std::string(to_string(cfg.mode)));
  kv("movement", std::string(to_string(cfg.movement)));
  kv("trials", std::to_string(cfg.trials));
  kv("seed", std::to_string(cfg.seed));
  if (!cfg.output.empty()) kv("output", cfg.output);
  kv("detectors", std::to_string(cfg.detectors));
  kv("walk_step_fraction", detail::format_double(cfg.walk_step_fraction));
  if (cfg.infection_site) {
    std::vector<double> xs(cfg.infection_site->begin(),
                           cfg.infection_site->begin() + cfg.arch.dimension);
    kv("infection_site", detail::format_list(xs));
  } else {
    kv("infection_site", "random");
  }
  kv("limited_rho", detail::format_double(cfg.limited_rho));
  kv("limited_lambda", detail::format_double(cfg.limited_lambda));
  kv("model3_exponent",
     cfg.model3_exponent ? detail::format_double(*cfg.model3_exponent) : std::string("auto"));
  return os.str();
}

} // namespace lymphnet
