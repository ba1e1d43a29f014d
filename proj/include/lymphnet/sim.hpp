#pragma once

// Discrete-event realization of one architecture.
//
// The domain (a d-cube of volume c_v * M) is tiled into equal boxes, one per
// hub, with the hub at the box center. An infection spawns loaded detectors
// that travel to their draining hub; the first arrival triggers recruitment
// of peer hubs (nearest first) and then tick-quantized clonal expansion.
// Every phase is driven by one time-ordered event queue.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "random.hpp"
#include "scaling.hpp"
#include "types.hpp"

namespace lymphnet {

using Point = std::array<double, 3>;

struct Box {
  Point lo{0.0, 0.0, 0.0};
  Point hi{0.0, 0.0, 0.0};

  [[nodiscard]] bool contains(const Point& p, int dim) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  [[nodiscard]] double volume(int dim) const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i];
    return v;
  }
};

inline double distance(const Point& a, const Point& b, int dim) {
  double sq = 0.0;
  for (int i = 0; i < dim; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

struct Hub {
  Point position;
  double size = 0.0; // IS cells
  Box region;
};

enum class DetectorState { roaming, loaded, delivered };

struct Detector {
  Point position;
  DetectorState state = DetectorState::roaming;
  std::size_t hub = 0;
};

enum class EventKind { arrival, contact_complete, doubling_tick };

inline const char* to_string(EventKind k) {
  switch (k) {
  case EventKind::arrival: return "arrival";
  case EventKind::contact_complete: return "contact_complete";
  case EventKind::doubling_tick: return "doubling_tick";
  }
  return "?";
}

struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::arrival;
  std::int64_t subject = 0;
  std::int64_t hub = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Ordered record of processed events.
class EventLog {
public:
  void append(const EventRecord& r) { records_.push_back(r); }
  void append(const EventLog& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }

  [[nodiscard]] const std::vector<EventRecord>& records() const { return records_; }
  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] bool empty() const { return records_.empty(); }

  /// One line per record: time<TAB>kind<TAB>subject<TAB>hub, 9 decimals.
  void write(std::ostream& os) const {
    char buf[64];
    for (const auto& r : records_) {
      std::snprintf(buf, sizeof buf, "%.9f", r.time);
      os << buf << '\t' << to_string(r.kind) << '\t' << r.subject << '\t' << r.hub << '\n';
    }
  }

  friend bool operator==(const EventLog&, const EventLog&) = default;

private:
  std::vector<EventRecord> records_;
};

/// Min-queue on (time, insertion sequence).
class EventQueue {
public:
  void push(double time, EventKind kind, std::int64_t subject, std::int64_t hub) {
    heap_.push({EventRecord{time, kind, subject, hub}, next_seq_++});
  }

  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }

  EventRecord pop() {
    EventRecord r = heap_.top().record;
    heap_.pop();
    return r;
  }

private:
  struct Entry {
    EventRecord record;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.record.time != b.record.time) return a.record.time > b.record.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Factors n into `dim` grid counts minimizing the largest/smallest ratio.
/// Among equally square factorizations the lexicographically smallest wins.
inline std::array<std::int64_t, 3> grid_factorization(std::int64_t n, int dim) {
  if (n < 1) throw DomainError("hub count must be >= 1");
  if (dim < 1 || dim > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (dim == 1) return {n, 1, 1};

  std::vector<std::int64_t> divisors;
  for (std::int64_t i = 1; i * i <= n; ++i) {
    if (n % i == 0) {
      divisors.push_back(i);
      if (i != n / i) divisors.push_back(n / i);
    }
  }
  std::sort(divisors.begin(), divisors.end());

  std::array<std::int64_t, 3> best{n, 1, 1};
  double best_ratio = std::numeric_limits<double>::infinity();
  auto consider = [&](std::array<std::int64_t, 3> g) {
    const auto [mn, mx] = std::minmax_element(g.begin(), g.begin() + dim);
    const double ratio = static_cast<double>(*mx) / static_cast<double>(*mn);
    if (ratio < best_ratio || (ratio == best_ratio && g < best)) {
      best_ratio = ratio;
      best = g;
    }
  };
  for (auto a : divisors) {
    if (dim == 2) {
      consider({a, n / a, 1});
      continue;
    }
    const auto rest = n / a;
    for (auto b : divisors) {
      if (b > rest) break;
      if (rest % b == 0) consider({a, b, rest / b});
    }
  }
  return best;
}

struct SimWorld {
  double mass = 1.0;
  ArchitectureSpec arch;
  ModelParams params;
  double domain_extent = 0.0;
  std::array<std::int64_t, 3> grid{1, 1, 1};
  std::vector<Hub> hubs;
  std::vector<Detector> detectors;
  EventQueue queue;
  EventLog log;
  double clock = 0.0;
  std::uint64_t rng_seed = 0;
  Rng rng{0};

  // Phase bookkeeping.
  std::optional<std::size_t> infected_hub;
  double t_detect = 0.0;
  double t_recruit = 0.0;
  double t_expand = 0.0;
  std::int64_t contacts = 0;
  bool recruited = false;

  [[nodiscard]] int dim() const { return arch.dimension; }

  /// Upper boundary of grid cell `i` along `axis`.
  [[nodiscard]] double cell_upper(int axis, std::int64_t i) const {
    return domain_extent * static_cast<double>(i + 1) / static_cast<double>(grid[axis]);
  }
  [[nodiscard]] double cell_lower(int axis, std::int64_t i) const {
    return domain_extent * static_cast<double>(i) / static_cast<double>(grid[axis]);
  }

  [[nodiscard]] std::size_t hub_index(const std::array<std::int64_t, 3>& cell) const {
    return static_cast<std::size_t>(cell[0] + grid[0] * (cell[1] + grid[1] * cell[2]));
  }

  /// Region containing `p`. Points on a shared boundary go to the lowest
  /// region index. Throws if `p` is outside the domain.
  [[nodiscard]] std::size_t region_of(const Point& p) const {
    std::array<std::int64_t, 3> cell{0, 0, 0};
    for (int axis = 0; axis < dim(); ++axis) {
      if (!(p[axis] >= 0.0 && p[axis] <= domain_extent))
        throw DomainError("point lies outside the domain");
      // Lowest cell whose upper boundary is >= the coordinate.
      std::int64_t lo = 0, hi = grid[axis] - 1;
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (p[axis] <= cell_upper(axis, mid)) hi = mid;
        else lo = mid + 1;
      }
      cell[axis] = lo;
    }
    return hub_index(cell);
  }
};

inline SimWorld build_world(double mass, const ArchitectureSpec& arch, const ModelParams& params,
                            std::uint64_t seed) {
  arch.validate();
  params.validate();
  require_feasible(arch, params);

  SimWorld w;
  w.mass = mass;
  w.arch = arch;
  w.params = params;
  w.rng_seed = seed;
  w.rng = Rng(seed);
  const double volume = params.body_volume_coefficient * mass;
  const int d = arch.dimension;
  w.domain_extent = d == 1 ? volume : d == 2 ? std::sqrt(volume) : std::cbrt(volume);

  const auto count = hub_count(mass, arch).rounded;
  w.grid = grid_factorization(count, d);
  const double size = hub_size(mass, arch);
  w.hubs.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < w.grid[2]; ++k)
    for (std::int64_t j = 0; j < w.grid[1]; ++j)
      for (std::int64_t i = 0; i < w.grid[0]; ++i) {
        const std::array<std::int64_t, 3> cell{i, j, k};
        Hub h;
        h.size = size;
        for (int axis = 0; axis < d; ++axis) {
          h.region.lo[axis] = w.cell_lower(axis, cell[axis]);
          h.region.hi[axis] = w.cell_upper(axis, cell[axis]);
          h.position[axis] = 0.5 * (h.region.lo[axis] + h.region.hi[axis]);
        }
        w.hubs.push_back(h);
      }
  return w;
}

/// Places `n_detectors` loaded detectors at `site` (or at a uniformly random
/// site drawn from the world's generator).
inline void spawn_infection(SimWorld& world, std::optional<Point> site, std::size_t n_detectors) {
  if (n_detectors == 0) throw DomainError("need at least one detector");
  Point p{0.0, 0.0, 0.0};
  if (site) {
    p = *site;
  } else {
    for (int axis = 0; axis < world.dim(); ++axis)
      p[axis] = world.rng.uniform() * world.domain_extent;
  }
  const std::size_t hub = world.region_of(p);
  for (std::size_t i = 0; i < n_detectors; ++i)
    world.detectors.push_back({p, DetectorState::loaded, hub});
}

struct WalkSettings {
  double step_fraction = 0.05;        ///< step length as a fraction of the region's shortest side
  std::uint64_t max_steps = 50'000'000;
};

namespace detail {

inline double walk_to_hub(SimWorld& world, const Detector& det, const WalkSettings& walk) {
  const Hub& hub = world.hubs[det.hub];
  const int d = world.dim();
  double side = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < d; ++axis)
    side = std::min(side, hub.region.hi[axis] - hub.region.lo[axis]);
  const double h = walk.step_fraction * side;
  Point p = det.position;
  std::uint64_t steps = 0;
  while (distance(p, hub.position, d) > h) {
    if (++steps > walk.max_steps) throw std::runtime_error("random walk exceeded step limit");
    const auto dir = world.rng.direction(d);
    for (int axis = 0; axis < d; ++axis) {
      double x = p[axis] + h * dir[axis];
      if (x < hub.region.lo[axis]) x = 2.0 * hub.region.lo[axis] - x;
      if (x > hub.region.hi[axis]) x = 2.0 * hub.region.hi[axis] - x;
      p[axis] = x;
    }
  }
  return static_cast<double>(steps) * h / world.params.detector_speed;
}

// Pops one event, advances the clock and records it.
inline EventRecord step(SimWorld& world, EventLog& phase_log) {
  EventRecord r = world.queue.pop();
  if (r.time < world.clock) throw std::logic_error("event queue went backwards in time");
  world.clock = r.time;
  if (r.kind == EventKind::arrival)
    world.detectors[static_cast<std::size_t>(r.subject)].state = DetectorState::delivered;
  world.log.append(r);
  phase_log.append(r);
  return r;
}

} // namespace detail

struct PhaseResult {
  double duration = 0.0;
  EventLog log;
};

/// Schedules every loaded detector's arrival and runs until the first one.
inline PhaseResult run_detection(SimWorld& world, Movement movement,
                                 const WalkSettings& walk = {}) {
  bool any = false;
  for (std::size_t i = 0; i < world.detectors.size(); ++i) {
    const Detector& det = world.detectors[i];
    if (det.state != DetectorState::loaded) continue;
    any = true;
    if (det.hub >= world.hubs.size() || !world.hubs[det.hub].region.contains(det.position, world.dim()))
      throw std::logic_error("detector outside its draining region");
    const double t = movement == Movement::straight
                         ? distance(det.position, world.hubs[det.hub].position, world.dim()) /
                               world.params.detector_speed
                         : detail::walk_to_hub(world, det, walk);
    world.queue.push(world.clock + t, EventKind::arrival, static_cast<std::int64_t>(i),
                     static_cast<std::int64_t>(det.hub));
  }
  if (!any) throw DomainError("no loaded detector to deliver");

  PhaseResult out;
  const auto first = detail::step(world, out.log);
  world.infected_hub = static_cast<std::size_t>(first.hub);
  world.t_detect = first.time;
  out.duration = first.time;
  return out;
}

/// Contacts the k nearest peer hubs (ties by index); contact i completes at
/// t_detect + offset_i where offset_i = (i+1)*lambda for serial contacts.
inline PhaseResult run_recruitment(SimWorld& world) {
  if (!world.infected_hub) throw std::logic_error("recruitment before detection");
  const std::size_t origin = *world.infected_hub;
  const auto k = recruitment_demand(world.mass, world.arch, world.params);
  const int d = world.dim();

  std::vector<std::size_t> peers;
  peers.reserve(world.hubs.size());
  for (std::size_t i = 0; i < world.hubs.size(); ++i)
    if (i != origin) peers.push_back(i);
  const Point& centre = world.hubs[origin].position;
  std::stable_sort(peers.begin(), peers.end(), [&](std::size_t a, std::size_t b) {
    return distance(world.hubs[a].position, centre, d) < distance(world.hubs[b].position, centre, d);
  });

  const auto& p = world.params;
  double longest = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    const std::size_t peer = peers[static_cast<std::size_t>(i)];
    const double idx = static_cast<double>(i);
    double offset = p.recruitment == RecruitmentComposition::serial
                        ? (idx + 1.0) * p.contact_latency
                        : p.contact_latency * std::log2(idx + 2.0);
    if (p.transit_coefficient > 0.0)
      offset += p.transit_coefficient * distance(world.hubs[peer].position, centre, d);
    longest = std::max(longest, offset);
    world.queue.push(world.t_detect + offset, EventKind::contact_complete,
                     static_cast<std::int64_t>(peer), static_cast<std::int64_t>(origin));
  }

  PhaseResult out;
  std::int64_t done = 0;
  while (done < k) {
    if (detail::step(world, out.log).kind == EventKind::contact_complete) ++done;
  }
  world.contacts = k;
  world.t_recruit = longest;
  world.recruited = true;
  out.duration = longest;
  return out;
}

/// Doubles the activated pool once per doubling_time until it meets the
/// antibody target.
inline PhaseResult run_expansion(SimWorld& world) {
  if (!world.recruited) throw std::logic_error("expansion before recruitment");
  const auto& p = world.params;
  const double target = antibody_requirement(world.mass, p) / p.plasma_yield;
  double population = activated_pool(world.mass, world.arch, p);
  const double start = world.t_detect + world.t_recruit;
  const std::int64_t hub = static_cast<std::int64_t>(*world.infected_hub);

  PhaseResult out;
  std::int64_t ticks = 0;
  if (population < target)
    world.queue.push(start + p.doubling_time, EventKind::doubling_tick, 1, hub);
  while (population < target) {
    const auto r = detail::step(world, out.log);
    if (r.kind != EventKind::doubling_tick) continue;
    ++ticks;
    population *= 2.0;
    if (population < target)
      world.queue.push(start + static_cast<double>(ticks + 1) * p.doubling_time,
                       EventKind::doubling_tick, ticks + 1, hub);
  }
  world.t_expand = static_cast<double>(ticks) * p.doubling_time;
  out.duration = world.t_expand;
  return out;
}

struct SimConfig {
  double mass = 1.0;
  ArchitectureSpec arch;
  ModelParams params;
  std::uint64_t seed = 42;
  Movement movement = Movement::straight;
  std::size_t detectors = 1;
  std::optional<Point> site; ///< random when empty
  WalkSettings walk;
};

struct SimResult {
  TimingBreakdown timing;
  EventLog log;
  std::size_t infected_hub = 0;
  std::int64_t contacts = 0;
  std::size_t hub_count = 0;
};

inline SimResult simulate(const SimConfig& cfg) {
  SimWorld world = build_world(cfg.mass, cfg.arch, cfg.params, cfg.seed);
  spawn_infection(world, cfg.site, cfg.detectors);
  run_detection(world, cfg.movement, cfg.walk);
  run_recruitment(world);
  run_expansion(world);
  // Remaining arrivals are logged but no longer affect the response.
  EventLog tail;
  while (!world.queue.empty()) detail::step(world, tail);

  SimResult out;
  out.timing = TimingBreakdown::from_phases(world.t_detect, world.t_recruit, world.t_expand);
  out.log = std::move(world.log);
  out.infected_hub = *world.infected_hub;
  out.contacts = world.contacts;
  out.hub_count = world.hubs.size();
  return out;
}

} // namespace lymphnet
