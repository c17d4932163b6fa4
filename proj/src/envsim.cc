#include "leakage/envsim.h"

#include <array>
#include <cmath>
#include <numbers>

namespace leakage {
namespace {

constexpr double kOnWallTolerance = 1e-9;
constexpr int kMaxSpawnRejections = 1000;

const std::array<Vec2, kNumActions>& direction_table() {
  static const std::array<Vec2, kNumActions> table = [] {
    std::array<Vec2, kNumActions> t{};
    for (int d = 0; d < kNumActions; ++d) {
      const double theta = d * std::numbers::pi / 180.0;
      t[d] = {std::cos(theta), std::sin(theta)};
    }
    return t;
  }();
  return table;
}

StepResult move(const MapLayout& layout, Vec2 s, Vec2 dir) {
  const Vec2 candidate = s + layout.step_size * dir;
  if (!layout.in_bounds(candidate)) return {{s}, 0.0, false};
  const Segment path{s, candidate};
  for (const auto& wall : layout.walls) {
    if (segments_intersect(path, wall)) return {{s}, 0.0, false};
  }
  for (const auto& zone : layout.reward_zones) {
    if (segment_touches_disc(path, zone.center, zone.radius)) {
      return {{candidate}, zone.reward, true};
    }
  }
  return {{candidate}, 0.0, false};
}

void check_start(const MapLayout& layout, Vec2 s) {
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !layout.in_bounds(s)) {
    throw std::invalid_argument("start state out of map bounds");
  }
  if (layout.on_wall(s)) throw std::invalid_argument("start state on a wall");
}

}  // namespace

void MapLayout::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("map " + map_id + ": non-positive size");
  }
  if (!(step_size > 0.0)) throw ConfigError("map " + map_id + ": bad step size");
  for (const auto& w : walls) {
    if (!in_bounds(w.a) || !in_bounds(w.b)) {
      throw ConfigError("map " + map_id + ": wall endpoint out of bounds");
    }
  }
  for (const auto& z : reward_zones) {
    if (!(z.radius > 0.0)) {
      throw ConfigError("map " + map_id + ": reward radius must be positive");
    }
    if (!in_bounds(z.center)) {
      throw ConfigError("map " + map_id + ": reward center out of bounds");
    }
    for (const auto& w : walls) {
      if (point_segment_distance(z.center, w) < z.radius) {
        throw ConfigError("map " + map_id + ": reward zone overlaps a wall");
      }
    }
  }
  if (spawn_regions.empty()) {
    throw ConfigError("map " + map_id + ": empty spawn region");
  }
  for (const auto& r : spawn_regions) {
    if (!(r.area() > 0.0) || !in_bounds({r.x0, r.y0}) ||
        !in_bounds({r.x1, r.y1})) {
      throw ConfigError("map " + map_id + ": bad spawn rectangle");
    }
  }
}

bool MapLayout::on_wall(Vec2 p) const {
  for (const auto& w : walls) {
    if (point_segment_distance(p, w) <= kOnWallTolerance) return true;
  }
  return false;
}

bool MapLayout::in_reward_zone(Vec2 p) const {
  for (const auto& z : reward_zones) {
    if (distance(p, z.center) <= z.radius) return true;
  }
  return false;
}

bool MapLayout::is_free(Vec2 p) const {
  return in_bounds(p) && !on_wall(p) && !in_reward_zone(p);
}

std::size_t TrajectoryDataset::num_transitions() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.num_transitions();
  return n;
}

std::size_t TrajectoryDataset::num_states() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.states.size();
  return n;
}

Vec2 action_direction(int degrees) {
  return direction_table().at(static_cast<std::size_t>(degrees));
}

StepResult step(const MapLayout& layout, const AgentState& s,
                double angle_degrees) {
  check_start(layout, s.position);
  if (!(angle_degrees >= 0.0 && angle_degrees < 360.0)) {
    throw std::invalid_argument("angle must lie in [0, 360)");
  }
  const double theta = angle_degrees * std::numbers::pi / 180.0;
  return move(layout, s.position, {std::cos(theta), std::sin(theta)});
}

StepResult step_action(const MapLayout& layout, Vec2 s, int action) {
  return move(layout, s, action_direction(action));
}

Episode rollout(const MapLayout& layout, Vec2 start, Rng& rng, int max_len) {
  check_start(layout, start);
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  Episode ep;
  ep.states.reserve(static_cast<std::size_t>(max_len) + 1);
  ep.actions.reserve(static_cast<std::size_t>(max_len));
  ep.rewards.reserve(static_cast<std::size_t>(max_len));
  ep.states.push_back(start);
  Vec2 s = start;
  for (int t = 0; t < max_len; ++t) {
    const int action = static_cast<int>(rng.uniform_int(kNumActions));
    const StepResult r = step_action(layout, s, action);
    ep.actions.push_back(action);
    ep.rewards.push_back(r.reward);
    ep.states.push_back(r.state.position);
    s = r.state.position;
    if (r.terminal) {
      ep.terminated = true;
      break;
    }
  }
  return ep;
}

Episode rollout(const MapLayout& layout, const AgentState& start,
                std::uint64_t policy_seed, int max_len) {
  Rng rng(policy_seed);
  return rollout(layout, start.position, rng, max_len);
}

Vec2 sample_spawn(const MapLayout& layout, Rng& rng) {
  double total = 0.0;
  for (const auto& r : layout.spawn_regions) total += r.area();
  for (int attempt = 0; attempt < kMaxSpawnRejections; ++attempt) {
    double pick = rng.uniform() * total;
    const Rect* rect = &layout.spawn_regions.back();
    for (const auto& r : layout.spawn_regions) {
      if (pick < r.area()) {
        rect = &r;
        break;
      }
      pick -= r.area();
    }
    const Vec2 p{rng.uniform(rect->x0, rect->x1), rng.uniform(rect->y0, rect->y1)};
    if (layout.is_free(p)) return p;
  }
  throw ConfigError("map " + layout.map_id +
                    ": spawn rejection failed 1000 consecutive times");
}

Episode generate_episode(const MapLayout& layout, int max_len,
                         std::uint64_t seed, std::uint64_t index) {
  Rng rng = Rng::substream(seed, index);
  const Vec2 start = sample_spawn(layout, rng);
  return rollout(layout, start, rng, max_len);
}

TrajectoryDataset generate_dataset(const MapLayout& layout, int n_episodes,
                                   int max_len, std::uint64_t seed,
                                   double gamma) {
  if (n_episodes < 1) throw std::invalid_argument("n_episodes must be >= 1");
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  layout.validate();
  TrajectoryDataset ds;
  ds.map_id = layout.map_id;
  ds.gamma = gamma;
  ds.seed = seed;
  ds.max_len = max_len;
  ds.episodes.reserve(static_cast<std::size_t>(n_episodes));
  for (int i = 0; i < n_episodes; ++i) {
    ds.episodes.push_back(
        generate_episode(layout, max_len, seed, static_cast<std::uint64_t>(i)));
  }
  return ds;
}

MapLayout builtin_map(const std::string& map_id) {
  MapLayout m;
  m.map_id = map_id;
  const Rect everything{0.0, 0.0, 400.0, 300.0};
  if (map_id == "map1") {
    // S-shape: three horizontal corridors joined alternately at the right
    // (bottom-middle) and left (middle-top) ends.
    m.walls = {{{0.0, 100.0}, {300.0, 100.0}}, {{100.0, 200.0}, {400.0, 200.0}}};
    m.reward_zones = {{{370.0, 30.0}}, {{30.0, 270.0}}};
    m.spawn_regions = {everything};
  } else if (map_id == "map2") {
    // Two sealed rooms; only the lower one holds a reward.
    m.walls = {{{0.0, 150.0}, {400.0, 150.0}}};
    m.reward_zones = {{{200.0, 50.0}}};
    m.spawn_regions = {everything};
  } else if (map_id == "map3") {
    // U-shaped corridor wrapped around a sealed padding chamber
    // (100..300)x(200..300) that never receives spawns.
    m.walls = {{{100.0, 200.0}, {100.0, 300.0}},
               {{300.0, 200.0}, {300.0, 300.0}},
               {{100.0, 200.0}, {300.0, 200.0}}};
    m.reward_zones = {{{50.0, 270.0}}};
    m.spawn_regions = {{0.0, 0.0, 400.0, 200.0},
                       {0.0, 200.0, 100.0, 300.0},
                       {300.0, 200.0, 400.0, 300.0}};
  } else {
    throw ConfigError("unknown map id '" + map_id + "' (expected map1, map2 or map3)");
  }
  m.validate();
  return m;
}

}  // namespace leakage
