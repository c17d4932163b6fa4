#ifndef LEAKAGE_ENVSIM_H_
#define LEAKAGE_ENVSIM_H_

// 2D continuous labyrinths, the uniform random policy and episode simulation.
//
// Coordinates: x grows rightward, y grows upward, origin at the bottom-left
// corner. Walls are zero-thickness segments. Reward zones are absorbing: a
// move whose path touches a zone collects its reward and ends the episode.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "leakage/geometry.h"
#include "leakage/rng.h"

namespace leakage {

inline constexpr double kDefaultGamma = 0.99;
inline constexpr double kDefaultStepSize = 20.0;
inline constexpr int kNumActions = 360;
inline constexpr int kDefaultMaxLen = 2000;
inline constexpr int kDefaultEpisodes = 100;
inline constexpr double kDefaultRewardRadius = 10.0;
inline constexpr double kDefaultReward = 30.0;

// Invalid layouts, unknown ids, spawn failures.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RewardZone {
  Vec2 center;
  double radius = kDefaultRewardRadius;
  double reward = kDefaultReward;
};

struct MapLayout {
  std::string map_id;
  double width = 400.0;
  double height = 300.0;
  double step_size = kDefaultStepSize;
  std::vector<Segment> walls;
  std::vector<RewardZone> reward_zones;
  // Union of rectangles; starts are rejection-sampled to free space.
  std::vector<Rect> spawn_regions;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
  bool in_bounds(Vec2 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
  bool on_wall(Vec2 p) const;
  bool in_reward_zone(Vec2 p) const;
  // In bounds, off every wall and outside every reward zone.
  bool is_free(Vec2 p) const;
};

struct AgentState {
  Vec2 position;
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct StepResult {
  AgentState state;
  double reward = 0.0;
  bool terminal = false;
};

struct Episode {
  std::vector<Vec2> states;
  std::vector<int> actions;
  std::vector<double> rewards;
  bool terminated = false;

  std::size_t num_transitions() const { return actions.size(); }
};

struct TrajectoryDataset {
  std::string map_id;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
  int max_len = kDefaultMaxLen;
  std::vector<Episode> episodes;

  std::size_t num_transitions() const;
  std::size_t num_states() const;
};

// Unit direction for an integer angle in degrees; identical to what
// step(..., double) computes for the same angle.
Vec2 action_direction(int degrees);

// Throws std::invalid_argument for a start state that is out of bounds or on
// a wall.
StepResult step(const MapLayout& layout, const AgentState& s,
                double angle_degrees);
StepResult step_action(const MapLayout& layout, Vec2 s, int action);

Episode rollout(const MapLayout& layout, const AgentState& start,
                std::uint64_t policy_seed, int max_len);
// Continues drawing actions from an existing stream.
Episode rollout(const MapLayout& layout, Vec2 start, Rng& rng, int max_len);

// Uniform over spawn_regions (area-weighted), rejected until free.
Vec2 sample_spawn(const MapLayout& layout, Rng& rng);

// Episode i uses the substream (seed, i) for its start and its actions, so any
// episode can be regenerated alone.
TrajectoryDataset generate_dataset(const MapLayout& layout, int n_episodes,
                                   int max_len, std::uint64_t seed,
                                   double gamma = kDefaultGamma);
Episode generate_episode(const MapLayout& layout, int max_len,
                         std::uint64_t seed, std::uint64_t index);

MapLayout builtin_map(const std::string& map_id);

}  // namespace leakage

#endif  // LEAKAGE_ENVSIM_H_
