#ifndef LEAKAGE_EMBEDDINGS_H_
#define LEAKAGE_EMBEDDINGS_H_

// Two-dimensional state embeddings fed to the value network: the hand-built
// oracle unfolding of map1, the time-proximity classifier's shared encoder,
// and successor features regressed on Monte-Carlo targets.

#include <array>
#include <cstdint>
#include <vector>

#include "leakage/adam.h"
#include "leakage/envsim.h"
#include "leakage/mlp.h"
#include "leakage/rng.h"
#include "leakage/value_model.h"

namespace leakage {

// ---------------------------------------------------------------------------
// Oracle embedding (map1 only).
//
// The middle corridor stays put. The bottom corridor swings down
// (counter-clockwise) about the map's right edge at the first junction
// (400, 100); the top corridor swings up (counter-clockwise) about the left
// edge at the second junction (0, 200).
// Each rotation is alpha * 60 degrees, so alpha = 0 is the identity and every
// corridor moves rigidly.

inline constexpr double kOracleMaxAngleDegrees = 60.0;

struct OracleParams {
  double alpha = 1.0;
};

// Embedding in map units. Throws std::invalid_argument for points on a wall
// or outside map1.
Vec2 oracle_embed_world(double alpha, Vec2 s);
// Same, scaled like the network inputs.
Vec2 oracle_embed(double alpha, Vec2 s, const InputNormalizer& norm);

// ---------------------------------------------------------------------------
// Time-proximity classifier.

struct TimeProxConfig {
  int num_bins = 5;
  double gamma = kDefaultGamma;
  double negative_fraction = 0.2;
  MlpSpec embedding{{2, 20, 20, 20, 2}};
  MlpSpec classifier{{4, 30, 30, 5}};
  int steps = 40000;
  int minibatch_size = 32;
  AdamConfig adam;

  void validate() const;
};

// Upper edges T_1..T_{K-1}, T_k = ln(1 - k/K) / ln(gamma).
std::vector<double> timeprox_bins(const TimeProxConfig& config);
// 1-based label: bin k holds T_{k-1} < dt <= T_k (T_0 = 0); bin K is open.
int time_bin(const std::vector<double>& edges, double dt);

struct PairSample {
  Vec2 s1;
  Vec2 s2;
  int label = 1;  // 1..K
  bool cross_episode = false;
};

PairSample sample_pair(const TrajectoryDataset& dataset,
                       const TimeProxConfig& config, Rng& rng);
PairSample sample_pair(const TrajectoryDataset& dataset,
                       const TimeProxConfig& config, std::uint64_t seed);

struct TimeProxModel {
  NetParams embedding;
  NetParams classifier;
  std::vector<double> loss_curve;
};

TimeProxModel train_timeprox(const TrajectoryDataset& dataset,
                             const TimeProxConfig& config, std::uint64_t seed,
                             const InputNormalizer& norm);

// Class probabilities for an ordered pair.
std::vector<double> timeprox_predict(const TimeProxModel& model,
                                     const InputNormalizer& norm, Vec2 s1, Vec2 s2);

// Accuracy on `n` freshly sampled pairs.
double timeprox_accuracy(const TimeProxModel& model, const TrajectoryDataset& dataset,
                         const TimeProxConfig& config, const InputNormalizer& norm,
                         int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Successor features of phi(s) = (x / W, y / H).

struct SfTarget {
  Vec2 s;
  std::array<double, 2> psi{};
};

// psi_t = (1 - gamma) phi(S_t) + gamma psi_{t+1} over each stored episode,
// for every stored state.
std::vector<SfTarget> compute_sf_targets(const TrajectoryDataset& dataset,
                                         double gamma, const InputNormalizer& norm);

struct SfConfig {
  double gamma = kDefaultGamma;
  MlpSpec embedding{{2, 20, 20, 20, 2}};
  int steps = 40000;
  int minibatch_size = 32;
  AdamConfig adam;
};

struct SfModel {
  NetParams embedding;
  double initial_loss = 0.0;  // over all targets, before training
  double final_loss = 0.0;    // over all targets, after training
  std::vector<double> loss_curve;
};

// Plain Monte-Carlo regression of the psi targets; nothing bootstraps.
SfModel train_sf(const TrajectoryDataset& dataset, const SfConfig& config,
                 std::uint64_t seed, const InputNormalizer& norm);

// 0.5 * mean squared error over all targets.
double sf_loss(const NetParams& embedding, const std::vector<SfTarget>& targets,
               const InputNormalizer& norm);

}  // namespace leakage

#endif  // LEAKAGE_EMBEDDINGS_H_
