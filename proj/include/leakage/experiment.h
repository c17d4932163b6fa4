#ifndef LEAKAGE_EXPERIMENT_H_
#define LEAKAGE_EXPERIMENT_H_

// End-to-end runs: dataset -> optional embedding stage -> value stage ->
// evaluation against a ground-truth grid.

#include <cstdint>
#include <string>
#include <vector>

#include "leakage/adam.h"
#include "leakage/embeddings.h"
#include "leakage/envsim.h"
#include "leakage/eval.h"
#include "leakage/learners.h"
#include "leakage/value_model.h"

namespace leakage {

// Fixed seed for ground-truth grids, so every run on a map scores against the
// same reference.
inline constexpr std::uint64_t kDefaultTruthSeed = 0x51a7e0f5eedULL;

struct ExperimentConfig {
  int n_episodes = kDefaultEpisodes;
  int max_len = kDefaultMaxLen;
  double gamma = kDefaultGamma;
  MlpSpec embedding_layers{{2, 20, 20, 20, 2}};
  MlpSpec value_layers{{2, 30, 30, 1}};
  int embedding_steps = 40000;
  int value_steps = 40000;
  int minibatch_size = 32;
  AdamConfig adam;
  double oracle_alpha = 1.0;
  int timeprox_bins = 5;
  double negative_fraction = 0.2;
  double cell_size = kDefaultCellSize;
  int truth_rollouts = 1000;
  int truth_horizon = kDefaultMaxLen;
};

// Structured snapshot of every field, as written into run directories.
std::string config_to_json(const ExperimentConfig& config);

struct BuiltModel {
  TwoStageValue model;
  std::vector<double> embedding_loss;
};

// Untrained value model for `mode`. Learned embeddings (timeprox, sf) are
// trained here and frozen; the baseline (none) is one network split at the
// 2-unit bottleneck with tanh across the split, trained end to end.
BuiltModel build_value_model(EmbeddingMode mode, const TrajectoryDataset& dataset,
                             const MapLayout& layout, const ExperimentConfig& config,
                             std::uint64_t seed);

TrainConfig value_train_config(Method method, const ExperimentConfig& config,
                               std::uint64_t seed);

struct ExperimentResult {
  EvalReport report;
  ValueGrid prediction;
  std::vector<double> embedding_loss;
  std::vector<double> value_loss;
};

ExperimentResult leakage_experiment(const MapLayout& layout,
                                    const TrajectoryDataset& dataset, Method method,
                                    EmbeddingMode mode, std::uint64_t seed,
                                    const ExperimentConfig& config,
                                    const ValueGrid& truth);

// Generates the dataset from `seed` and the ground truth from
// kDefaultTruthSeed.
ExperimentResult leakage_experiment(const std::string& map_id, Method method,
                                    EmbeddingMode mode, std::uint64_t seed,
                                    const ExperimentConfig& config);

double median(std::vector<double> xs);
// Interquartile range with linear interpolation between order statistics.
double iqr(std::vector<double> xs);

}  // namespace leakage

#endif  // LEAKAGE_EXPERIMENT_H_
