#include "leakage/experiment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "leakage/rng.h"

namespace leakage {

namespace {

enum Stream : std::uint64_t { kEmbedInit = 1, kEmbedTrain = 2, kValueInit = 3, kValueTrain = 4 };

std::uint64_t derive(std::uint64_t seed, Stream s) {
  return Rng::substream(seed, s).next();
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["format"] = "leakage-config";
  j["n_episodes"] = c.n_episodes;
  j["max_len"] = c.max_len;
  j["gamma"] = c.gamma;
  j["embedding_layers"] = c.embedding_layers.layer_sizes;
  j["value_layers"] = c.value_layers.layer_sizes;
  j["activation"] = "tanh";
  j["embedding_steps"] = c.embedding_steps;
  j["value_steps"] = c.value_steps;
  j["minibatch_size"] = c.minibatch_size;
  j["adam"] = {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2},
               {"eps", c.adam.eps}};
  j["oracle_alpha"] = c.oracle_alpha;
  j["timeprox_bins"] = c.timeprox_bins;
  j["negative_fraction"] = c.negative_fraction;
  j["cell_size"] = c.cell_size;
  j["truth_rollouts"] = c.truth_rollouts;
  j["truth_horizon"] = c.truth_horizon;
  return j.dump(1) + "\n";
}

BuiltModel build_value_model(EmbeddingMode mode, const TrajectoryDataset& dataset,
                             const MapLayout& layout, const ExperimentConfig& config,
                             std::uint64_t seed) {
  const InputNormalizer norm = InputNormalizer::for_layout(layout);
  NetParams value = init_params(config.value_layers, derive(seed, kValueInit));
  switch (mode) {
    case EmbeddingMode::kNone: {
      NetParams emb = init_params(config.embedding_layers, derive(seed, kEmbedInit));
      return {TwoStageValue::mlp_embedding(std::move(emb), false, std::move(value),
                                           Junction::kTanh, norm),
              {}};
    }
    case EmbeddingMode::kOracle:
      if (layout.map_id != "map1") {
        throw ConfigError("the oracle embedding exists only for map1");
      }
      return {TwoStageValue::oracle_embedding(config.oracle_alpha, std::move(value), norm), {}};
    case EmbeddingMode::kTimeProx: {
      TimeProxConfig tc;
      tc.num_bins = config.timeprox_bins;
      tc.gamma = config.gamma;
      tc.negative_fraction = config.negative_fraction;
      tc.embedding = config.embedding_layers;
      tc.classifier = MlpSpec{{2 * config.embedding_layers.output_size(), 30, 30,
                               config.timeprox_bins}};
      tc.steps = config.embedding_steps;
      tc.minibatch_size = config.minibatch_size;
      tc.adam = config.adam;
      TimeProxModel tp = train_timeprox(dataset, tc, derive(seed, kEmbedTrain), norm);
      return {TwoStageValue::mlp_embedding(std::move(tp.embedding), true, std::move(value),
                                           Junction::kIdentity, norm),
              std::move(tp.loss_curve)};
    }
    case EmbeddingMode::kSf: {
      SfConfig sc;
      sc.gamma = config.gamma;
      sc.embedding = config.embedding_layers;
      sc.steps = config.embedding_steps;
      sc.minibatch_size = config.minibatch_size;
      sc.adam = config.adam;
      SfModel sf = train_sf(dataset, sc, derive(seed, kEmbedTrain), norm);
      return {TwoStageValue::mlp_embedding(std::move(sf.embedding), true, std::move(value),
                                           Junction::kIdentity, norm),
              std::move(sf.loss_curve)};
    }
  }
  throw ConfigError("unknown embedding mode");
}

TrainConfig value_train_config(Method method, const ExperimentConfig& config,
                               std::uint64_t seed) {
  TrainConfig tc;
  tc.method = method;
  tc.minibatch_size = config.minibatch_size;
  tc.steps = config.value_steps;
  tc.adam = config.adam;
  tc.gamma = config.gamma;
  tc.seed = derive(seed, kValueTrain);
  return tc;
}

ExperimentResult leakage_experiment(const MapLayout& layout,
                                    const TrajectoryDataset& dataset, Method method,
                                    EmbeddingMode mode, std::uint64_t seed,
                                    const ExperimentConfig& config,
                                    const ValueGrid& truth) {
  if (dataset.map_id != layout.map_id || truth.map_id != layout.map_id) {
    throw ConfigError("dataset, ground truth and map disagree on map id");
  }
  BuiltModel built = build_value_model(mode, dataset, layout, config, seed);
  TrainConfig tc = value_train_config(method, config, seed);
  tc.embedding = mode;
  TrainResult tr = train_value(dataset, built.model, tc);

  ExperimentResult out;
  out.prediction = predict_grid(built.model, layout, truth.cell_size);
  out.report = evaluate_grid(out.prediction, truth, dataset);
  out.report.metadata["method"] = to_string(method);
  out.report.metadata["embedding"] = to_string(mode);
  out.report.metadata["seed"] = std::to_string(seed);
  out.report.metadata["value_steps"] = std::to_string(config.value_steps);
  out.report.metadata["embedding_steps"] = std::to_string(config.embedding_steps);
  out.embedding_loss = std::move(built.embedding_loss);
  out.value_loss = std::move(tr.loss_curve);
  return out;
}

ExperimentResult leakage_experiment(const std::string& map_id, Method method,
                                    EmbeddingMode mode, std::uint64_t seed,
                                    const ExperimentConfig& config) {
  const MapLayout layout = builtin_map(map_id);
  const TrajectoryDataset dataset =
      generate_dataset(layout, config.n_episodes, config.max_len, seed, config.gamma);
  const ValueGrid truth = ground_truth(layout, config.gamma, config.cell_size,
                                      config.truth_rollouts, kDefaultTruthSeed,
                                      config.truth_horizon);
  return leakage_experiment(layout, dataset, method, mode, seed, config, truth);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {
double quantile_sorted(const std::vector<double>& xs, double q) {
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}
}  // namespace

double iqr(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("iqr of an empty set");
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, 0.75) - quantile_sorted(xs, 0.25);
}

}  // namespace leakage
