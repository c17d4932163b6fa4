#ifndef LEAKAGE_LEARNERS_H_
#define LEAKAGE_LEARNERS_H_

// Offline Monte-Carlo regression and semi-gradient TD(0) over a stored
// dataset. Both minimize half the mean squared error of a minibatch, so the
// per-sample gradient is exactly the classic update direction.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leakage/adam.h"
#include "leakage/envsim.h"
#include "leakage/value_model.h"

namespace leakage {

enum class Method { kMc, kTd };
enum class Optimizer { kAdam, kSgd };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct TrainConfig {
  Method method = Method::kTd;
  int minibatch_size = 32;
  // Every step uses the whole pool instead of a sampled minibatch.
  bool full_batch = false;
  int steps = 40000;
  Optimizer optimizer = Optimizer::kAdam;
  AdamConfig adam;
  double sgd_lr = 0.01;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
  EmbeddingMode embedding = EmbeddingMode::kNone;

  void validate() const;
};

struct Transition {
  Vec2 s;
  double r = 0.0;
  Vec2 s_next;
  bool terminal = false;
};

struct ReturnSample {
  Vec2 s;
  double g = 0.0;
};

struct TrainResult {
  std::vector<double> loss_curve;  // minibatch loss before each update
};

// One sample per non-final state, G_t = R_{t+1} + gamma G_{t+1}, with the
// return after the last stored transition taken as 0.
std::vector<ReturnSample> compute_returns(const TrajectoryDataset& dataset,
                                          double gamma);
std::vector<ReturnSample> compute_returns(const TrajectoryDataset& dataset);

// Only the final transition of a terminated episode is terminal.
std::vector<Transition> collect_transitions(const TrajectoryDataset& dataset);

// Loss and gradient of 0.5 * mean (v(s) - g)^2 over the selected samples.
double mc_batch_gradient(const ValueModel& model,
                         std::span<const ReturnSample> samples,
                         std::span<const std::size_t> batch,
                         std::span<double> grad);

// Semi-gradient: the target r + gamma v(s') is a constant, so only v(s)
// contributes to grad. Returns 0.5 * mean TD error squared.
double td_batch_gradient(const ValueModel& model,
                         std::span<const Transition> transitions,
                         std::span<const std::size_t> batch, double gamma,
                         std::span<double> grad);

TrainResult train_mc(std::span<const ReturnSample> samples, ValueModel& model,
                     const TrainConfig& config);
TrainResult train_mc(const TrajectoryDataset& dataset, ValueModel& model,
                     const TrainConfig& config);
TrainResult train_td(std::span<const Transition> transitions, ValueModel& model,
                     const TrainConfig& config);
TrainResult train_td(const TrajectoryDataset& dataset, ValueModel& model,
                     const TrainConfig& config);
// Dispatches on config.method.
TrainResult train_value(const TrajectoryDataset& dataset, ValueModel& model,
                        const TrainConfig& config);

}  // namespace leakage

#endif  // LEAKAGE_LEARNERS_H_
