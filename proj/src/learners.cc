#include "leakage/learners.h"

#include <cmath>
#include <numeric>

#include "leakage/rng.h"

namespace leakage {
namespace {

// Shared minibatch loop: draws indices uniformly with replacement, asks
// batch_grad for loss and gradient, applies the optimizer.
template <typename BatchGrad>
TrainResult run_training(std::size_t pool_size, ValueModel& model,
                         const TrainConfig& config, BatchGrad&& batch_grad) {
  config.validate();
  if (pool_size == 0) throw std::invalid_argument("training pool is empty");
  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(config.steps));
  Rng rng = Rng::substream(config.seed, 0x7a11);
  AdamState adam(model.num_params(), config.adam);
  std::vector<double> grad(model.num_params());
  std::vector<std::size_t> batch;
  if (config.full_batch) {
    batch.resize(pool_size);
    std::iota(batch.begin(), batch.end(), std::size_t{0});
  } else {
    batch.resize(static_cast<std::size_t>(config.minibatch_size));
  }
  for (int step = 0; step < config.steps; ++step) {
    if (!config.full_batch) {
      for (auto& i : batch) i = static_cast<std::size_t>(rng.uniform_int(pool_size));
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = batch_grad(std::span<const std::size_t>(batch), std::span<double>(grad));
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite loss at step " + std::to_string(step), step);
    }
    result.loss_curve.push_back(loss);
    if (config.optimizer == Optimizer::kAdam) {
      adam_step(adam, model.params(), grad);
    } else {
      auto params = model.params();
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(grad[i])) {
          throw TrainingError("non-finite gradient at step " + std::to_string(step), step);
        }
        params[i] -= config.sgd_lr * grad[i];
      }
    }
  }
  return result;
}

}  // namespace

std::string to_string(Method method) {
  return method == Method::kMc ? "mc" : "td";
}

Method parse_method(const std::string& name) {
  if (name == "mc") return Method::kMc;
  if (name == "td") return Method::kTd;
  throw std::invalid_argument("unknown method '" + name + "' (expected mc or td)");
}

void TrainConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!full_batch && minibatch_size < 1) {
    throw std::invalid_argument("minibatch_size must be >= 1");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(adam.lr > 0.0) || !(sgd_lr > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
}

std::vector<ReturnSample> compute_returns(const TrajectoryDataset& dataset,
                                          double gamma) {
  if (dataset.episodes.empty()) throw std::invalid_argument("dataset is empty");
  std::vector<ReturnSample> out;
  out.reserve(dataset.num_transitions());
  for (const auto& ep : dataset.episodes) {
    const std::size_t t_end = ep.num_transitions();
    const std::size_t base = out.size();
    out.resize(base + t_end);
    double g = 0.0;
    for (std::size_t t = t_end; t-- > 0;) {
      g = ep.rewards[t] + gamma * g;
      out[base + t] = {ep.states[t], g};
    }
  }
  return out;
}

std::vector<ReturnSample> compute_returns(const TrajectoryDataset& dataset) {
  return compute_returns(dataset, dataset.gamma);
}

std::vector<Transition> collect_transitions(const TrajectoryDataset& dataset) {
  std::vector<Transition> out;
  out.reserve(dataset.num_transitions());
  for (const auto& ep : dataset.episodes) {
    const std::size_t n = ep.num_transitions();
    for (std::size_t t = 0; t < n; ++t) {
      out.push_back({ep.states[t], ep.rewards[t], ep.states[t + 1],
                     ep.terminated && t + 1 == n});
    }
  }
  return out;
}

double mc_batch_gradient(const ValueModel& model,
                         std::span<const ReturnSample> samples,
                         std::span<const std::size_t> batch,
                         std::span<double> grad) {
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  // dV/dw is needed scaled by the residual, which depends on V itself: take
  // the gradient with unit scale into a scratch buffer first.
  std::vector<double> g(grad.size());
  for (std::size_t i : batch) {
    const ReturnSample& x = samples[i];
    std::fill(g.begin(), g.end(), 0.0);
    const double v = model.predict_and_grad(x.s, 1.0, g);
    const double err = v - x.g;
    loss += 0.5 * err * err;
    for (std::size_t k = 0; k < g.size(); ++k) grad[k] += inv * err * g[k];
  }
  return loss * inv;
}

double td_batch_gradient(const ValueModel& model,
                         std::span<const Transition> transitions,
                         std::span<const std::size_t> batch, double gamma,
                         std::span<double> grad) {
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> g(grad.size());
  for (std::size_t i : batch) {
    const Transition& x = transitions[i];
    const double target = x.terminal ? x.r : x.r + gamma * model.predict(x.s_next);
    std::fill(g.begin(), g.end(), 0.0);
    const double v = model.predict_and_grad(x.s, 1.0, g);
    const double delta = target - v;
    loss += 0.5 * delta * delta;
    for (std::size_t k = 0; k < g.size(); ++k) grad[k] -= inv * delta * g[k];
  }
  return loss * inv;
}

TrainResult train_mc(std::span<const ReturnSample> samples, ValueModel& model,
                     const TrainConfig& config) {
  return run_training(samples.size(), model, config,
                      [&](std::span<const std::size_t> batch, std::span<double> grad) {
                        return mc_batch_gradient(model, samples, batch, grad);
                      });
}

TrainResult train_mc(const TrajectoryDataset& dataset, ValueModel& model,
                     const TrainConfig& config) {
  const auto samples = compute_returns(dataset, config.gamma);
  return train_mc(samples, model, config);
}

TrainResult train_td(std::span<const Transition> transitions, ValueModel& model,
                     const TrainConfig& config) {
  return run_training(transitions.size(), model, config,
                      [&](std::span<const std::size_t> batch, std::span<double> grad) {
                        return td_batch_gradient(model, transitions, batch,
                                                 config.gamma, grad);
                      });
}

TrainResult train_td(const TrajectoryDataset& dataset, ValueModel& model,
                     const TrainConfig& config) {
  if (dataset.episodes.empty()) throw std::invalid_argument("dataset is empty");
  const auto transitions = collect_transitions(dataset);
  return train_td(transitions, model, config);
}

TrainResult train_value(const TrajectoryDataset& dataset, ValueModel& model,
                        const TrainConfig& config) {
  return config.method == Method::kMc ? train_mc(dataset, model, config)
                                      : train_td(dataset, model, config);
}

}  // namespace leakage
