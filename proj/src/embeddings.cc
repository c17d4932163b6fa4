#include "leakage/embeddings.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leakage {
namespace {

constexpr Vec2 kLowerPivot{400.0, 100.0};
constexpr Vec2 kUpperPivot{0.0, 200.0};
constexpr int kMaxPairResamples = 100000;

// Softmax cross-entropy: fills dlogits with softmax - onehot and returns the
// loss.
double softmax_xent(std::span<const double> logits, int target,
                    std::span<double> dlogits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    dlogits[i] = std::exp(logits[i] - mx);
    z += dlogits[i];
  }
  for (double& d : dlogits) d /= z;
  const double loss = -(logits[static_cast<std::size_t>(target)] - mx - std::log(z));
  dlogits[static_cast<std::size_t>(target)] -= 1.0;
  return loss;
}

std::array<double, 2> as_input(Vec2 p) { return {p.x, p.y}; }

PairSample draw_pair(const TrajectoryDataset& dataset, const TimeProxConfig& config,
                     const std::vector<double>& edges, Rng& rng) {
  const auto& eps = dataset.episodes;
  if (eps.empty()) throw std::invalid_argument("dataset is empty");
  if (config.negative_fraction > 0.0 && eps.size() < 2) {
    throw std::invalid_argument("cross-episode pairs need at least 2 episodes");
  }
  if (config.negative_fraction > 0.0 && rng.uniform() < config.negative_fraction) {
    const auto a = rng.uniform_int(eps.size());
    auto b = rng.uniform_int(eps.size() - 1);
    if (b >= a) ++b;
    const auto& ea = eps[a].states;
    const auto& eb = eps[b].states;
    return {ea[rng.uniform_int(ea.size())], eb[rng.uniform_int(eb.size())],
            config.num_bins, true};
  }
  for (int attempt = 0; attempt < kMaxPairResamples; ++attempt) {
    const auto& states = eps[rng.uniform_int(eps.size())].states;
    const auto t = rng.uniform_int(states.size());
    const auto dt = static_cast<std::uint64_t>(rng.geometric(config.gamma));
    if (t + dt >= states.size()) continue;
    return {states[t], states[t + dt], time_bin(edges, static_cast<double>(dt)), false};
  }
  throw std::invalid_argument("episodes too short to sample time-proximity pairs");
}

}  // namespace

Vec2 oracle_embed_world(double alpha, Vec2 s) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("oracle alpha must lie in [0, 1]");
  }
  static const MapLayout map1 = builtin_map("map1");
  if (!map1.in_bounds(s)) throw std::invalid_argument("state outside map1");
  if (map1.on_wall(s)) throw std::invalid_argument("state lies on a wall");
  if (alpha == 0.0) return s;  // exact, not merely up to rounding
  const double angle = alpha * kOracleMaxAngleDegrees * std::numbers::pi / 180.0;
  if (s.y < 100.0) return rotate_about(s, kLowerPivot, angle);
  if (s.y > 200.0) return rotate_about(s, kUpperPivot, angle);
  return s;
}

Vec2 oracle_embed(double alpha, Vec2 s, const InputNormalizer& norm) {
  return norm(oracle_embed_world(alpha, s));
}

void TimeProxConfig::validate() const {
  if (num_bins < 2) throw std::invalid_argument("time-proximity needs K >= 2 bins");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(negative_fraction >= 0.0 && negative_fraction < 1.0)) {
    throw std::invalid_argument("negative_fraction must lie in [0, 1)");
  }
  embedding.validate();
  classifier.validate();
  if (classifier.input_size() != 2 * embedding.output_size() ||
      classifier.output_size() != num_bins) {
    throw std::invalid_argument("classifier shape " + to_string(classifier) +
                                " does not fit the embedding and bin count");
  }
  if (minibatch_size < 1 || steps < 0) throw std::invalid_argument("bad training budget");
}

std::vector<double> timeprox_bins(const TimeProxConfig& config) {
  config.validate();
  std::vector<double> edges;
  for (int k = 1; k < config.num_bins; ++k) {
    const double p = static_cast<double>(k) / config.num_bins;
    edges.push_back(std::log(1.0 - p) / std::log(config.gamma));
  }
  return edges;
}

int time_bin(const std::vector<double>& edges, double dt) {
  int k = 1;
  for (double edge : edges) {
    if (dt <= edge) return k;
    ++k;
  }
  return k;
}

PairSample sample_pair(const TrajectoryDataset& dataset,
                       const TimeProxConfig& config, Rng& rng) {
  return draw_pair(dataset, config, timeprox_bins(config), rng);
}

PairSample sample_pair(const TrajectoryDataset& dataset,
                       const TimeProxConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return sample_pair(dataset, config, rng);
}

std::vector<double> timeprox_predict(const TimeProxModel& model,
                                     const InputNormalizer& norm, Vec2 s1, Vec2 s2) {
  const auto e1 = forward(model.embedding.spec, model.embedding.view(), as_input(norm(s1)));
  const auto e2 = forward(model.embedding.spec, model.embedding.view(), as_input(norm(s2)));
  std::vector<double> pair = e1;
  pair.insert(pair.end(), e2.begin(), e2.end());
  std::vector<double> logits = forward(model.classifier.spec, model.classifier.view(), pair);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - mx);
    z += l;
  }
  for (double& l : logits) l /= z;
  return logits;
}

TimeProxModel train_timeprox(const TrajectoryDataset& dataset,
                             const TimeProxConfig& config, std::uint64_t seed,
                             const InputNormalizer& norm) {
  config.validate();
  TimeProxModel model;
  model.embedding = init_params(config.embedding, Rng::substream(seed, 0xe1).next());
  model.classifier = init_params(config.classifier, Rng::substream(seed, 0xc1).next());
  Rng rng = Rng::substream(seed, 0x9a1);
  const std::vector<double> edges = timeprox_bins(config);

  const std::size_t ne = model.embedding.values.size();
  const std::size_t nc = model.classifier.values.size();
  const auto emb_dim = static_cast<std::size_t>(config.embedding.output_size());
  std::vector<double> params(ne + nc);
  std::copy(model.embedding.values.begin(), model.embedding.values.end(), params.begin());
  std::copy(model.classifier.values.begin(), model.classifier.values.end(),
            params.begin() + static_cast<std::ptrdiff_t>(ne));
  std::span<double> emb_params = std::span<double>(params).first(ne);
  std::span<double> cls_params = std::span<double>(params).subspan(ne);

  AdamState adam(params.size(), config.adam);
  std::vector<double> grad(params.size());
  std::vector<double> pair(2 * emb_dim), dpair(2 * emb_dim);
  std::vector<double> dlogits(static_cast<std::size_t>(config.num_bins));
  ForwardCache c1, c2, cc;
  const double inv = 1.0 / config.minibatch_size;
  model.loss_curve.reserve(static_cast<std::size_t>(config.steps));

  for (int step = 0; step < config.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < config.minibatch_size; ++b) {
      const PairSample ps = draw_pair(dataset, config, edges, rng);
      forward(config.embedding, emb_params, as_input(norm(ps.s1)), c1);
      forward(config.embedding, emb_params, as_input(norm(ps.s2)), c2);
      std::copy(c1.output().begin(), c1.output().end(), pair.begin());
      std::copy(c2.output().begin(), c2.output().end(),
                pair.begin() + static_cast<std::ptrdiff_t>(emb_dim));
      forward(config.classifier, cls_params, pair, cc);
      loss += softmax_xent(cc.output(), ps.label - 1, dlogits);
      for (double& d : dlogits) d *= inv;
      backward(config.classifier, cls_params, cc, dlogits,
               std::span<double>(grad).subspan(ne), dpair);
      backward(config.embedding, emb_params, c1,
               std::span<const double>(dpair).first(emb_dim),
               std::span<double>(grad).first(ne));
      backward(config.embedding, emb_params, c2,
               std::span<const double>(dpair).subspan(emb_dim),
               std::span<double>(grad).first(ne));
    }
    loss *= inv;
    if (!std::isfinite(loss)) {
      throw TrainingError("time-proximity loss is not finite at step " +
                              std::to_string(step), step);
    }
    model.loss_curve.push_back(loss);
    adam_step(adam, params, grad);
  }
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(ne),
            model.embedding.values.begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(ne), params.end(),
            model.classifier.values.begin());
  return model;
}

double timeprox_accuracy(const TimeProxModel& model, const TrajectoryDataset& dataset,
                         const TimeProxConfig& config, const InputNormalizer& norm,
                         int n, std::uint64_t seed) {
  Rng rng(seed);
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    const PairSample ps = sample_pair(dataset, config, rng);
    const auto probs = timeprox_predict(model, norm, ps.s1, ps.s2);
    const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
    if (best == ps.label - 1) ++correct;
  }
  return static_cast<double>(correct) / n;
}

std::vector<SfTarget> compute_sf_targets(const TrajectoryDataset& dataset,
                                         double gamma, const InputNormalizer& norm) {
  if (dataset.episodes.empty()) throw std::invalid_argument("dataset is empty");
  std::vector<SfTarget> out;
  out.reserve(dataset.num_states());
  for (const auto& ep : dataset.episodes) {
    const std::size_t base = out.size();
    out.resize(base + ep.states.size());
    std::array<double, 2> psi{0.0, 0.0};
    for (std::size_t t = ep.states.size(); t-- > 0;) {
      const Vec2 s = ep.states[t];
      const double phi[2] = {s.x / norm.width, s.y / norm.height};
      for (int k = 0; k < 2; ++k) psi[k] = (1.0 - gamma) * phi[k] + gamma * psi[k];
      out[base + t] = {s, psi};
    }
  }
  return out;
}

double sf_loss(const NetParams& embedding, const std::vector<SfTarget>& targets,
               const InputNormalizer& norm) {
  double loss = 0.0;
  ForwardCache cache;
  for (const auto& t : targets) {
    forward(embedding.spec, embedding.view(), as_input(norm(t.s)), cache);
    for (int k = 0; k < 2; ++k) {
      const double e = cache.output()[static_cast<std::size_t>(k)] - t.psi[k];
      loss += 0.5 * e * e;
    }
  }
  return loss / static_cast<double>(targets.size());
}

SfModel train_sf(const TrajectoryDataset& dataset, const SfConfig& config,
                 std::uint64_t seed, const InputNormalizer& norm) {
  config.embedding.validate();
  if (config.embedding.output_size() != 2 || config.embedding.input_size() != 2) {
    throw std::invalid_argument("successor-feature network must map 2 -> 2");
  }
  if (config.minibatch_size < 1 || config.steps < 0) {
    throw std::invalid_argument("bad training budget");
  }
  const auto targets = compute_sf_targets(dataset, config.gamma, norm);
  SfModel model;
  model.embedding = init_params(config.embedding, Rng::substream(seed, 0x5f).next());
  model.initial_loss = sf_loss(model.embedding, targets, norm);
  Rng rng = Rng::substream(seed, 0x5f1);
  AdamState adam(model.embedding.values.size(), config.adam);
  std::vector<double> grad(model.embedding.values.size());
  ForwardCache cache;
  const double inv = 1.0 / config.minibatch_size;
  model.loss_curve.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < config.minibatch_size; ++b) {
      const SfTarget& t = targets[rng.uniform_int(targets.size())];
      forward(config.embedding, model.embedding.view(), as_input(norm(t.s)), cache);
      double d[2];
      for (int k = 0; k < 2; ++k) {
        const double e = cache.output()[static_cast<std::size_t>(k)] - t.psi[k];
        loss += 0.5 * e * e;
        d[k] = inv * e;
      }
      backward(config.embedding, model.embedding.view(), cache, d, grad);
    }
    loss *= inv;
    if (!std::isfinite(loss)) {
      throw TrainingError("successor-feature loss is not finite at step " +
                              std::to_string(step), step);
    }
    model.loss_curve.push_back(loss);
    adam_step(adam, model.embedding.view(), grad);
  }
  model.final_loss = sf_loss(model.embedding, targets, norm);
  return model;
}

}  // namespace leakage
