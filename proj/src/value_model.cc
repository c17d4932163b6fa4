#include "leakage/value_model.h"

#include <cmath>
#include <stdexcept>

#include "leakage/embeddings.h"
#include "leakage/envsim.h"

namespace leakage {

std::string to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::kNone: return "none";
    case EmbeddingMode::kOracle: return "oracle";
    case EmbeddingMode::kTimeProx: return "timeprox";
    case EmbeddingMode::kSf: return "sf";
  }
  return "none";
}

EmbeddingMode parse_embedding_mode(const std::string& name) {
  if (name == "none") return EmbeddingMode::kNone;
  if (name == "oracle") return EmbeddingMode::kOracle;
  if (name == "timeprox") return EmbeddingMode::kTimeProx;
  if (name == "sf") return EmbeddingMode::kSf;
  throw std::invalid_argument("unknown embedding mode '" + name +
                              "' (expected none, oracle, timeprox or sf)");
}

InputNormalizer InputNormalizer::for_layout(const MapLayout& layout) {
  return {layout.width, layout.height};
}

TwoStageValue TwoStageValue::identity_embedding(NetParams value,
                                                InputNormalizer norm) {
  value.spec.validate();
  if (value.spec.input_size() != 2) {
    throw std::invalid_argument("value network must take 2 inputs");
  }
  TwoStageValue m;
  m.kind_ = EmbeddingKind::kIdentity;
  m.value_spec_ = value.spec;
  m.flat_ = std::move(value.values);
  m.norm_ = norm;
  return m;
}

TwoStageValue TwoStageValue::oracle_embedding(double alpha, NetParams value,
                                              InputNormalizer norm) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("oracle alpha must lie in [0, 1]");
  }
  TwoStageValue m = identity_embedding(std::move(value), norm);
  m.kind_ = EmbeddingKind::kOracle;
  m.alpha_ = alpha;
  return m;
}

TwoStageValue TwoStageValue::mlp_embedding(NetParams embedding, bool frozen,
                                           NetParams value, Junction junction,
                                           InputNormalizer norm) {
  embedding.spec.validate();
  value.spec.validate();
  if (embedding.spec.input_size() != 2) {
    throw std::invalid_argument("embedding network must take 2 inputs");
  }
  if (embedding.spec.output_size() != value.spec.input_size()) {
    throw std::invalid_argument("embedding output size " +
                                std::to_string(embedding.spec.output_size()) +
                                " does not match value input size " +
                                std::to_string(value.spec.input_size()));
  }
  if (embedding.values.size() != embedding.spec.num_params() ||
      value.values.size() != value.spec.num_params()) {
    throw std::invalid_argument("parameter count does not match layer sizes");
  }
  TwoStageValue m;
  m.kind_ = EmbeddingKind::kMlp;
  m.embed_spec_ = embedding.spec;
  m.value_spec_ = value.spec;
  m.embed_size_ = embedding.values.size();
  m.flat_ = std::move(embedding.values);
  m.flat_.insert(m.flat_.end(), value.values.begin(), value.values.end());
  m.frozen_ = frozen;
  m.junction_ = junction;
  m.norm_ = norm;
  return m;
}

std::vector<double> TwoStageValue::embed(Vec2 s) const {
  switch (kind_) {
    case EmbeddingKind::kIdentity: {
      const Vec2 n = norm_(s);
      return {n.x, n.y};
    }
    case EmbeddingKind::kOracle: {
      const Vec2 n = oracle_embed(alpha_, s, norm_);
      return {n.x, n.y};
    }
    case EmbeddingKind::kMlp: {
      const Vec2 n = norm_(s);
      const double in[2] = {n.x, n.y};
      std::vector<double> e = forward(embed_spec_, embedding_params(), in);
      if (junction_ == Junction::kTanh) {
        for (double& x : e) x = std::tanh(x);
      }
      return e;
    }
  }
  return {};
}

double TwoStageValue::predict(Vec2 s) const {
  const std::vector<double> h = embed(s);
  return forward(value_spec_, value_params(), h)[0];
}

double TwoStageValue::predict_and_grad(Vec2 s, double scale,
                                       std::span<double> grad) const {
  if (grad.size() != flat_.size()) {
    throw std::invalid_argument("gradient buffer has the wrong size");
  }
  const double out_grad[1] = {scale};
  std::span<double> value_grad = grad.subspan(embed_size_);
  if (kind_ != EmbeddingKind::kMlp) {
    ForwardCache vc;
    forward(value_spec_, value_params(), embed(s), vc);
    backward(value_spec_, value_params(), vc, out_grad, value_grad);
    return vc.output()[0];
  }
  const Vec2 n = norm_(s);
  const double in[2] = {n.x, n.y};
  ForwardCache ec;
  forward(embed_spec_, embedding_params(), in, ec);
  std::vector<double> h(ec.output().begin(), ec.output().end());
  if (junction_ == Junction::kTanh) {
    for (double& x : h) x = std::tanh(x);
  }
  ForwardCache vc;
  forward(value_spec_, value_params(), h, vc);
  std::vector<double> h_grad(h.size(), 0.0);
  backward(value_spec_, value_params(), vc, out_grad, value_grad,
           frozen_ ? std::span<double>() : std::span<double>(h_grad));
  if (!frozen_) {
    if (junction_ == Junction::kTanh) {
      for (std::size_t i = 0; i < h.size(); ++i) h_grad[i] *= 1.0 - h[i] * h[i];
    }
    backward(embed_spec_, embedding_params(), ec, h_grad,
             grad.first(embed_size_));
  }
  return vc.output()[0];
}

double LinearFeatureValue::predict(Vec2 s) const {
  const std::vector<double> phi = features_(s);
  double v = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) v += weights_[i] * phi.at(i);
  return v;
}

double LinearFeatureValue::predict_and_grad(Vec2 s, double scale,
                                            std::span<double> grad) const {
  const std::vector<double> phi = features_(s);
  double v = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    v += weights_[i] * phi.at(i);
    grad[i] += scale * phi[i];
  }
  return v;
}

}  // namespace leakage
