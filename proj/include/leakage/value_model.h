#ifndef LEAKAGE_VALUE_MODEL_H_
#define LEAKAGE_VALUE_MODEL_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "leakage/geometry.h"
#include "leakage/mlp.h"

namespace leakage {

struct MapLayout;

enum class EmbeddingMode { kNone, kOracle, kTimeProx, kSf };

std::string to_string(EmbeddingMode mode);
EmbeddingMode parse_embedding_mode(const std::string& name);

// Scales map coordinates to [-1, 1]^2 before they reach any network.
struct InputNormalizer {
  double width = 400.0;
  double height = 300.0;

  static InputNormalizer for_layout(const MapLayout& layout);
  Vec2 operator()(Vec2 p) const {
    return {2.0 * p.x / width - 1.0, 2.0 * p.y / height - 1.0};
  }
};

// A differentiable state-value function with a flat trainable parameter
// vector.
class ValueModel {
 public:
  virtual ~ValueModel() = default;

  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;
  virtual double predict(Vec2 s) const = 0;
  // Adds scale * dV(s)/dparams into grad and returns V(s).
  virtual double predict_and_grad(Vec2 s, double scale,
                                  std::span<double> grad) const = 0;

  std::size_t num_params() const { return params().size(); }
};

// What sits between the embedding output and the value network input.
enum class Junction { kIdentity, kTanh };

// v(s) = g(f(s, w_e), w_v). The embedding f is the normalized input itself,
// the fixed oracle transform, or an MLP whose weights may be frozen. The flat
// parameter vector is [w_e | w_v]; frozen coordinates always get zero
// gradient.
class TwoStageValue final : public ValueModel {
 public:
  enum class EmbeddingKind { kIdentity, kOracle, kMlp };

  static TwoStageValue identity_embedding(NetParams value, InputNormalizer norm);
  static TwoStageValue oracle_embedding(double alpha, NetParams value,
                                        InputNormalizer norm);
  static TwoStageValue mlp_embedding(NetParams embedding, bool frozen,
                                     NetParams value, Junction junction,
                                     InputNormalizer norm);

  std::span<double> params() override { return flat_; }
  std::span<const double> params() const override { return flat_; }
  double predict(Vec2 s) const override;
  double predict_and_grad(Vec2 s, double scale,
                          std::span<double> grad) const override;

  // Input of the value network for state s.
  std::vector<double> embed(Vec2 s) const;

  EmbeddingKind embedding_kind() const { return kind_; }
  const MlpSpec& embedding_spec() const { return embed_spec_; }
  const MlpSpec& value_spec() const { return value_spec_; }
  std::span<const double> embedding_params() const {
    return std::span<const double>(flat_).first(embed_size_);
  }
  std::span<const double> value_params() const {
    return std::span<const double>(flat_).subspan(embed_size_);
  }
  std::size_t embedding_param_count() const { return embed_size_; }
  bool embedding_frozen() const { return frozen_; }
  void set_embedding_frozen(bool frozen) { frozen_ = frozen; }
  double oracle_alpha() const { return alpha_; }
  Junction junction() const { return junction_; }
  const InputNormalizer& normalizer() const { return norm_; }

 private:
  TwoStageValue() = default;

  EmbeddingKind kind_ = EmbeddingKind::kIdentity;
  MlpSpec embed_spec_;
  MlpSpec value_spec_;
  std::vector<double> flat_;
  std::size_t embed_size_ = 0;
  bool frozen_ = true;
  double alpha_ = 0.0;
  Junction junction_ = Junction::kIdentity;
  InputNormalizer norm_;
};

// Linear model over a fixed feature map, e.g. one-hot features for tabular
// checks.
class LinearFeatureValue final : public ValueModel {
 public:
  using FeatureMap = std::function<std::vector<double>(Vec2)>;

  LinearFeatureValue(FeatureMap features, std::size_t n_features)
      : features_(std::move(features)), weights_(n_features, 0.0) {}

  std::span<double> params() override { return weights_; }
  std::span<const double> params() const override { return weights_; }
  double predict(Vec2 s) const override;
  double predict_and_grad(Vec2 s, double scale,
                          std::span<double> grad) const override;

 private:
  FeatureMap features_;
  std::vector<double> weights_;
};

}  // namespace leakage

#endif  // LEAKAGE_VALUE_MODEL_H_
