#include "leakage/mlp.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "leakage/rng.h"

namespace leakage {

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("an MLP needs at least an input and an output layer");
  }
  for (int n : layer_sizes) {
    if (n < 1) throw std::invalid_argument("MLP layer sizes must be >= 1");
  }
}

std::size_t MlpSpec::num_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += static_cast<std::size_t>(layer_sizes[l] + 1) *
         static_cast<std::size_t>(layer_sizes[l + 1]);
  }
  return n;
}

std::size_t MlpSpec::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(layer_sizes[l] + 1) *
           static_cast<std::size_t>(layer_sizes[l + 1]);
  }
  return off;
}

std::size_t MlpSpec::bias_offset(int layer) const {
  return weight_offset(layer) + static_cast<std::size_t>(layer_sizes[layer]) *
                                    static_cast<std::size_t>(layer_sizes[layer + 1]);
}

std::string to_string(const MlpSpec& spec) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < spec.layer_sizes.size(); ++i) {
    if (i) os << ',';
    os << spec.layer_sizes[i];
  }
  os << ']';
  return os.str();
}

NetParams init_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  NetParams p{spec, std::vector<double>(spec.num_params(), 0.0)};
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t w = spec.weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(fan_in * fan_out); ++i) {
      p.values[w + i] = rng.uniform(-limit, limit);
    }
  }
  return p;
}

NetParams init_params(const MlpSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return init_params(spec, rng);
}

void forward(const MlpSpec& spec, std::span<const double> params,
             std::span<const double> input, ForwardCache& cache) {
  if (params.size() != spec.num_params()) {
    throw std::invalid_argument("parameter count does not match " + to_string(spec));
  }
  if (input.size() != static_cast<std::size_t>(spec.input_size())) {
    throw std::invalid_argument("input dimension " + std::to_string(input.size()) +
                                " does not match " + to_string(spec));
  }
  const int layers = spec.num_layers();
  cache.activations.resize(static_cast<std::size_t>(layers) + 1);
  cache.activations[0].assign(input.begin(), input.end());
  std::size_t off = 0;
  for (int l = 0; l < layers; ++l) {
    const auto fan_in = static_cast<std::size_t>(spec.layer_sizes[l]);
    const auto fan_out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
    const double* w = params.data() + off;
    const double* b = w + fan_in * fan_out;
    const std::vector<double>& x = cache.activations[static_cast<std::size_t>(l)];
    std::vector<double>& y = cache.activations[static_cast<std::size_t>(l) + 1];
    y.resize(fan_out);
    const bool hidden = l + 1 < layers;
    for (std::size_t o = 0; o < fan_out; ++o) {
      double z = b[o];
      const double* row = w + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) z += row[i] * x[i];
      y[o] = hidden ? std::tanh(z) : z;
    }
    off += (fan_in + 1) * fan_out;
  }
  cache.params_data = params.data();
  cache.layer_sizes = spec.layer_sizes;
}

std::vector<double> forward(const MlpSpec& spec, std::span<const double> params,
                            std::span<const double> input) {
  ForwardCache cache;
  forward(spec, params, input, cache);
  return cache.activations.back();
}

void backward(const MlpSpec& spec, std::span<const double> params,
              const ForwardCache& cache, std::span<const double> output_grad,
              std::span<double> param_grad, std::span<double> input_grad) {
  if (cache.params_data != params.data() || cache.layer_sizes != spec.layer_sizes) {
    throw std::logic_error("stale forward cache: it belongs to another network");
  }
  if (param_grad.size() != params.size()) {
    throw std::invalid_argument("gradient buffer has the wrong size");
  }
  if (output_grad.size() != static_cast<std::size_t>(spec.output_size())) {
    throw std::invalid_argument("output gradient has the wrong size");
  }
  const int layers = spec.num_layers();
  // delta holds dL/dz for the layer being processed.
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> below;
  for (int l = layers - 1; l >= 0; --l) {
    const auto fan_in = static_cast<std::size_t>(spec.layer_sizes[l]);
    const auto fan_out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
    const std::size_t w_off = spec.weight_offset(l);
    const double* w = params.data() + w_off;
    double* gw = param_grad.data() + w_off;
    double* gb = gw + fan_in * fan_out;
    const std::vector<double>& x = cache.activations[static_cast<std::size_t>(l)];
    for (std::size_t o = 0; o < fan_out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) grow[i] += d * x[i];
    }
    const bool need_below = l > 0 || !input_grad.empty();
    if (!need_below) break;
    below.assign(fan_in, 0.0);
    for (std::size_t o = 0; o < fan_out; ++o) {
      const double d = delta[o];
      const double* row = w + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) below[i] += row[i] * d;
    }
    if (l > 0) {
      // x = tanh(z) for every layer below the output.
      for (std::size_t i = 0; i < fan_in; ++i) below[i] *= 1.0 - x[i] * x[i];
    }
    delta.swap(below);
  }
  if (!input_grad.empty()) {
    if (input_grad.size() != static_cast<std::size_t>(spec.input_size())) {
      throw std::invalid_argument("input gradient buffer has the wrong size");
    }
    for (std::size_t i = 0; i < input_grad.size(); ++i) input_grad[i] = delta[i];
  }
}

std::vector<double> backward(const MlpSpec& spec, std::span<const double> params,
                             const ForwardCache& cache,
                             std::span<const double> output_grad) {
  std::vector<double> grad(params.size(), 0.0);
  backward(spec, params, cache, output_grad, grad);
  return grad;
}

}  // namespace leakage
