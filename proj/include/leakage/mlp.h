#ifndef LEAKAGE_MLP_H_
#define LEAKAGE_MLP_H_

// Fully connected tanh networks over a flat parameter array.
//
// Layout of the flat array, layer by layer: the weight matrix W (fan_out rows
// by fan_in columns, row-major) followed by the bias vector. Hidden layers
// apply tanh, the output layer is affine.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace leakage {

class Rng;

struct MlpSpec {
  std::vector<int> layer_sizes;  // input size first, output size last

  // Throws std::invalid_argument unless there are >= 2 layers of size >= 1.
  void validate() const;
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  std::size_t num_params() const;
  // Offset of layer l's weight block in the flat array.
  std::size_t weight_offset(int layer) const;
  std::size_t bias_offset(int layer) const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

std::string to_string(const MlpSpec& spec);

struct NetParams {
  MlpSpec spec;
  std::vector<double> values;

  std::span<const double> view() const { return values; }
  std::span<double> view() { return values; }
};

// Uniform Glorot initialization, zero biases.
NetParams init_params(const MlpSpec& spec, Rng& rng);
NetParams init_params(const MlpSpec& spec, std::uint64_t seed);

// Activations of one forward pass: activations[0] is the input,
// activations.back() the output.
struct ForwardCache {
  std::vector<std::vector<double>> activations;
  const double* params_data = nullptr;
  std::vector<int> layer_sizes;

  std::span<const double> output() const { return activations.back(); }
};

void forward(const MlpSpec& spec, std::span<const double> params,
             std::span<const double> input, ForwardCache& cache);
std::vector<double> forward(const MlpSpec& spec, std::span<const double> params,
                            std::span<const double> input);

// Adds d(output . output_grad)/d(params) into param_grad. When input_grad is
// non-empty it receives the gradient with respect to the input. Throws when
// the cache was not produced by forward() with this spec and parameter
// buffer.
void backward(const MlpSpec& spec, std::span<const double> params,
              const ForwardCache& cache, std::span<const double> output_grad,
              std::span<double> param_grad, std::span<double> input_grad = {});
std::vector<double> backward(const MlpSpec& spec, std::span<const double> params,
                             const ForwardCache& cache,
                             std::span<const double> output_grad);

}  // namespace leakage

#endif  // LEAKAGE_MLP_H_
