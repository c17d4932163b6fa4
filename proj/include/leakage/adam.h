#ifndef LEAKAGE_ADAM_H_
#define LEAKAGE_ADAM_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace leakage {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Raised when training produces a non-finite loss or gradient. step() is the
// optimizer step at which it happened.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::int64_t step)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg)
      : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

// Bias-corrected Adam update of params in place. A non-finite gradient
// leaves everything untouched and throws TrainingError.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad);

}  // namespace leakage

#endif  // LEAKAGE_ADAM_H_
