#include "leakage/adam.h"

#include <cmath>
#include <string>

namespace leakage {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw TrainingError("non-finite gradient at step " + std::to_string(state.step + 1),
                          state.step + 1);
    }
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grad[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / correct1;
    const double v_hat = state.v[i] / correct2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace leakage
