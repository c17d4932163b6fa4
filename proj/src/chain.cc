#include "leakage/chain.h"

#include <cmath>
#include <limits>
#include <string>

namespace leakage::chain {
namespace {

void check_size(const ChainModel& model, const ChainFunction& v) {
  if (v.size() != static_cast<std::size_t>(model.n_states)) {
    throw std::invalid_argument("chain function length " + std::to_string(v.size()) +
                                " does not match n_states " +
                                std::to_string(model.n_states));
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) throw std::invalid_argument("chain function has non-finite entries");
  }
}

// Calls f(s, s_next, P(s, s_next)) for every transition with positive
// probability.
template <typename F>
void for_each_transition(const ChainModel& model, F&& f) {
  const int n = model.n_states;
  const double p = model.p;
  const double q = model.q();
  f(0, 1, 1.0);
  for (int s = 1; s < n - 1; ++s) {
    f(s, s + 1, p);
    f(s, s - 1, q);
  }
  f(n - 1, n - 2, q);
  f(n - 1, n - 1, p);
}

}  // namespace

void ChainModel::validate() const {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument(
        "p must lie in (0, 0.5); for p >= 0.5 there is no stationary distribution "
        "and the walk would wander off to infinity");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be finite and non-negative");
  }
  if (n_states < 3) throw std::invalid_argument("n_states must be >= 3");
}

ChainFunction ProjectionSpec::project(const ChainFunction& v) const {
  ChainFunction out = v;
  out.values.at(constrained_index) = constrained_value;
  return out;
}

ChainFunction ProjectionSpec::project_zero(const ChainFunction& v) const {
  ChainFunction out = v;
  out.values.at(constrained_index) = 0.0;
  return out;
}

double transition_prob(const ChainModel& model, int s, int s_next) {
  double prob = 0.0;
  for_each_transition(model, [&](int a, int b, double w) {
    if (a == s && b == s_next) prob += w;
  });
  return prob;
}

StationaryDistribution stationary_distribution(const ChainModel& model) {
  model.validate();
  const double q = model.q();
  const double ratio = model.p / q;
  // Unnormalized weights q, 1, ratio, ratio^2, ... sum to q + 1 / (1 - ratio).
  const double z = q + 1.0 / (1.0 - ratio);
  StationaryDistribution out;
  out.mu.resize(static_cast<std::size_t>(model.n_states));
  out.mu[0] = q / z;
  double w = 1.0;
  for (int s = 1; s < model.n_states; ++s) {
    out.mu[static_cast<std::size_t>(s)] = w / z;
    w *= ratio;
  }
  // w is now ratio^(N-1), the weight of state N.
  out.tail_mass = w / (1.0 - ratio) / z;
  return out;
}

CharRoots characteristic_roots(const ChainModel& model) {
  model.validate();
  const double p = model.p;
  const double q = model.q();
  const double g = model.gamma;
  const double disc = 1.0 - 4.0 * p * q * g * g;
  // (1 - sqrt(disc)) / (2 p g) rewritten without cancellation.
  CharRoots roots;
  roots.r1 = 2.0 * q * g / (1.0 + std::sqrt(disc));
  roots.r2 = roots.r1 > 0.0 ? (q / p) / roots.r1
                            : std::numeric_limits<double>::infinity();
  return roots;
}

ChainFunction analytic_td_solution(const ChainModel& model) {
  const CharRoots roots = characteristic_roots(model);
  ChainFunction v;
  v.values.resize(static_cast<std::size_t>(model.n_states));
  for (int s = 0; s < model.n_states; ++s) {
    v.values[static_cast<std::size_t>(s)] = model.alpha * std::pow(roots.r1, s);
  }
  return v;
}

ChainFunction expected_td_sweep(const ChainModel& model, const ChainFunction& v,
                                double lr) {
  model.validate();
  check_size(model, v);
  if (!(lr > 0.0 && lr <= 1.0)) throw std::invalid_argument("lr must lie in (0, 1]");
  const int n = model.n_states;
  const double p = model.p;
  const double q = model.q();
  const double g = model.gamma;
  ChainFunction out = v;
  for (int s = 1; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const double forward = s + 1 < n ? v[i + 1] : v[i];
    out[i] = (1.0 - lr) * v[i] + lr * g * (p * forward + q * v[i - 1]);
  }
  return out;
}

NumericFixedPoint td_fixed_point_numeric(const ChainModel& model, double tol,
                                         int max_sweeps, double lr) {
  model.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const double contraction = 1.0 - lr * (1.0 - model.gamma);
  const double stop = contraction > 0.0 ? tol * (1.0 - contraction) / contraction
                                        : std::numeric_limits<double>::infinity();
  NumericFixedPoint result;
  result.values.values.assign(static_cast<std::size_t>(model.n_states), 0.0);
  result.values[0] = model.alpha;
  double change = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    ChainFunction next = expected_td_sweep(model, result.values, lr);
    change = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s) {
      change = std::max(change, std::abs(next[s] - result.values[s]));
    }
    result.values = std::move(next);
    result.sweeps = sweep;
    result.last_change = change;
    if (change <= stop) return result;
  }
  throw ConvergenceError("TD iteration did not converge in " +
                             std::to_string(max_sweeps) +
                             " sweeps; last change " + std::to_string(change),
                         change);
}

ChainFunction td_operator(const ChainModel& model, const ChainFunction& v) {
  model.validate();
  check_size(model, v);
  ChainFunction out;
  out.values.assign(v.size(), 0.0);
  for_each_transition(model, [&](int s, int s_next, double w) {
    out[static_cast<std::size_t>(s)] += model.gamma * w * v[static_cast<std::size_t>(s_next)];
  });
  return out;
}

std::vector<double> recurrence_residual(const ChainModel& model,
                                        const ChainFunction& v) {
  model.validate();
  check_size(model, v);
  std::vector<double> r(v.size(), 0.0);
  if (model.gamma == 0.0) {
    // The recurrence degenerates to v_s = 0.
    for (std::size_t s = 1; s + 1 < v.size(); ++s) r[s] = v[s];
    return r;
  }
  const double p = model.p;
  for (std::size_t s = 1; s + 1 < v.size(); ++s) {
    r[s] = v[s + 1] - v[s] / (p * model.gamma) + (model.q() / p) * v[s - 1];
  }
  return r;
}

double dirichlet_norm_sq(const ChainModel& model, const ChainFunction& e) {
  check_size(model, e);
  const auto mu = stationary_distribution(model).mu;
  double sum = 0.0;
  for_each_transition(model, [&](int s, int s_next, double w) {
    const double d = e[static_cast<std::size_t>(s_next)] - e[static_cast<std::size_t>(s)];
    sum += mu[static_cast<std::size_t>(s)] * w * d * d;
  });
  return 0.5 * sum;
}

double mu_norm_sq(const ChainModel& model, const ChainFunction& e) {
  check_size(model, e);
  const auto mu = stationary_distribution(model).mu;
  double sum = 0.0;
  for (std::size_t s = 0; s < e.size(); ++s) sum += mu[s] * e[s] * e[s];
  return sum;
}

double mixed_loss(const ChainModel& model, const ChainFunction& e) {
  return model.gamma * dirichlet_norm_sq(model, e) +
         (1.0 - model.gamma) * mu_norm_sq(model, e);
}

ChainFunction mixed_loss_gradient(const ChainModel& model, const ChainFunction& e) {
  check_size(model, e);
  const auto mu = stationary_distribution(model).mu;
  ChainFunction grad;
  grad.values.assign(e.size(), 0.0);
  // d/de_k of 0.5 * mu(s) P(s,s') (e_s' - e_s)^2 for both endpoints.
  for_each_transition(model, [&](int s, int s_next, double w) {
    const auto a = static_cast<std::size_t>(s);
    const auto b = static_cast<std::size_t>(s_next);
    const double c = model.gamma * mu[a] * w * (e[b] - e[a]);
    grad[b] += c;
    grad[a] -= c;
  });
  for (std::size_t s = 0; s < e.size(); ++s) {
    grad[s] += 2.0 * (1.0 - model.gamma) * mu[s] * e[s];
  }
  grad[0] = 0.0;
  return grad;
}

TsitsiklisReport tsitsiklis_check(const ChainModel& model,
                                  const ChainFunction& v_tilde,
                                  const ChainFunction& v_star,
                                  const ProjectionSpec& spec) {
  check_size(model, v_tilde);
  check_size(model, v_star);
  auto diff = [](const ChainFunction& a, const ChainFunction& b) {
    ChainFunction d = a;
    for (std::size_t s = 0; s < d.size(); ++s) d[s] -= b[s];
    return d;
  };
  TsitsiklisReport r;
  r.error_norm = std::sqrt(mu_norm_sq(model, diff(v_tilde, v_star)));
  r.best_in_class_norm = std::sqrt(mu_norm_sq(model, diff(spec.project(v_star), v_star)));
  const double g = model.gamma;
  r.loose_factor = 1.0 / (1.0 - g);
  r.sharp_factor = 1.0 / std::sqrt(1.0 - g * g);
  r.loose_rhs = r.loose_factor * r.best_in_class_norm;
  r.sharp_rhs = r.sharp_factor * r.best_in_class_norm;
  r.loose_holds = r.error_norm <= r.loose_rhs;
  r.sharp_holds = r.error_norm <= r.sharp_rhs;
  r.ratio = r.best_in_class_norm > 0.0 ? r.error_norm / r.best_in_class_norm
                                       : std::numeric_limits<double>::quiet_NaN();
  r.contracted_residual = std::sqrt(
      mu_norm_sq(model, spec.project_zero(td_operator(model, diff(v_tilde, v_star)))));
  return r;
}

}  // namespace leakage::chain
