#ifndef LEAKAGE_CHAIN_H_
#define LEAKAGE_CHAIN_H_

// Exact analysis of the reflecting random walk on {0, 1, 2, ...}:
//   0 -> 1 with probability 1; s -> s+1 with p, s -> s-1 with q = 1-p (s > 0).
// All rewards are zero, so the true value function is 0. The function class
// pins v(0) = alpha, and TD(0) then settles on v_s = alpha * r1^s.
//
// Numerics use the chain truncated to N states. State N-1 reflects its
// forward move (stays put with probability p), which keeps the matrix
// stochastic and the geometric distribution exactly stationary.

#include <stdexcept>
#include <vector>

namespace leakage::chain {

struct ChainModel {
  double p = 0.25;
  double gamma = 0.99;
  double alpha = 1.0;
  int n_states = 200;

  double q() const { return 1.0 - p; }
  // Requires 0 < p < 0.5, 0 <= gamma < 1, alpha >= 0 finite, n_states >= 3.
  void validate() const;
};

// Values v_0..v_{N-1} on the truncated chain.
struct ChainFunction {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t s) const { return values[s]; }
  double& operator[](std::size_t s) { return values[s]; }
};

struct CharRoots {
  double r1 = 0.0;  // the root below 1
  double r2 = 0.0;  // the root above q/p
};

struct StationaryDistribution {
  std::vector<double> mu;   // truncated, normalized by the infinite series
  double tail_mass = 0.0;   // sum of mu(s) for s >= N
};

// The affine class a + W, a = (alpha, 0, 0, ...), W = {v : v_0 = 0}.
struct ProjectionSpec {
  std::size_t constrained_index = 0;
  double constrained_value = 1.0;

  ChainFunction project(const ChainFunction& v) const;       // onto a + W
  ChainFunction project_zero(const ChainFunction& v) const;  // onto W
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Transition probability P(s, s') on the truncated chain.
double transition_prob(const ChainModel& model, int s, int s_next);

StationaryDistribution stationary_distribution(const ChainModel& model);

CharRoots characteristic_roots(const ChainModel& model);

// v_s = alpha * r1^s.
ChainFunction analytic_td_solution(const ChainModel& model);

// One synchronous expected TD(0) update with learning rate `lr`; v_0 stays
// pinned.
ChainFunction expected_td_sweep(const ChainModel& model, const ChainFunction& v,
                                double lr);

struct NumericFixedPoint {
  ChainFunction values;
  int sweeps = 0;
  double last_change = 0.0;
};

// Iterates expected_td_sweep from (alpha, 0, ..., 0). The sweep is a
// contraction with factor c = 1 - lr (1 - gamma) in the max norm, so stopping
// once the per-state change drops below tol (1 - c) / c leaves the iterate
// within tol of the truncated chain's fixed point. Throws ConvergenceError
// when max_sweeps runs out.
NumericFixedPoint td_fixed_point_numeric(const ChainModel& model, double tol,
                                         int max_sweeps, double lr = 1.0);

// Average TD(0) operator: (Tv)(s) = gamma * E[v(S') | S = s].
ChainFunction td_operator(const ChainModel& model, const ChainFunction& v);

// v_{s+1} - v_s / (p gamma) + (q / p) v_{s-1} for interior s; 0 elsewhere.
std::vector<double> recurrence_residual(const ChainModel& model,
                                        const ChainFunction& v);

double dirichlet_norm_sq(const ChainModel& model, const ChainFunction& e);
double mu_norm_sq(const ChainModel& model, const ChainFunction& e);

// gamma * ||e||_Dir^2 + (1 - gamma) * ||e||_mu^2.
double mixed_loss(const ChainModel& model, const ChainFunction& e);
// Partial derivatives over the free coordinates s > 0; component 0 is 0.
ChainFunction mixed_loss_gradient(const ChainModel& model, const ChainFunction& e);

struct TsitsiklisReport {
  double error_norm = 0.0;            // ||v_tilde - v_star||_mu
  double best_in_class_norm = 0.0;    // ||Pi v_star - v_star||_mu
  double loose_factor = 0.0;          // 1 / (1 - gamma)
  double sharp_factor = 0.0;          // 1 / sqrt(1 - gamma^2)
  double loose_rhs = 0.0;
  double sharp_rhs = 0.0;
  bool loose_holds = false;
  bool sharp_holds = false;
  double ratio = 0.0;                 // error_norm / best_in_class_norm
  double contracted_residual = 0.0;   // ||Pi_0 T (v_tilde - v_star)||_mu
};

TsitsiklisReport tsitsiklis_check(const ChainModel& model,
                                  const ChainFunction& v_tilde,
                                  const ChainFunction& v_star,
                                  const ProjectionSpec& spec);

}  // namespace leakage::chain

#endif  // LEAKAGE_CHAIN_H_
