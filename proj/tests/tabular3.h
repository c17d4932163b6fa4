#ifndef LEAKAGE_TESTS_TABULAR3_H_
#define LEAKAGE_TESTS_TABULAR3_H_

// Three-state chain 0 <-> 1 <-> 2 encoded as positions x = 0, 1, 2; from
// state 2 the walk may leave with reward 1 (landing on x = 3, a state with no
// feature). Used to check that batch TD lands on the maximum-likelihood
// model's values.

#include <array>
#include <cmath>
#include <vector>

#include "leakage/envsim.h"
#include "leakage/rng.h"
#include "leakage/value_model.h"

namespace leakage::testing {

inline TrajectoryDataset tabular3_dataset(std::uint64_t seed, int n_episodes, int max_len,
                                          double gamma) {
  TrajectoryDataset ds;
  ds.map_id = "tabular3";
  ds.gamma = gamma;
  ds.seed = seed;
  ds.max_len = max_len;
  Rng rng(seed);
  for (int e = 0; e < n_episodes; ++e) {
    Episode ep;
    int s = static_cast<int>(rng.uniform_int(3));
    ep.states.push_back({static_cast<double>(s), 0.0});
    for (int t = 0; t < max_len; ++t) {
      const double u = rng.uniform();
      double r = 0.0;
      int next;
      if (s == 0) {
        next = u < 0.7 ? 1 : 0;
      } else if (s == 1) {
        next = u < 0.5 ? 2 : 0;
        if (u > 0.9) r = -0.5;
      } else {
        next = u < 0.4 ? 3 : 1;
      }
      if (next == 3) r = 1.0;
      ep.actions.push_back(0);
      ep.rewards.push_back(r);
      ep.states.push_back({static_cast<double>(next), 0.0});
      if (next == 3) {
        ep.terminated = true;
        break;
      }
      s = next;
    }
    ds.episodes.push_back(std::move(ep));
  }
  return ds;
}

inline LinearFeatureValue tabular3_model() {
  return LinearFeatureValue(
      [](Vec2 s) {
        std::vector<double> f(3, 0.0);
        const int k = static_cast<int>(std::lround(s.x));
        if (k >= 0 && k < 3) f[static_cast<std::size_t>(k)] = 1.0;
        return f;
      },
      3);
}

// Solves V = Rbar + gamma Phat V for the counts in the dataset (Gaussian
// elimination with partial pivoting).
inline std::array<double, 3> tabular3_ml_values(const TrajectoryDataset& ds, double gamma) {
  double n[3] = {0, 0, 0}, rsum[3] = {0, 0, 0}, cnt[3][3] = {};
  for (const Episode& ep : ds.episodes) {
    for (std::size_t t = 0; t < ep.actions.size(); ++t) {
      const int s = static_cast<int>(std::lround(ep.states[t].x));
      const int s2 = static_cast<int>(std::lround(ep.states[t + 1].x));
      const bool terminal = ep.terminated && t + 1 == ep.actions.size();
      n[s] += 1;
      rsum[s] += ep.rewards[t];
      if (!terminal && s2 < 3) cnt[s][s2] += 1;
    }
  }
  double a[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - gamma * cnt[i][j] / n[i];
    a[i][3] = rsum[i] / n[i];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) std::swap(a[c][k], a[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

}  // namespace leakage::testing

#endif  // LEAKAGE_TESTS_TABULAR3_H_
