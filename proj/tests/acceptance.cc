// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.
//
//   acceptance                 scaled budget (10000 embedding + 10000 value steps)
//   acceptance --budget full   40000 + 40000, 1000-rollout truth (slow)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "leakage/chain.h"
#include "leakage/dataset_io.h"
#include "leakage/embeddings.h"
#include "leakage/eval.h"
#include "leakage/experiment.h"
#include "leakage/learners.h"
#include "leakage/mlp.h"
#include "leakage/model_io.h"
#include "leakage/rng.h"
#include "tabular3.h"

using namespace leakage;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// --- chain ------------------------------------------------------------------

const double kPs[] = {0.1, 0.25, 0.4};
const double kGammas[] = {0.5, 0.9, 0.99};

Outcome criterion1() {
  double worst = 0.0;
  for (double p : kPs) {
    for (double g : kGammas) {
      const chain::ChainModel m{p, g, 1.0, 200};
      const auto st = chain::stationary_distribution(m);
      if (st.tail_mass >= 1e-12) return {false, "tail mass too large at p=" + fmt(p)};
      const auto num = chain::td_fixed_point_numeric(m, 1e-10, 10'000'000);
      // Closed form from the textbook quadratic, independent of the library.
      const double r1 = (1.0 - std::sqrt(1.0 - 4.0 * p * (1 - p) * g * g)) / (2.0 * p * g);
      for (int s = 0; s < m.n_states; ++s) {
        if (st.mu[s] > 1e-12) worst = std::max(worst, std::abs(num.values[s] - std::pow(r1, s)));
      }
    }
  }
  return {worst < 1e-8, "max |numeric - alpha r1^s| = " + fmt(worst)};
}

Outcome criterion2() {
  double grad_max = 0.0, fd_worst = 0.0;
  for (double p : kPs) {
    for (double g : kGammas) {
      const chain::ChainModel m{p, g, 1.0, 200};
      const auto v = chain::analytic_td_solution(m);
      const auto grad = chain::mixed_loss_gradient(m, v);
      for (double x : grad.values) grad_max = std::max(grad_max, std::abs(x));
      // Finite differences at a perturbed point, where the gradient is not 0.
      Rng rng(static_cast<std::uint64_t>(p * 1000 + g * 100));
      chain::ChainFunction e = v;
      for (int s = 1; s < 40; ++s) e[s] += rng.uniform(-0.1, 0.1);
      const auto ge = chain::mixed_loss_gradient(m, e);
      for (int s = 1; s < 40; ++s) {
        const double h = 1e-5;
        chain::ChainFunction a = e, b = e;
        a[s] += h;
        b[s] -= h;
        const double fd = (chain::mixed_loss(m, a) - chain::mixed_loss(m, b)) / (2 * h);
        fd_worst = std::max(fd_worst, std::abs(ge[s] - fd) / std::max(std::abs(fd), 1e-4));
      }
    }
  }
  return {grad_max < 1e-10 && fd_worst < 1e-6,
          "max |grad| at solution = " + fmt(grad_max) + ", worst FD relative error = " + fmt(fd_worst)};
}

Outcome criterion3() {
  bool ok = true;
  double worst_ratio = 0.0;
  for (double p : kPs) {
    for (double g : kGammas) {
      const chain::ChainModel m{p, g, 1.0, 200};
      const chain::ChainFunction zero{std::vector<double>(200, 0.0)};
      const chain::ProjectionSpec spec{0, 1.0};
      const auto r = chain::tsitsiklis_check(m, chain::analytic_td_solution(m), zero, spec);
      ok = ok && r.error_norm <= r.sharp_rhs && r.sharp_rhs <= r.loose_rhs;
      worst_ratio = std::max(worst_ratio, r.ratio * std::sqrt(1 - g * g));
      chain::ChainFunction spike = zero;
      spike[0] = 1.0;
      const auto c = chain::tsitsiklis_check(m, spike, zero, spec);
      ok = ok && std::abs(c.ratio - 1.0) < 1e-12;
    }
  }
  return {ok, "largest error / sharp bound = " + fmt(worst_ratio) + ", counterexample ratio 1"};
}

Outcome criterion4() {
  auto r1 = [](double g) { return chain::characteristic_roots({0.25, g, 1.0, 200}).r1; };
  const double a = r1(0.999), b = r1(0.99), c = r1(0.9), d = r1(1e-4);
  return {a > b && b > c && d < 1e-3, "r1: " + fmt(a) + " > " + fmt(b) + " > " + fmt(c) +
                                          ", r1(1e-4) = " + fmt(d)};
}

// --- networks ---------------------------------------------------------------

Outcome criterion5() {
  Rng rng(5150);
  double worst = 0.0;
  int passed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    MlpSpec spec;
    const int depth = 2 + static_cast<int>(rng.uniform_int(4));
    for (int l = 0; l < depth; ++l) spec.layer_sizes.push_back(1 + static_cast<int>(rng.uniform_int(8)));
    std::vector<double> w(spec.num_params()), x(static_cast<std::size_t>(spec.input_size())),
        og(static_cast<std::size_t>(spec.output_size()));
    for (double& v : w) v = rng.uniform(-1, 1);
    for (double& v : x) v = rng.uniform(-2, 2);
    for (double& v : og) v = rng.uniform(-1, 1);
    auto f = [&](const std::vector<double>& params) {
      const auto y = forward(spec, params, x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += og[i] * y[i];
      return s;
    };
    ForwardCache cache;
    forward(spec, w, x, cache);
    const auto grad = backward(spec, w, cache, og);
    double trial_worst = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto a = w, b = w;
      a[k] += 1e-5;
      b[k] -= 1e-5;
      const double fd = (f(a) - f(b)) / 2e-5;
      trial_worst = std::max(trial_worst, std::abs(grad[k] - fd) / std::max(1.0, std::abs(fd)));
    }
    worst = std::max(worst, trial_worst);
    if (trial_worst < 1e-4) ++passed;
  }
  return {passed == 50, std::to_string(passed) + "/50 networks, worst relative error " + fmt(worst)};
}

// --- labyrinth experiments --------------------------------------------------

struct Lab {
  ExperimentConfig config;
  int n_seeds = 5;
  std::map<std::string, ValueGrid> truth;
  std::map<std::tuple<std::string, Method, EmbeddingMode, int>, EvalReport> cache;

  const ValueGrid& truth_for(const std::string& map_id) {
    auto it = truth.find(map_id);
    if (it == truth.end()) {
      const auto t0 = std::chrono::steady_clock::now();
      it = truth.emplace(map_id, ground_truth(builtin_map(map_id), config.gamma, config.cell_size,
                                              config.truth_rollouts, kDefaultTruthSeed,
                                              config.truth_horizon))
               .first;
      std::printf("  [truth %s: %d rollouts/cell, %.0fs]\n", map_id.c_str(), config.truth_rollouts,
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      std::fflush(stdout);
    }
    return it->second;
  }

  const EvalReport& run(const std::string& map_id, Method method, EmbeddingMode mode, int seed) {
    const auto key = std::make_tuple(map_id, method, mode, seed);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const MapLayout layout = builtin_map(map_id);
    const ValueGrid& t = truth_for(map_id);
    const TrajectoryDataset ds = generate_dataset(layout, config.n_episodes, config.max_len,
                                                  static_cast<std::uint64_t>(seed), config.gamma);
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult r = leakage_experiment(layout, ds, method, mode,
                                                  static_cast<std::uint64_t>(seed), config, t);
    std::printf("  [%s %s %-8s seed %d: msve %.4g leakage %+.4g, %.0fs]\n", map_id.c_str(),
                to_string(method).c_str(), to_string(mode).c_str(), seed, r.report.msve_uniform,
                r.report.leakage_score,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);
    return cache.emplace(key, r.report).first->second;
  }

  double median_of(const std::string& map_id, Method method, EmbeddingMode mode,
                   double EvalReport::*field) {
    std::vector<double> xs;
    for (int seed = 1; seed <= n_seeds; ++seed) xs.push_back(run(map_id, method, mode, seed).*field);
    return median(xs);
  }
};

Outcome criterion6(Lab& lab) {
  const double td = lab.median_of("map2", Method::kTd, EmbeddingMode::kNone, &EvalReport::leakage_score);
  const double mc = lab.median_of("map2", Method::kMc, EmbeddingMode::kNone, &EvalReport::leakage_score);
  return {td > 0.0 && td > mc,
          "map2 median upper-room leakage: TD " + fmt(td) + ", MC " + fmt(mc)};
}

Outcome criterion7(Lab& lab) {
  auto msve = [&](const std::string& map_id, EmbeddingMode mode) {
    return lab.median_of(map_id, Method::kTd, mode, &EvalReport::msve_uniform);
  };
  bool ok = true;
  std::ostringstream d;
  const double base1 = msve("map1", EmbeddingMode::kNone);
  const double oracle = msve("map1", EmbeddingMode::kOracle);
  ok = ok && oracle < base1;
  d << "map1 oracle " << fmt(oracle) << (oracle < base1 ? " < " : " >= ") << "baseline " << fmt(base1);
  for (const char* map_id : {"map1", "map2", "map3"}) {
    const double base = msve(map_id, EmbeddingMode::kNone);
    const double tp = msve(map_id, EmbeddingMode::kTimeProx);
    const double sf = msve(map_id, EmbeddingMode::kSf);
    const bool win = std::min(tp, sf) < base;
    ok = ok && win;
    d << "; " << map_id << " baseline " << fmt(base) << " timeprox " << fmt(tp) << " sf " << fmt(sf);
  }
  return {ok, "median TD MSVE: " + d.str()};
}

Outcome criterion8() {
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const double gamma = 0.9;
    const TrajectoryDataset ds = testing::tabular3_dataset(seed, 200, 20, gamma);
    const auto ml = testing::tabular3_ml_values(ds, gamma);
    auto model = testing::tabular3_model();
    TrainConfig c;
    c.method = Method::kTd;
    c.full_batch = true;
    c.optimizer = Optimizer::kSgd;
    c.sgd_lr = 1.0;
    c.steps = 3000;
    c.gamma = gamma;
    train_td(ds, model, c);
    for (int s = 0; s < 3; ++s) worst = std::max(worst, std::abs(model.params()[s] - ml[s]));
  }
  return {worst < 1e-3, "max |TD - maximum-likelihood value| = " + fmt(worst)};
}

// Every stage run twice from the same seeds; outputs compared byte for byte.
Outcome criterion9() {
  ExperimentConfig c;
  c.n_episodes = 20;
  c.max_len = 300;
  c.embedding_steps = 300;
  c.value_steps = 300;
  std::vector<std::string> differing;
  auto check = [&](const std::string& stage, const std::function<std::string()>& produce) {
    if (produce() != produce()) differing.push_back(stage);
  };
  for (const char* map_id : {"map1", "map2", "map3"}) {
    const MapLayout layout = builtin_map(map_id);
    const std::string id = map_id;
    check(id + " dataset", [&] { return dataset_to_json(generate_dataset(layout, 20, 300, 7)); });
    check(id + " ground truth", [&] { return grid_to_csv(ground_truth(layout, 0.99, 25, 3, 7, 300)); });
    const TrajectoryDataset ds = generate_dataset(layout, 20, 300, 7);
    const ValueGrid truth = ground_truth(layout, 0.99, 25, 3, 7, 300);
    for (EmbeddingMode mode : {EmbeddingMode::kNone, EmbeddingMode::kOracle,
                               EmbeddingMode::kTimeProx, EmbeddingMode::kSf}) {
      if (mode == EmbeddingMode::kOracle && id != "map1") continue;
      for (Method method : {Method::kMc, Method::kTd}) {
        check(id + " " + to_string(method) + "/" + to_string(mode), [&] {
          BuiltModel b = build_value_model(mode, ds, layout, c, 7);
          TrainConfig tc = value_train_config(method, c, 7);
          const TrainResult tr = train_value(ds, b.model, tc);
          const ValueGrid pred = predict_grid(b.model, layout, truth.cell_size);
          const EvalReport rep = evaluate_grid(pred, truth, ds);
          std::string out = model_to_json(b.model, mode, id) + grid_to_csv(pred) + report_to_csv(rep) +
                            render_grid(pred).pgm;
          for (double x : tr.loss_curve) out += fmt(x);
          for (double x : b.embedding_loss) out += fmt(x);
          return out;
        });
      }
    }
  }
  check("chain", [] {
    const chain::ChainModel m{0.25, 0.9, 1.0, 200};
    std::string out;
    for (double v : chain::td_fixed_point_numeric(m, 1e-12, 1'000'000).values.values) out += fmt(v);
    return out;
  });
  std::string detail = differing.empty() ? "all stages byte-identical across reruns" : "differs:";
  for (const auto& s : differing) detail += " " + s;
  return {differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string budget = "scaled";
  int seeds = 5;
  app.add_option("--budget", budget, "scaled (10000+10000, 100 rollouts) or full (40000+40000, 1000 rollouts)")
      ->check(CLI::IsMember({"scaled", "full"}));
  app.add_option("--seeds", seeds, "Seeds per configuration")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  Lab lab;
  lab.n_seeds = seeds;
  if (budget == "scaled") {
    lab.config.embedding_steps = 10000;
    lab.config.value_steps = 10000;
    lab.config.truth_rollouts = 100;
  }

  struct Criterion {
    int id;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, [&] { return criterion6(lab); }},
      {7, [&] { return criterion7(lab); }},
      {8, criterion8},
      {9, criterion9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d: %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed (budget: %s)\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), budget.c_str());
  return failed == 0 ? 0 : 1;
}
