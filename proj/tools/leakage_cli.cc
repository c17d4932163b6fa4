// leakage: command-line driver for datasets, training, evaluation, chain
// analysis and sweeps. Every command is deterministic in its flags and seed.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leakage/chain.h"
#include "leakage/dataset_io.h"
#include "leakage/eval.h"
#include "leakage/experiment.h"
#include "leakage/model_io.h"

namespace fs = std::filesystem;
using namespace leakage;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string loss_csv(const std::vector<double>& curve) {
  std::string out = "step,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += std::to_string(i) + "," + fmt(curve[i]) + "\n";
  }
  return out;
}

// Flags shared by train and sweep.
struct TrainFlags {
  int value_steps = 40000;
  int embedding_steps = 40000;
  int minibatch = 32;
  double lr = 0.001;
  double alpha = 1.0;
  int bins = 5;
  double negative_fraction = 0.2;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--steps", f.value_steps, "Value training steps (reference: 40000)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--embedding-steps", f.embedding_steps,
                  "Embedding training steps (reference: 40000)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--minibatch", f.minibatch, "Minibatch size (reference: 32)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Adam learning rate (reference: 0.001; beta1 0.9, beta2 0.999, eps 1e-8)")
      ->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Oracle separation in [0, 1]")->capture_default_str();
  cmd->add_option("--bins", f.bins, "Time-proximity bins K")->capture_default_str();
  cmd->add_option("--negative-fraction", f.negative_fraction,
                  "Share of cross-episode time-proximity pairs")
      ->capture_default_str();
}

ExperimentConfig make_config(const TrainFlags& f, double gamma) {
  ExperimentConfig c;
  c.gamma = gamma;
  c.value_steps = f.value_steps;
  c.embedding_steps = f.embedding_steps;
  c.minibatch_size = f.minibatch;
  c.adam.lr = f.lr;
  c.oracle_alpha = f.alpha;
  c.timeprox_bins = f.bins;
  c.negative_fraction = f.negative_fraction;
  return c;
}

bool looks_like_grid(const std::string& text) { return text.rfind("map_id,", 0) == 0; }

// ---------------------------------------------------------------------------

struct GenData {
  std::string map = "map1";
  int episodes = kDefaultEpisodes;
  int max_len = kDefaultMaxLen;
  std::uint64_t seed = 0;
  double gamma = kDefaultGamma;
  std::string out;
};

int run_gen_data(const GenData& a) {
  const MapLayout layout = resolve_layout(a.map);
  const TrajectoryDataset ds = generate_dataset(layout, a.episodes, a.max_len, a.seed, a.gamma);
  const std::string text = dataset_to_json(ds);
  write_file(a.out, text);
  int terminated = 0;
  for (const Episode& e : ds.episodes) terminated += e.terminated ? 1 : 0;
  std::cout << "map_id=" << ds.map_id << " episodes=" << ds.episodes.size()
            << " transitions=" << ds.num_transitions()
            << " terminal_fraction=" << fmt(static_cast<double>(terminated) / ds.episodes.size())
            << " hash=" << content_hash(text) << "\n";
  return 0;
}

struct GroundTruth {
  std::string map = "map1";
  int rollouts = 1000;
  std::uint64_t seed = kDefaultTruthSeed;
  double cell_size = kDefaultCellSize;
  double gamma = kDefaultGamma;
  int horizon = kDefaultMaxLen;
  std::string out;
};

int run_ground_truth(const GroundTruth& a) {
  const MapLayout layout = resolve_layout(a.map);
  const ValueGrid grid = ground_truth(layout, a.gamma, a.cell_size, a.rollouts, a.seed, a.horizon);
  write_file(a.out, grid_to_csv(grid));
  std::cout << "map_id=" << grid.map_id << " cells=" << grid.n_cols << "x" << grid.n_rows
            << " rollouts=" << a.rollouts << "\n";
  return 0;
}

struct Train {
  std::string method = "td";
  std::string embedding = "none";
  std::string data;
  std::string map;
  std::uint64_t seed = 0;
  std::string out;
  TrainFlags flags;
};

int run_train(const Train& a) {
  const Method method = parse_method(a.method);
  const EmbeddingMode mode = parse_embedding_mode(a.embedding);
  const std::string data_text = read_file(a.data);
  const TrajectoryDataset ds = dataset_from_json(data_text);
  const MapLayout layout = resolve_layout(a.map.empty() ? ds.map_id : a.map);
  if (layout.map_id != ds.map_id) {
    throw ConfigError("dataset map '" + ds.map_id + "' does not match map '" + layout.map_id + "'");
  }
  ExperimentConfig config = make_config(a.flags, ds.gamma);
  config.n_episodes = static_cast<int>(ds.episodes.size());
  config.max_len = ds.max_len;

  BuiltModel built = build_value_model(mode, ds, layout, config, a.seed);
  TrainConfig tc = value_train_config(method, config, a.seed);
  tc.embedding = mode;
  const TrainResult tr = train_value(ds, built.model, tc);

  const fs::path dir(a.out);
  nlohmann::json snap = nlohmann::json::parse(config_to_json(config));
  snap["command"] = "train";
  snap["method"] = to_string(method);
  snap["embedding"] = to_string(mode);
  snap["seed"] = a.seed;
  snap["map_id"] = layout.map_id;
  snap["dataset"] = a.data;
  snap["dataset_hash"] = content_hash(data_text);
  write_file(dir / "config.json", snap.dump(1) + "\n");
  save_model(built.model, mode, layout.map_id, dir / "model.json");
  write_file(dir / "loss.csv", loss_csv(tr.loss_curve));
  if (!built.embedding_loss.empty()) {
    write_file(dir / "embedding_loss.csv", loss_csv(built.embedding_loss));
  }
  std::cout << "model=" << (dir / "model.json").string()
            << " final_loss=" << fmt(tr.loss_curve.empty() ? 0.0 : tr.loss_curve.back()) << "\n";
  return 0;
}

struct Eval {
  std::string model;
  std::string truth;
  std::string data;
  std::string out;
};

int run_eval(const Eval& a) {
  const ValueGrid truth = grid_from_csv(read_file(a.truth));
  const TrajectoryDataset ds = load_dataset(a.data);
  if (ds.map_id != truth.map_id) {
    throw ConfigError("dataset map '" + ds.map_id + "' does not match ground truth map '" +
                      truth.map_id + "'");
  }
  const std::string model_text = read_file(a.model);
  ValueGrid pred;
  if (looks_like_grid(model_text)) {
    pred = grid_from_csv(model_text);
  } else {
    const SavedModel saved = model_from_json(model_text);
    if (saved.map_id != truth.map_id) {
      throw ConfigError("model map '" + saved.map_id + "' does not match ground truth map '" +
                        truth.map_id + "'");
    }
    pred = predict_grid(saved.model, resolve_layout(saved.map_id), truth.cell_size);
  }
  EvalReport report = evaluate_grid(pred, truth, ds);
  report.metadata["model"] = a.model;
  report.metadata["truth"] = a.truth;
  report.metadata["dataset"] = a.data;
  const fs::path dir(a.out);
  write_file(dir / "report.csv", report_to_csv(report));
  write_file(dir / "prediction.csv", grid_to_csv(pred));
  write_file(dir / "errors.csv", grid_to_csv(report.errors));
  std::cout << "msve_uniform=" << fmt(report.msve_uniform) << " msve_mu=" << fmt(report.msve_mu)
            << " leakage_score=" << fmt(report.leakage_score) << "\n";
  return 0;
}

struct Render {
  std::string grid;
  std::string out;
};

int run_render(const Render& a) {
  const RenderedGrid r = render_grid(grid_from_csv(read_file(a.grid)));
  fs::path pgm(a.out);
  if (pgm.extension() != ".pgm") pgm += ".pgm";
  fs::path range = pgm, csv = pgm;
  range.replace_extension(".range.txt");
  csv.replace_extension(".cells.csv");
  write_file(pgm, r.pgm);
  write_file(range, r.range);
  write_file(csv, r.csv);
  std::cout << "image=" << pgm.string() << "\n";
  return 0;
}

struct ChainArgs {
  double p = 0.25;
  double gamma = 0.99;
  double alpha = 1.0;
  int n = 200;
  double tol = 1e-12;
  std::string out;
};

int run_chain(const ChainArgs& a) {
  chain::ChainModel model{a.p, a.gamma, a.alpha, a.n};
  model.validate();
  const chain::CharRoots roots = chain::characteristic_roots(model);
  const chain::StationaryDistribution st = chain::stationary_distribution(model);
  const chain::ChainFunction analytic = chain::analytic_td_solution(model);
  const chain::NumericFixedPoint numeric =
      chain::td_fixed_point_numeric(model, a.tol, 10'000'000);
  const chain::ChainFunction zero{std::vector<double>(a.n, 0.0)};
  const chain::ProjectionSpec proj{0, a.alpha};
  const chain::TsitsiklisReport td = chain::tsitsiklis_check(model, analytic, zero, proj);
  chain::ChainFunction no_leak = zero;
  no_leak[0] = a.alpha;
  const chain::TsitsiklisReport cx = chain::tsitsiklis_check(model, no_leak, zero, proj);

  double max_diff = 0.0;
  std::string csv = "s,mu,v_analytic,v_numeric\n";
  for (int s = 0; s < a.n; ++s) {
    csv += std::to_string(s) + "," + fmt(st.mu[s]) + "," + fmt(analytic[s]) + "," +
           fmt(numeric.values[s]) + "\n";
    if (st.mu[s] > 1e-12) max_diff = std::max(max_diff, std::abs(analytic[s] - numeric.values[s]));
  }
  const auto grad = chain::mixed_loss_gradient(model, analytic);
  double grad_max = 0.0;
  for (double g : grad.values) grad_max = std::max(grad_max, std::abs(g));

  std::ostringstream rep;
  rep << "p=" << fmt(a.p) << "\ngamma=" << fmt(a.gamma) << "\nalpha=" << fmt(a.alpha)
      << "\nn_states=" << a.n << "\n"
      << "r1=" << fmt(roots.r1) << "\nr2=" << fmt(roots.r2) << "\n"
      << "tail_mass=" << fmt(st.tail_mass) << "\n"
      << "numeric_sweeps=" << numeric.sweeps << "\n"
      << "max_abs_analytic_minus_numeric=" << fmt(max_diff) << "\n"
      << "dirichlet_norm_sq=" << fmt(chain::dirichlet_norm_sq(model, analytic)) << "\n"
      << "mu_norm_sq=" << fmt(chain::mu_norm_sq(model, analytic)) << "\n"
      << "mixed_loss=" << fmt(chain::mixed_loss(model, analytic)) << "\n"
      << "mixed_loss_grad_max=" << fmt(grad_max) << "\n"
      << "error_norm=" << fmt(td.error_norm) << "\n"
      << "best_in_class_norm=" << fmt(td.best_in_class_norm) << "\n"
      << "sharp_bound=" << fmt(td.sharp_rhs) << "\nsharp_bound_holds="
      << (td.sharp_holds ? "true" : "false") << "\n"
      << "loose_bound=" << fmt(td.loose_rhs) << "\nloose_bound_holds="
      << (td.loose_holds ? "true" : "false") << "\n"
      << "counterexample_ratio=" << fmt(cx.ratio) << "\n";
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "chain.csv", csv);
    write_file(fs::path(a.out) / "report.txt", rep.str());
  }
  std::cout << rep.str();
  return 0;
}

struct Sweep {
  std::vector<std::string> maps{"map1", "map2", "map3"};
  std::vector<std::string> methods{"mc", "td"};
  std::vector<std::string> embeddings{"none", "oracle", "timeprox", "sf"};
  std::vector<int> max_lens{kDefaultMaxLen};
  int seeds = 20;
  int episodes = kDefaultEpisodes;
  int rollouts = 1000;
  std::string out;
  TrainFlags flags;
};

int run_sweep(const Sweep& a) {
  const fs::path root(a.out);
  std::string summary = "map_id,method,embedding,max_len,n_seeds,median_msve,iqr_msve,"
                        "median_msve_mu,median_leakage\n";
  for (const std::string& map_id : a.maps) {
    const MapLayout layout = resolve_layout(map_id);
    ExperimentConfig config = make_config(a.flags, kDefaultGamma);
    config.n_episodes = a.episodes;
    config.truth_rollouts = a.rollouts;
    const ValueGrid truth = ground_truth(layout, config.gamma, config.cell_size,
                                         config.truth_rollouts, kDefaultTruthSeed,
                                         config.truth_horizon);
    write_file(root / layout.map_id / "truth.csv", grid_to_csv(truth));
    for (int max_len : a.max_lens) {
      config.max_len = max_len;
      for (const std::string& method_name : a.methods) {
        const Method method = parse_method(method_name);
        for (const std::string& emb_name : a.embeddings) {
          const EmbeddingMode mode = parse_embedding_mode(emb_name);
          if (mode == EmbeddingMode::kOracle && layout.map_id != "map1") continue;
          std::vector<double> ms, mu, lk;
          for (int seed = 1; seed <= a.seeds; ++seed) {
            const TrajectoryDataset ds =
                generate_dataset(layout, config.n_episodes, max_len, seed, config.gamma);
            const ExperimentResult r =
                leakage_experiment(layout, ds, method, mode, seed, config, truth);
            const fs::path run = root / layout.map_id /
                                 (to_string(method) + "_" + to_string(mode) + "_len" +
                                  std::to_string(max_len) + "_seed" + std::to_string(seed));
            nlohmann::json snap = nlohmann::json::parse(config_to_json(config));
            snap["command"] = "sweep";
            snap["map_id"] = layout.map_id;
            snap["method"] = to_string(method);
            snap["embedding"] = to_string(mode);
            snap["seed"] = seed;
            snap["dataset_hash"] = content_hash(dataset_to_json(ds));
            write_file(run / "config.json", snap.dump(1) + "\n");
            write_file(run / "report.csv", report_to_csv(r.report));
            write_file(run / "prediction.csv", grid_to_csv(r.prediction));
            ms.push_back(r.report.msve_uniform);
            mu.push_back(r.report.msve_mu);
            lk.push_back(r.report.leakage_score);
          }
          summary += layout.map_id + "," + to_string(method) + "," + to_string(mode) + "," +
                     std::to_string(max_len) + "," + std::to_string(a.seeds) + "," +
                     fmt(median(ms)) + "," + fmt(iqr(ms)) + "," + fmt(median(mu)) + "," +
                     fmt(median(lk)) + "\n";
          std::cout << layout.map_id << " " << to_string(method) << " " << to_string(mode)
                    << " len=" << max_len << " median_msve=" << fmt(median(ms)) << std::endl;
        }
      }
    }
  }
  write_file(root / "summary.csv", summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage propagation lab: MC vs TD value estimation on 2D labyrinths"};
  app.require_subcommand(1);
  app.footer(
      "Defaults follow the reference setup: 400x300 maps, gamma 0.99, reward +30 in "
      "zones of radius 10, 360 actions, step 20, trajectories of at most 2000 steps, 100 "
      "trajectories, embedding layers [20,20,20,2], value layers [30,30,1], tanh, minibatch "
      "32, Adam (lr 0.001, beta1 0.9, beta2 0.999, eps 1e-8), 40000 embedding and 40000 "
      "value steps, 20 seeds.");

  GenData gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a random-policy trajectory dataset");
  gen_cmd->add_option("--map", gen.map, "map1, map2, map3 or a layout JSON file")->capture_default_str();
  gen_cmd->add_option("--episodes", gen.episodes, "Number of trajectories (reference: 100)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-len", gen.max_len, "Trajectory max length (reference: 2000)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--gamma", gen.gamma, "Discount recorded with the data (reference: 0.99)")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset file")->required();

  GroundTruth gt;
  auto* gt_cmd = app.add_subcommand("ground-truth", "Monte-Carlo ground-truth value grid");
  gt_cmd->add_option("--map", gt.map, "map1, map2, map3 or a layout JSON file")->capture_default_str();
  gt_cmd->add_option("--rollouts", gt.rollouts, "Rollouts per cell (reference: 1000)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gt_cmd->add_option("--seed", gt.seed, "Seed")->capture_default_str();
  gt_cmd->add_option("--cell-size", gt.cell_size, "Grid spacing")->capture_default_str();
  gt_cmd->add_option("--gamma", gt.gamma, "Discount (reference: 0.99)")->capture_default_str();
  gt_cmd->add_option("--horizon", gt.horizon, "Rollout truncation")->capture_default_str();
  gt_cmd->add_option("--out", gt.out, "Output grid CSV")->required();

  Train tr;
  auto* tr_cmd = app.add_subcommand("train", "Train an embedding (if any) and a value network");
  tr_cmd->add_option("--method", tr.method, "mc or td")->capture_default_str();
  tr_cmd->add_option("--embedding", tr.embedding, "none, oracle, timeprox or sf")->capture_default_str();
  tr_cmd->add_option("--data", tr.data, "Dataset file")->required();
  tr_cmd->add_option("--map", tr.map, "Layout override (defaults to the dataset's map)");
  tr_cmd->add_option("--seed", tr.seed, "Seed")->capture_default_str();
  tr_cmd->add_option("--out", tr.out, "Run directory")->required();
  add_train_flags(tr_cmd, tr.flags);

  Eval ev;
  auto* ev_cmd = app.add_subcommand("eval", "Score a model or value grid against ground truth");
  ev_cmd->add_option("--model", ev.model, "Model file or prediction grid CSV")->required();
  ev_cmd->add_option("--truth", ev.truth, "Ground-truth grid CSV")->required();
  ev_cmd->add_option("--data", ev.data, "Dataset (visitation weights)")->required();
  ev_cmd->add_option("--out", ev.out, "Output directory")->required();

  Render rd;
  auto* rd_cmd = app.add_subcommand("render", "Render a value grid as a PGM heatmap");
  rd_cmd->add_option("--grid", rd.grid, "Grid CSV")->required();
  rd_cmd->add_option("--out", rd.out, "Output image path (.pgm)")->required();

  ChainArgs ch;
  auto* ch_cmd = app.add_subcommand("chain-analyze", "Closed-form vs numeric TD on the random-walk chain");
  ch_cmd->add_option("--p", ch.p, "Forward probability, 0 < p < 0.5")->capture_default_str();
  ch_cmd->add_option("--gamma", ch.gamma, "Discount in [0, 1)")->capture_default_str();
  ch_cmd->add_option("--alpha", ch.alpha, "Value pinned at state 0")->capture_default_str();
  ch_cmd->add_option("--n", ch.n, "Truncated chain length")->capture_default_str();
  ch_cmd->add_option("--tol", ch.tol, "Numeric fixed-point tolerance")->capture_default_str();
  ch_cmd->add_option("--out", ch.out, "Output directory for chain.csv and report.txt");

  Sweep sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Method x embedding x max-len x seed grid with median/IQR MSVE");
  sw_cmd->add_option("--maps", sw.maps, "Maps")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--methods", sw.methods, "Methods")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--embeddings", sw.embeddings, "Embeddings (oracle runs on map1 only)")
      ->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--max-lens", sw.max_lens, "Trajectory lengths")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--seeds", sw.seeds, "Seeds 1..N (reference: 20)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sw_cmd->add_option("--episodes", sw.episodes, "Trajectories per dataset (reference: 100)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sw_cmd->add_option("--rollouts", sw.rollouts, "Ground-truth rollouts per cell (reference: 1000)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sw_cmd->add_option("--out", sw.out, "Output directory")->required();
  add_train_flags(sw_cmd, sw.flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*gt_cmd) return run_ground_truth(gt);
    if (*tr_cmd) return run_train(tr);
    if (*ev_cmd) return run_eval(ev);
    if (*rd_cmd) return run_render(rd);
    if (*ch_cmd) return run_chain(ch);
    if (*sw_cmd) return run_sweep(sw);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 1;
}
