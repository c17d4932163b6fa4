#include "leakage/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "leakage/rng.h"

namespace leakage {
namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

void require_aligned(const ValueGrid& a, const ValueGrid& b) {
  if (!a.aligned_with(b)) {
    throw std::invalid_argument("grids are not aligned (" + a.map_id + " vs " +
                                b.map_id + ")");
  }
}

}  // namespace

Vec2 ValueGrid::center(std::size_t i) const {
  const auto col = static_cast<int>(i % static_cast<std::size_t>(n_cols));
  const auto row = static_cast<int>(i / static_cast<std::size_t>(n_cols));
  return {(col + 0.5) * cell_size, (row + 0.5) * cell_size};
}

bool ValueGrid::aligned_with(const ValueGrid& other) const {
  return map_id == other.map_id && cell_size == other.cell_size &&
         n_cols == other.n_cols && n_rows == other.n_rows && free == other.free;
}

ValueGrid make_grid(const MapLayout& layout, double cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  ValueGrid g;
  g.map_id = layout.map_id;
  g.cell_size = cell_size;
  g.n_cols = static_cast<int>(std::round(layout.width / cell_size));
  g.n_rows = static_cast<int>(std::round(layout.height / cell_size));
  if (g.n_cols < 2 || g.n_rows < 2) {
    throw std::invalid_argument("grid needs at least 2 cells per axis");
  }
  const std::size_t n = static_cast<std::size_t>(g.n_cols) * static_cast<std::size_t>(g.n_rows);
  g.free.resize(n);
  g.value.assign(n, 0.0);
  g.std_err.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) g.free[i] = layout.is_free(g.center(i)) ? 1 : 0;
  return g;
}

ValueGrid ground_truth(const MapLayout& layout, double gamma, double cell_size,
                       int rollouts_per_cell, std::uint64_t seed, int horizon) {
  if (rollouts_per_cell < 1) throw std::invalid_argument("rollouts_per_cell must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  layout.validate();
  ValueGrid g = make_grid(layout, cell_size);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.free[i]) continue;
    Rng rng = Rng::substream(seed, i);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < rollouts_per_cell; ++k) {
      Vec2 s = g.center(i);
      double ret = 0.0;
      double discount = 1.0;
      for (int t = 0; t < horizon; ++t) {
        const StepResult r =
            step_action(layout, s, static_cast<int>(rng.uniform_int(kNumActions)));
        ret += discount * r.reward;
        if (r.terminal) break;
        s = r.state.position;
        discount *= gamma;
      }
      sum += ret;
      sum_sq += ret * ret;
    }
    const double n = rollouts_per_cell;
    const double mean = sum / n;
    g.value[i] = mean;
    if (rollouts_per_cell > 1) {
      const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
      g.std_err[i] = std::sqrt(var / n);
    }
  }
  return g;
}

ValueGrid predict_grid(const ValueModel& model, const MapLayout& layout,
                       double cell_size) {
  ValueGrid g = make_grid(layout, cell_size);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.free[i]) g.value[i] = model.predict(g.center(i));
  }
  return g;
}

ValueGrid error_grid(const ValueGrid& pred, const ValueGrid& truth) {
  require_aligned(pred, truth);
  ValueGrid e = truth;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e.value[i] = truth.free[i] ? pred.value[i] - truth.value[i] : 0.0;
    e.std_err[i] = 0.0;
  }
  return e;
}

std::vector<double> visitation_weights(const ValueGrid& grid,
                                       const TrajectoryDataset& dataset) {
  std::vector<double> w(grid.size(), 0.0);
  double total = 0.0;
  for (const auto& ep : dataset.episodes) {
    for (const Vec2& s : ep.states) {
      const int col = std::clamp(static_cast<int>(s.x / grid.cell_size), 0, grid.n_cols - 1);
      const int row = std::clamp(static_cast<int>(s.y / grid.cell_size), 0, grid.n_rows - 1);
      const std::size_t i = grid.index(col, row);
      if (!grid.free[i]) continue;
      w[i] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw std::invalid_argument("dataset visits no free cell");
  for (double& x : w) x /= total;
  return w;
}

double msve(const ValueGrid& pred, const ValueGrid& truth,
            const std::vector<double>& weights) {
  require_aligned(pred, truth);
  if (!weights.empty() && weights.size() != truth.size()) {
    throw std::invalid_argument("weight vector does not match the grid");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth.free[i]) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    const double e = pred.value[i] - truth.value[i];
    num += w * e * e;
    den += w;
  }
  if (den == 0.0) throw std::invalid_argument("no free cell carries weight");
  return num / den;
}

double leakage_score(const ValueGrid& errors, const Rect& region) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors.free[i] && region.contains(errors.center(i))) {
      sum += errors.value[i];
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("leakage region contains no free cell");
  return sum / n;
}

Rect leakage_region(const std::string& map_id) {
  if (map_id == "map1") return {0.0, 100.0, 400.0, 200.0};   // middle corridor
  if (map_id == "map2") return {0.0, 150.0, 400.0, 300.0};   // rewardless room
  if (map_id == "map3") return {100.0, 200.0, 300.0, 300.0};  // padding chamber
  throw std::invalid_argument("no leakage region defined for '" + map_id + "'");
}

RenderedGrid render_grid(const ValueGrid& grid) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.free[i]) continue;
    if (!any) {
      lo = hi = grid.value[i];
      any = true;
    }
    lo = std::min(lo, grid.value[i]);
    hi = std::max(hi, grid.value[i]);
  }
  std::ostringstream pgm;
  pgm << "P2\n" << grid.n_cols << ' ' << grid.n_rows << "\n255\n";
  // Image rows run top to bottom, i.e. from high y to low y.
  for (int row = grid.n_rows - 1; row >= 0; --row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      const std::size_t i = grid.index(col, row);
      int level = 0;
      if (grid.free[i]) {
        level = hi > lo ? 1 + static_cast<int>(std::lround(
                                  254.0 * (grid.value[i] - lo) / (hi - lo)))
                        : 128;
      }
      pgm << level << (col + 1 < grid.n_cols ? ' ' : '\n');
    }
  }
  RenderedGrid out;
  out.pgm = pgm.str();
  out.range = "map_id " + grid.map_id + "\nmin " + fmt_double(lo) + "\nmax " +
              fmt_double(hi) + "\nintensity_min 1\nintensity_max 255\nwall_intensity 0\n";
  out.csv = grid_to_csv(grid);
  return out;
}

std::string grid_to_csv(const ValueGrid& grid) {
  std::ostringstream os;
  os << "map_id,cell_size,n_cols,n_rows\n"
     << grid.map_id << ',' << fmt_double(grid.cell_size) << ',' << grid.n_cols << ','
     << grid.n_rows << '\n'
     << "col,row,cx,cy,free,value,stderr\n";
  for (int row = 0; row < grid.n_rows; ++row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      const std::size_t i = grid.index(col, row);
      const Vec2 c = grid.center(i);
      os << col << ',' << row << ',' << fmt_double(c.x) << ',' << fmt_double(c.y) << ','
         << int{grid.free[i]} << ',' << fmt_double(grid.value[i]) << ','
         << fmt_double(grid.std_err[i]) << '\n';
    }
  }
  return os.str();
}

ValueGrid grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line)) throw std::invalid_argument("truncated grid CSV");
    return split(line, ',');
  };
  if (next() != std::vector<std::string>{"map_id", "cell_size", "n_cols", "n_rows"}) {
    throw std::invalid_argument("not a value-grid CSV");
  }
  ValueGrid g;
  const auto head = next();
  if (head.size() != 4) throw std::invalid_argument("bad grid CSV header");
  g.map_id = head[0];
  g.cell_size = std::stod(head[1]);
  g.n_cols = std::stoi(head[2]);
  g.n_rows = std::stoi(head[3]);
  if (g.n_cols < 1 || g.n_rows < 1) throw std::invalid_argument("bad grid dimensions");
  next();  // column names
  const std::size_t n = static_cast<std::size_t>(g.n_cols) * static_cast<std::size_t>(g.n_rows);
  g.free.assign(n, 0);
  g.value.assign(n, 0.0);
  g.std_err.assign(n, 0.0);
  std::vector<bool> seen(n, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw std::invalid_argument("bad grid CSV row: " + line);
    const int col = std::stoi(f[0]);
    const int row = std::stoi(f[1]);
    if (col < 0 || col >= g.n_cols || row < 0 || row >= g.n_rows) {
      throw std::invalid_argument("grid CSV cell out of range");
    }
    const std::size_t i = g.index(col, row);
    g.free[i] = static_cast<std::uint8_t>(std::stoi(f[4]) != 0);
    g.value[i] = std::stod(f[5]);
    g.std_err[i] = std::stod(f[6]);
    seen[i] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("grid CSV is missing cells");
  }
  return g;
}

EvalReport evaluate_grid(const ValueGrid& pred, const ValueGrid& truth,
                         const TrajectoryDataset& dataset) {
  require_aligned(pred, truth);
  if (dataset.map_id != truth.map_id) {
    throw std::invalid_argument("dataset map " + dataset.map_id +
                                " does not match truth map " + truth.map_id);
  }
  EvalReport r;
  r.errors = error_grid(pred, truth);
  r.msve_uniform = msve(pred, truth);
  r.msve_mu = msve(pred, truth, visitation_weights(truth, dataset));
  r.leakage_score = leakage_score(r.errors, leakage_region(truth.map_id));
  r.metadata["map_id"] = truth.map_id;
  return r;
}

EvalReport evaluate(const ValueModel& model, const MapLayout& layout,
                    const ValueGrid& truth, const TrajectoryDataset& dataset) {
  return evaluate_grid(predict_grid(model, layout, truth.cell_size), truth, dataset);
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream os;
  for (const auto& [k, v] : report.metadata) os << "# " << k << '=' << v << '\n';
  os << "metric,value\n"
     << "msve_uniform," << fmt_double(report.msve_uniform) << '\n'
     << "msve_mu," << fmt_double(report.msve_mu) << '\n'
     << "leakage_score," << fmt_double(report.leakage_score) << '\n';
  return os.str();
}

}  // namespace leakage
