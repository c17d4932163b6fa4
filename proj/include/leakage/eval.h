#ifndef LEAKAGE_EVAL_H_
#define LEAKAGE_EVAL_H_

// Ground-truth value grids, mean squared value error, leakage scores and
// grid rendering.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "leakage/envsim.h"
#include "leakage/value_model.h"

namespace leakage {

inline constexpr double kDefaultCellSize = 10.0;

// Uniform grid of cell-centred values over [0, W] x [0, H]. Cells whose
// centre is on a wall or inside a reward zone are not free and carry no
// value.
struct ValueGrid {
  std::string map_id;
  double cell_size = kDefaultCellSize;
  int n_cols = 0;
  int n_rows = 0;
  std::vector<std::uint8_t> free;
  std::vector<double> value;
  std::vector<double> std_err;

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
           static_cast<std::size_t>(col);
  }
  std::size_t size() const { return value.size(); }
  Vec2 center(std::size_t i) const;
  bool aligned_with(const ValueGrid& other) const;
};

// Free/non-free layout of the grid, values zero.
ValueGrid make_grid(const MapLayout& layout, double cell_size = kDefaultCellSize);

// Mean discounted return of `rollouts_per_cell` random-policy rollouts from
// each free cell centre, each truncated after `horizon` steps. Cell i uses the
// substream (seed, i), so the result does not depend on evaluation order.
ValueGrid ground_truth(const MapLayout& layout, double gamma, double cell_size,
                       int rollouts_per_cell, std::uint64_t seed,
                       int horizon = kDefaultMaxLen);

ValueGrid predict_grid(const ValueModel& model, const MapLayout& layout,
                       double cell_size = kDefaultCellSize);

// pred - truth on free cells.
ValueGrid error_grid(const ValueGrid& pred, const ValueGrid& truth);

// Normalized dataset state occupancy per free cell.
std::vector<double> visitation_weights(const ValueGrid& grid,
                                       const TrajectoryDataset& dataset);

// Weighted mean of squared per-cell errors over free cells. Empty weights
// mean uniform weighting.
double msve(const ValueGrid& pred, const ValueGrid& truth,
            const std::vector<double>& weights = {});

// Mean signed error over the free cells whose centre lies in region.
double leakage_score(const ValueGrid& errors, const Rect& region);

// Region of each builtin map whose true value is near zero and that sits
// across a wall from high values.
Rect leakage_region(const std::string& map_id);

struct RenderedGrid {
  std::string pgm;       // plain PGM (P2)
  std::string range;     // sidecar: value range of the intensity scale
  std::string csv;
};

// Free cells map linearly onto intensities 1..255; other cells are 0.
RenderedGrid render_grid(const ValueGrid& grid);

std::string grid_to_csv(const ValueGrid& grid);
ValueGrid grid_from_csv(const std::string& text);

struct EvalReport {
  double msve_uniform = 0.0;
  double msve_mu = 0.0;
  double leakage_score = 0.0;
  ValueGrid errors;
  std::map<std::string, std::string> metadata;
};

EvalReport evaluate(const ValueModel& model, const MapLayout& layout,
                    const ValueGrid& truth, const TrajectoryDataset& dataset);
EvalReport evaluate_grid(const ValueGrid& pred, const ValueGrid& truth,
                         const TrajectoryDataset& dataset);

std::string report_to_csv(const EvalReport& report);

}  // namespace leakage

#endif  // LEAKAGE_EVAL_H_
