#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "leakage/eval.h"
#include "leakage/rng.h"

namespace leakage {
namespace {

ValueGrid random_values(const ValueGrid& like, std::uint64_t seed, double lo, double hi) {
  ValueGrid g = like;
  Rng rng(seed);
  for (std::size_t i = 0; i < g.size(); ++i) g.value[i] = g.free[i] ? rng.uniform(lo, hi) : 0.0;
  return g;
}

TEST(Grid, LayoutAndCentres) {
  const ValueGrid g = make_grid(builtin_map("map2"));
  EXPECT_EQ(g.n_cols, 40);
  EXPECT_EQ(g.n_rows, 30);
  EXPECT_EQ(g.center(g.index(0, 0)), (Vec2{5, 5}));
  EXPECT_EQ(g.center(g.index(39, 29)), (Vec2{395, 295}));
  // The reward disc at (200, 50) swallows the four surrounding centres.
  EXPECT_FALSE(g.free[g.index(19, 4)]);
  EXPECT_FALSE(g.free[g.index(20, 5)]);
  EXPECT_TRUE(g.free[g.index(18, 4)]);
  EXPECT_THROW(make_grid(builtin_map("map2"), 300), std::invalid_argument);
}

TEST(GroundTruth, SealedRoomIsExactlyZeroAndDeterministic) {
  const MapLayout m = builtin_map("map2");
  const ValueGrid a = ground_truth(m, 0.99, 20, 5, 42);
  const ValueGrid b = ground_truth(m, 0.99, 20, 5, 42);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_err, b.std_err);
  int upper = 0;
  double lower_total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.free[i]) continue;
    if (a.center(i).y > 150) {
      ASSERT_EQ(a.value[i], 0.0);
      ++upper;
    } else {
      lower_total += a.value[i];
    }
  }
  EXPECT_GT(upper, 0);
  EXPECT_GT(lower_total, 0.0);
  const ValueGrid c = ground_truth(m, 0.99, 20, 5, 43);
  EXPECT_NE(a.value, c.value);
}

TEST(GroundTruth, StandardErrorShrinksWithRollouts) {
  const MapLayout m = builtin_map("map2");
  const ValueGrid a = ground_truth(m, 0.99, 25, 25, 1);
  const ValueGrid b = ground_truth(m, 0.99, 25, 100, 1);
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.free[i] && a.center(i).y < 150) {
      sa += a.std_err[i];
      sb += b.std_err[i];
    }
  }
  EXPECT_NEAR(sb / sa, 0.5, 0.1);
}

TEST(GroundTruth, ShortHorizonIsDiscountedRewardBound) {
  // One step of 20 units cannot reach the reward from further than 30 units.
  const ValueGrid g = ground_truth(builtin_map("map2"), 0.99, 10, 3, 5, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.free[i]) continue;
    if (distance(g.center(i), {200, 50}) > 30.0) {
      ASSERT_EQ(g.value[i], 0.0);
    }
    ASSERT_LE(g.value[i], 30.0);
  }
}

TEST(Msve, ExactCases) {
  const ValueGrid truth = random_values(make_grid(builtin_map("map1")), 1, -5, 30);
  EXPECT_EQ(msve(truth, truth), 0.0);
  ValueGrid shifted = truth;
  for (double& v : shifted.value) v += 2.5;
  EXPECT_NEAR(msve(shifted, truth), 6.25, 1e-12);
  ValueGrid other = truth;
  other.map_id = "map2";
  EXPECT_THROW(msve(other, truth), std::invalid_argument);
}

TEST(Msve, JensenLowerBound) {
  const ValueGrid base = make_grid(builtin_map("map3"));
  for (std::uint64_t s = 0; s < 30; ++s) {
    const ValueGrid a = random_values(base, s, -10, 10), b = random_values(base, s + 100, -3, 7);
    const ValueGrid e = error_grid(a, b);
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e.free[i]) sum += e.value[i], ++n;
    EXPECT_GE(msve(a, b) + 1e-12, (sum / n) * (sum / n));
  }
}

TEST(Msve, IndependentOfCellOrder) {
  const ValueGrid base = make_grid(builtin_map("map1"));
  const ValueGrid a = random_values(base, 3, 0, 10), b = random_values(base, 4, 0, 10);
  std::vector<std::size_t> perm(base.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(8);
  for (std::size_t i = perm.size(); i-- > 1;) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  ValueGrid pa = a, pb = b;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pa.value[i] = a.value[perm[i]];
    pa.free[i] = a.free[perm[i]];
    pb.value[i] = b.value[perm[i]];
    pb.free[i] = b.free[perm[i]];
  }
  EXPECT_NEAR(msve(pa, pb), msve(a, b), 1e-12 * msve(a, b));
}

TEST(Msve, VisitationWeightingDiffersOnPaddedMap) {
  const MapLayout m = builtin_map("map3");
  const TrajectoryDataset ds = generate_dataset(m, 20, 500, 2);
  const ValueGrid truth = make_grid(m);
  const auto w = visitation_weights(truth, ds);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  ValueGrid pred = truth;
  const Rect pad = leakage_region("map3");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred.free[i]) continue;
    if (pad.contains(truth.center(i))) {
      ASSERT_EQ(w[i], 0.0);  // nobody starts in, or walks into, the sealed chamber
      pred.value[i] = 4.0;
    }
  }
  EXPECT_GT(msve(pred, truth), 0.0);
  EXPECT_EQ(msve(pred, truth, w), 0.0);
}

TEST(Leakage, SignedMeanOverRegion) {
  const ValueGrid g = make_grid(builtin_map("map2"));
  EXPECT_EQ(leakage_score(g, leakage_region("map2")), 0.0);
  ValueGrid e = g;
  for (std::size_t i = 0; i < e.size(); ++i) e.value[i] = e.center(i).x < 200 ? 1.0 : -0.5;
  EXPECT_NEAR(leakage_score(e, leakage_region("map2")), 0.25, 1e-12);
  EXPECT_THROW(leakage_score(e, Rect{401, 0, 500, 10}), std::invalid_argument);
  EXPECT_THROW(leakage_region("map9"), std::invalid_argument);
}

TEST(Render, ConstantGridAndSentinels) {
  ValueGrid g = make_grid(builtin_map("map1"));
  std::fill(g.value.begin(), g.value.end(), 3.0);
  const RenderedGrid r = render_grid(g);
  std::istringstream in(r.pgm);
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(w, 40);
  EXPECT_EQ(h, 30);
  EXPECT_EQ(maxv, 255);
  std::vector<int> px(static_cast<std::size_t>(w * h));
  for (int& p : px) ASSERT_TRUE(in >> p);
  int dummy;
  EXPECT_FALSE(in >> dummy);
  // Image row 0 is the top of the map.
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const bool free = g.free[g.index(col, h - 1 - row)];
      EXPECT_EQ(px[static_cast<std::size_t>(row * w + col)], free ? 128 : 0);
    }
  }
  EXPECT_NE(r.range.find("wall_intensity 0"), std::string::npos);
}

TEST(Render, LinearScale) {
  ValueGrid g = make_grid(builtin_map("map2"), 50);
  for (std::size_t i = 0; i < g.size(); ++i) g.value[i] = g.center(i).x;
  const RenderedGrid r = render_grid(g);
  std::istringstream in(r.pgm);
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  std::vector<int> row(static_cast<std::size_t>(w));
  for (int& p : row) in >> p;
  EXPECT_EQ(row.front(), 1);
  EXPECT_EQ(row.back(), 255);
  EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
}

TEST(GridCsv, RoundTrip) {
  ValueGrid g = ground_truth(builtin_map("map2"), 0.99, 25, 3, 9);
  g.value[3] = 1.0 / 3.0;
  const std::string csv = grid_to_csv(g);
  const ValueGrid back = grid_from_csv(csv);
  EXPECT_EQ(back.map_id, g.map_id);
  EXPECT_EQ(back.n_cols, g.n_cols);
  EXPECT_EQ(back.free, g.free);
  EXPECT_EQ(back.value, g.value);
  EXPECT_EQ(back.std_err, g.std_err);
  EXPECT_EQ(grid_to_csv(back), csv);
  EXPECT_THROW(grid_from_csv("nonsense"), std::invalid_argument);
  EXPECT_THROW(grid_from_csv(csv.substr(0, csv.size() / 2)), std::invalid_argument);
}

TEST(Evaluate, ReportFields) {
  const MapLayout m = builtin_map("map2");
  const TrajectoryDataset ds = generate_dataset(m, 10, 300, 1);
  const ValueGrid truth = random_values(make_grid(m), 2, 0, 20);
  ValueGrid pred = truth;
  for (double& v : pred.value) v += 1.0;
  const EvalReport r = evaluate_grid(pred, truth, ds);
  EXPECT_NEAR(r.msve_uniform, 1.0, 1e-12);
  EXPECT_NEAR(r.msve_mu, 1.0, 1e-12);
  EXPECT_NEAR(r.leakage_score, 1.0, 1e-12);
  EXPECT_NE(report_to_csv(r).find("msve_uniform"), std::string::npos);
}

}  // namespace
}  // namespace leakage
