#include <filesystem>

#include <gtest/gtest.h>

#include "leakage/dataset_io.h"
#include "leakage/envsim.h"

namespace leakage {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "leakage_test_dataset_io";
  fs::create_directories(dir);
  return dir / name;
}

TEST(DatasetJson, RoundTripIsByteIdentical) {
  const TrajectoryDataset ds = generate_dataset(builtin_map("map1"), 12, 400, 77);
  const std::string text = dataset_to_json(ds);
  const TrajectoryDataset back = dataset_from_json(text);
  EXPECT_EQ(dataset_to_json(back), text);
  ASSERT_EQ(back.episodes.size(), ds.episodes.size());
  for (std::size_t i = 0; i < ds.episodes.size(); ++i) {
    const Episode &a = ds.episodes[i], &b = back.episodes[i];
    ASSERT_EQ(a.states.size(), b.states.size());
    for (std::size_t t = 0; t < a.states.size(); ++t) {
      ASSERT_EQ(a.states[t].x, b.states[t].x);
      ASSERT_EQ(a.states[t].y, b.states[t].y);
    }
    EXPECT_EQ(a.actions, b.actions);
    EXPECT_EQ(a.rewards, b.rewards);
    EXPECT_EQ(a.terminated, b.terminated);
  }
  EXPECT_EQ(back.map_id, "map1");
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.max_len, 400);
}

TEST(DatasetJson, FileRoundTrip) {
  const TrajectoryDataset ds = generate_dataset(builtin_map("map2"), 5, 100, 1);
  const fs::path p = scratch("sub/dir/ds.json");
  save_dataset(ds, p);
  EXPECT_EQ(dataset_to_json(load_dataset(p)), dataset_to_json(ds));
}

TEST(DatasetJson, RejectsMalformedInput) {
  EXPECT_THROW(dataset_from_json("not json"), std::invalid_argument);
  EXPECT_THROW(dataset_from_json(R"({"format":"other"})"), std::invalid_argument);
  // Action array one short of the state array.
  EXPECT_THROW(dataset_from_json(
                   R"({"format":"leakage-dataset","map_id":"map1","gamma":0.99,"seed":0,)"
                   R"("max_len":5,"n_episodes":1,"episodes":[{"x":[1,2],"y":[1,2],)"
                   R"("action":[],"reward":[0],"terminated":false}]})"),
               std::invalid_argument);
}

TEST(LayoutJson, BuiltinsRoundTrip) {
  for (const char* id : {"map1", "map2", "map3"}) {
    const MapLayout m = builtin_map(id);
    const MapLayout back = layout_from_json(layout_to_json(m));
    EXPECT_EQ(layout_to_json(back), layout_to_json(m));
    EXPECT_EQ(back.walls.size(), m.walls.size());
    EXPECT_EQ(back.reward_zones.size(), m.reward_zones.size());
  }
}

TEST(LayoutJson, ResolveFromFile) {
  MapLayout m = builtin_map("map2");
  m.map_id = "custom";
  const fs::path p = scratch("custom.json");
  write_file(p, layout_to_json(m));
  EXPECT_EQ(resolve_layout(p.string()).map_id, "custom");
  EXPECT_EQ(resolve_layout("map3").map_id, "map3");
  EXPECT_THROW(resolve_layout("nope"), ConfigError);
}

TEST(ContentHash, KnownFnv1aValues) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
}

TEST(Files, MissingFileThrows) {
  EXPECT_THROW(read_file(scratch("does_not_exist.json")), std::runtime_error);
}

}  // namespace
}  // namespace leakage
