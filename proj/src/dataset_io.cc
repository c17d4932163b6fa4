#include "leakage/dataset_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace leakage {

using nlohmann::json;

std::string dataset_to_json(const TrajectoryDataset& ds) {
  json j;
  j["format"] = "leakage-dataset";
  j["map_id"] = ds.map_id;
  j["gamma"] = ds.gamma;
  j["seed"] = ds.seed;
  j["max_len"] = ds.max_len;
  j["n_episodes"] = ds.episodes.size();
  json episodes = json::array();
  for (const auto& e : ds.episodes) {
    json je;
    json xs = json::array();
    json ys = json::array();
    for (const auto& s : e.states) {
      xs.push_back(s.x);
      ys.push_back(s.y);
    }
    je["x"] = std::move(xs);
    je["y"] = std::move(ys);
    je["action"] = e.actions;
    je["reward"] = e.rewards;
    je["terminated"] = e.terminated;
    episodes.push_back(std::move(je));
  }
  j["episodes"] = std::move(episodes);
  return j.dump() + "\n";
}

TrajectoryDataset dataset_from_json(const std::string& text) {
  TrajectoryDataset ds;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "leakage-dataset") {
      throw std::invalid_argument("not a leakage dataset file");
    }
    ds.map_id = j.at("map_id").get<std::string>();
    ds.gamma = j.at("gamma").get<double>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.max_len = j.at("max_len").get<int>();
    const auto n = j.at("n_episodes").get<std::size_t>();
    for (const auto& je : j.at("episodes")) {
      Episode e;
      const auto xs = je.at("x").get<std::vector<double>>();
      const auto ys = je.at("y").get<std::vector<double>>();
      if (xs.size() != ys.size()) throw std::invalid_argument("x/y length mismatch");
      for (std::size_t i = 0; i < xs.size(); ++i) e.states.push_back({xs[i], ys[i]});
      e.actions = je.at("action").get<std::vector<int>>();
      e.rewards = je.at("reward").get<std::vector<double>>();
      e.terminated = je.at("terminated").get<bool>();
      if (e.states.size() != e.actions.size() + 1 ||
          e.rewards.size() != e.actions.size()) {
        throw std::invalid_argument("episode arrays have inconsistent lengths");
      }
      ds.episodes.push_back(std::move(e));
    }
    if (ds.episodes.size() != n) {
      throw std::invalid_argument("episode count does not match header");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed dataset: ") + e.what());
  }
  return ds;
}

void save_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path) {
  write_file(path, dataset_to_json(ds));
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_file(path));
}

std::string layout_to_json(const MapLayout& layout) {
  json j;
  j["format"] = "leakage-map";
  j["map_id"] = layout.map_id;
  j["width"] = layout.width;
  j["height"] = layout.height;
  j["step_size"] = layout.step_size;
  json walls = json::array();
  for (const auto& w : layout.walls) {
    walls.push_back({w.a.x, w.a.y, w.b.x, w.b.y});
  }
  j["walls"] = std::move(walls);
  json zones = json::array();
  for (const auto& z : layout.reward_zones) {
    zones.push_back({{"x", z.center.x}, {"y", z.center.y},
                     {"radius", z.radius}, {"reward", z.reward}});
  }
  j["reward_zones"] = std::move(zones);
  json spawn = json::array();
  for (const auto& r : layout.spawn_regions) spawn.push_back({r.x0, r.y0, r.x1, r.y1});
  j["spawn_regions"] = std::move(spawn);
  return j.dump(2) + "\n";
}

MapLayout layout_from_json(const std::string& text) {
  MapLayout m;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "leakage-map") {
      throw ConfigError("not a leakage map file");
    }
    m.map_id = j.at("map_id").get<std::string>();
    m.width = j.at("width").get<double>();
    m.height = j.at("height").get<double>();
    m.step_size = j.value("step_size", kDefaultStepSize);
    for (const auto& w : j.at("walls")) {
      const auto v = w.get<std::vector<double>>();
      if (v.size() != 4) throw ConfigError("wall needs 4 coordinates");
      m.walls.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
    for (const auto& z : j.at("reward_zones")) {
      m.reward_zones.push_back({{z.at("x").get<double>(), z.at("y").get<double>()},
                                z.value("radius", kDefaultRewardRadius),
                                z.value("reward", kDefaultReward)});
    }
    for (const auto& r : j.at("spawn_regions")) {
      const auto v = r.get<std::vector<double>>();
      if (v.size() != 4) throw ConfigError("spawn rectangle needs 4 coordinates");
      m.spawn_regions.push_back({v[0], v[1], v[2], v[3]});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed map file: ") + e.what());
  }
  m.validate();
  return m;
}

MapLayout resolve_layout(const std::string& id_or_path) {
  if (id_or_path == "map1" || id_or_path == "map2" || id_or_path == "map3") {
    return builtin_map(id_or_path);
  }
  if (std::filesystem::exists(id_or_path)) {
    return layout_from_json(read_file(id_or_path));
  }
  return builtin_map(id_or_path);  // throws the unknown-id error
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace leakage
