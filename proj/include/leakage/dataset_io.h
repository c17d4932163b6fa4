#ifndef LEAKAGE_DATASET_IO_H_
#define LEAKAGE_DATASET_IO_H_

// JSON containers for trajectory datasets and map layouts. Doubles are written
// in shortest round-trip form, so save(load(x)) is byte-identical.

#include <filesystem>
#include <string>

#include "leakage/envsim.h"

namespace leakage {

std::string dataset_to_json(const TrajectoryDataset& ds);
TrajectoryDataset dataset_from_json(const std::string& text);
void save_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path);
TrajectoryDataset load_dataset(const std::filesystem::path& path);

std::string layout_to_json(const MapLayout& layout);
MapLayout layout_from_json(const std::string& text);

// A builtin id (map1..map3) or a path to a layout JSON file.
MapLayout resolve_layout(const std::string& id_or_path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// 64-bit FNV-1a, printed as hex; identifies a dataset in run metadata.
std::string content_hash(const std::string& bytes);

}  // namespace leakage

#endif  // LEAKAGE_DATASET_IO_H_
