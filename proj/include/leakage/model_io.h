#ifndef LEAKAGE_MODEL_IO_H_
#define LEAKAGE_MODEL_IO_H_

// Model files: JSON header (layer sizes, activation, embedding mode, frozen
// split, normalization) plus the flat parameter array at full double
// precision.

#include <filesystem>
#include <string>

#include "leakage/value_model.h"

namespace leakage {

struct SavedModel {
  std::string map_id;
  EmbeddingMode mode = EmbeddingMode::kNone;
  TwoStageValue model;
};

std::string model_to_json(const TwoStageValue& model, EmbeddingMode mode,
                          const std::string& map_id);
SavedModel model_from_json(const std::string& text);

void save_model(const TwoStageValue& model, EmbeddingMode mode,
                const std::string& map_id, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

// Standalone network files (e.g. a trained embedding).
std::string net_to_json(const NetParams& params, const std::string& tag);
NetParams net_from_json(const std::string& text);

}  // namespace leakage

#endif  // LEAKAGE_MODEL_IO_H_
