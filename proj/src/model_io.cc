#include "leakage/model_io.h"

#include <stdexcept>

#include "json.hpp"
#include "leakage/dataset_io.h"

namespace leakage {

using nlohmann::json;

namespace {

std::string kind_name(TwoStageValue::EmbeddingKind kind) {
  switch (kind) {
    case TwoStageValue::EmbeddingKind::kIdentity: return "identity";
    case TwoStageValue::EmbeddingKind::kOracle: return "oracle";
    case TwoStageValue::EmbeddingKind::kMlp: return "mlp";
  }
  return "identity";
}

json spec_json(const MlpSpec& spec) {
  return {{"layer_sizes", spec.layer_sizes},
          {"activation", "tanh"},
          {"output_activation", "identity"},
          {"n_params", spec.num_params()}};
}

MlpSpec spec_from(const json& j) {
  if (j.value("activation", "tanh") != "tanh") {
    throw std::invalid_argument("unsupported activation " + j.value("activation", ""));
  }
  MlpSpec spec{j.at("layer_sizes").get<std::vector<int>>()};
  spec.validate();
  return spec;
}

NetParams slice(const MlpSpec& spec, const std::vector<double>& flat, std::size_t offset) {
  if (offset + spec.num_params() > flat.size()) {
    throw std::invalid_argument("model file holds too few parameters");
  }
  return {spec, std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                                    flat.begin() + static_cast<std::ptrdiff_t>(offset + spec.num_params()))};
}

}  // namespace

std::string model_to_json(const TwoStageValue& model, EmbeddingMode mode,
                          const std::string& map_id) {
  json j;
  j["format"] = "leakage-model";
  j["map_id"] = map_id;
  j["normalizer"] = {{"width", model.normalizer().width},
                     {"height", model.normalizer().height}};
  json emb;
  emb["mode"] = to_string(mode);
  emb["kind"] = kind_name(model.embedding_kind());
  if (model.embedding_kind() == TwoStageValue::EmbeddingKind::kMlp) {
    emb["network"] = spec_json(model.embedding_spec());
    emb["frozen"] = model.embedding_frozen();
  }
  if (model.embedding_kind() == TwoStageValue::EmbeddingKind::kOracle) {
    emb["alpha"] = model.oracle_alpha();
  }
  j["embedding"] = std::move(emb);
  j["junction"] = model.junction() == Junction::kTanh ? "tanh" : "identity";
  j["value"] = spec_json(model.value_spec());
  j["split"] = {{"embedding_params", model.embedding_param_count()},
                {"value_params", model.value_params().size()}};
  j["params"] = std::vector<double>(model.params().begin(), model.params().end());
  return j.dump(1) + "\n";
}

SavedModel model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "leakage-model") {
      throw std::invalid_argument("not a leakage model file");
    }
    const InputNormalizer norm{j.at("normalizer").at("width").get<double>(),
                               j.at("normalizer").at("height").get<double>()};
    const json& emb = j.at("embedding");
    const auto flat = j.at("params").get<std::vector<double>>();
    const MlpSpec value_spec = spec_from(j.at("value"));
    const std::string kind = emb.at("kind").get<std::string>();
    SavedModel out{j.at("map_id").get<std::string>(),
                   parse_embedding_mode(emb.at("mode").get<std::string>()),
                   TwoStageValue::identity_embedding(
                       {value_spec, std::vector<double>(value_spec.num_params(), 0.0)}, norm)};
    if (kind == "mlp") {
      const MlpSpec emb_spec = spec_from(emb.at("network"));
      if (flat.size() != emb_spec.num_params() + value_spec.num_params()) {
        throw std::invalid_argument("parameter count does not match layer sizes");
      }
      out.model = TwoStageValue::mlp_embedding(
          slice(emb_spec, flat, 0), emb.at("frozen").get<bool>(),
          slice(value_spec, flat, emb_spec.num_params()),
          j.at("junction").get<std::string>() == "tanh" ? Junction::kTanh : Junction::kIdentity,
          norm);
    } else {
      if (flat.size() != value_spec.num_params()) {
        throw std::invalid_argument("parameter count does not match layer sizes");
      }
      out.model = kind == "oracle"
                      ? TwoStageValue::oracle_embedding(emb.at("alpha").get<double>(),
                                                        slice(value_spec, flat, 0), norm)
                      : TwoStageValue::identity_embedding(slice(value_spec, flat, 0), norm);
    }
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TwoStageValue& model, EmbeddingMode mode,
                const std::string& map_id, const std::filesystem::path& path) {
  write_file(path, model_to_json(model, mode, map_id));
}

SavedModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

std::string net_to_json(const NetParams& params, const std::string& tag) {
  json j;
  j["format"] = "leakage-net";
  j["tag"] = tag;
  j["network"] = spec_json(params.spec);
  j["params"] = params.values;
  return j.dump(1) + "\n";
}

NetParams net_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "leakage-net") {
      throw std::invalid_argument("not a leakage network file");
    }
    NetParams p{spec_from(j.at("network")), j.at("params").get<std::vector<double>>()};
    if (p.values.size() != p.spec.num_params()) {
      throw std::invalid_argument("parameter count does not match layer sizes");
    }
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed network file: ") + e.what());
  }
}

}  // namespace leakage
