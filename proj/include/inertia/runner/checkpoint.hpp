#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/error.hpp"
#include "inertia/model.hpp"
#include "inertia/runner/config.hpp"

// Checkpoint file (JSON):
//   {"format": "inertia-checkpoint", "version": 1,
//    "model": ModelConfig, "parameters": {"<tensor name>": [values...]}, "meta": {...}}
// Tensor names and order follow for_each_tensor; values are written in shortest
// round-trip form, so save -> load restores every parameter exactly.

namespace inertia {

inline constexpr const char* kCheckpointFormat = "inertia-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model;
  ParameterSet<double> parameters;
  json meta = json::object();
};

inline json checkpoint_to_json(const Checkpoint& c) {
  json params = json::object();
  for_each_tensor(c.parameters, [&](const std::string& name, const std::vector<double>& v) { params[name] = v; });
  return json{{"format", kCheckpointFormat},
              {"version", kCheckpointVersion},
              {"model", to_json(c.model)},
              {"parameters", params},
              {"meta", c.meta}};
}

inline Checkpoint checkpoint_from_json(const json& j) {
  detail::check_keys(j, "checkpoint", {"format", "version", "model", "parameters", "meta"});
  if (!j.contains("format") || j.at("format") != kCheckpointFormat) throw DataError("checkpoint: missing format tag");
  if (!j.contains("version") || j.at("version") != kCheckpointVersion) {
    throw DataError("checkpoint: unsupported version");
  }
  Checkpoint c;
  c.model = model_config_from_checkpoint_json(j.at("model"));
  c.parameters = zero_parameters<double>(c.model);
  const auto& params = j.at("parameters");
  if (!params.is_object()) throw DataError("checkpoint: parameters must be an object");
  std::size_t seen = 0;
  for_each_tensor(c.parameters, [&](const std::string& name, std::vector<double>& v) {
    if (!params.contains(name)) throw DataError("checkpoint: missing tensor '" + name + "'");
    const auto& arr = params.at(name);
    if (!arr.is_array() || arr.size() != v.size()) throw DataError("checkpoint: tensor '" + name + "' has the wrong size");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!arr[i].is_number()) throw DataError("checkpoint: tensor '" + name + "' holds a non-number");
      v[i] = arr[i].get<double>();
    }
    ++seen;
  });
  if (seen != params.size()) throw DataError("checkpoint: unexpected extra tensors");
  if (j.contains("meta")) c.meta = j.at("meta");
  validate(c.parameters, c.model);
  return c;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << checkpoint_to_json(c).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return checkpoint_from_json(json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace inertia
