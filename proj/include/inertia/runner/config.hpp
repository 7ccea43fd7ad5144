#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "inertia/augmentation.hpp"
#include "inertia/data/synth.hpp"
#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/losses.hpp"
#include "inertia/model.hpp"
#include "inertia/preprocessing.hpp"

namespace inertia {

using json = nlohmann::ordered_json;

enum class Precision { kF64, kF32 };

inline std::string_view to_string(Precision p) { return p == Precision::kF64 ? "f64" : "f32"; }

inline Precision precision_from_string(std::string_view s) {
  if (s == "f64") return Precision::kF64;
  if (s == "f32") return Precision::kF32;
  throw ConfigError("unknown precision '" + std::string(s) + "' (expected f64 or f32)");
}

struct FileSource {
  std::filesystem::path imu;
  std::filesystem::path gt;
  std::filesystem::path test_imu;  // empty: chronological split of `imu`
  std::filesystem::path test_gt;
};

struct DatasetConfig {
  DatasetDescriptor descriptor;
  std::variant<SynthSpec, FileSource> source = SynthSpec{};
  double test_fraction = 0.2;  // used when no separate test files are given
};

struct BaselineTechnique {};
struct HeadTechnique {
  HeadMode mode = HeadMode::kHead2;
};
struct LossTechnique {
  LossSpec loss;
};
struct AugmentTechnique {
  AugmentationSpec augmentation;
};
struct PreprocessTechnique {
  PreprocSpec preprocessing;
};

struct TechniqueSpec {
  std::string name = "baseline";
  std::variant<BaselineTechnique, HeadTechnique, LossTechnique, AugmentTechnique, PreprocessTechnique> kind;

  bool is_baseline() const { return std::holds_alternative<BaselineTechnique>(kind); }
};

// Settings shared by every technique of a suite.
struct SuiteConfig {
  DatasetConfig dataset;
  ModelConfig model;
  TrainConfig train;
  Precision precision = Precision::kF64;
  std::vector<TechniqueSpec> techniques;
  std::size_t repetitions = 30;
  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
  std::vector<std::string> formats{"json", "csv", "svg"};
};

// One technique of a suite, as run by run_experiment.
struct ExperimentConfig {
  DatasetConfig dataset;
  ModelConfig model;
  TrainConfig train;
  Precision precision = Precision::kF64;
  TechniqueSpec technique;
  std::size_t repetitions = 30;
  std::uint64_t base_seed = 0;
};

inline ExperimentConfig experiment_config(const SuiteConfig& suite, std::size_t technique_index) {
  ExperimentConfig e;
  e.dataset = suite.dataset;
  e.model = suite.model;
  e.train = suite.train;
  e.precision = suite.precision;
  e.technique = suite.techniques.at(technique_index);
  e.repetitions = suite.repetitions;
  e.base_seed = suite.base_seed;
  return e;
}

// Model and training settings after the technique has been applied.
inline ModelConfig effective_model(const ExperimentConfig& e) {
  ModelConfig m = e.model;
  m.output_dim = target_dim(e.dataset.descriptor.target_kind);
  if (const auto* h = std::get_if<HeadTechnique>(&e.technique.kind)) m.head_mode = h->mode;
  return m;
}

inline TrainConfig effective_train(const ExperimentConfig& e, std::uint64_t seed) {
  TrainConfig t = e.train;
  t.seed = seed;
  if (const auto* l = std::get_if<LossTechnique>(&e.technique.kind)) t.loss = l->loss;
  return t;
}

inline const PreprocSpec& effective_preprocessing(const ExperimentConfig& e) {
  static const PreprocSpec none;
  if (const auto* p = std::get_if<PreprocessTechnique>(&e.technique.kind)) return p->preprocessing;
  return none;
}

inline void validate(const SuiteConfig& s) {
  validate(s.dataset.descriptor);
  if (const auto* synth = std::get_if<SynthSpec>(&s.dataset.source)) validate(*synth);
  if (!(s.dataset.test_fraction > 0.0 && s.dataset.test_fraction < 1.0)) {
    throw ConfigError("dataset.test_fraction must lie in (0, 1)");
  }
  validate(s.model);
  validate(s.train);
  if (s.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
  if (s.techniques.empty()) throw ConfigError("no techniques configured");
  std::set<std::string> names;
  for (const auto& t : s.techniques) {
    if (!names.insert(t.name).second) throw ConfigError("duplicate technique name '" + t.name + "'");
    if (const auto* a = std::get_if<AugmentTechnique>(&t.kind)) validate(a->augmentation);
    if (const auto* p = std::get_if<PreprocessTechnique>(&t.kind)) validate(p->preprocessing);
    if (const auto* l = std::get_if<LossTechnique>(&t.kind)) validate(l->loss);
  }
  for (const auto& f : s.formats) {
    if (f != "json" && f != "csv" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
  }
}

// ---- JSON reading ----

namespace detail {

inline void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

inline std::size_t get_count(const json& j, const char* key, std::size_t fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string(where) + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline double get_number(const json& j, const char* key, double fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(where) + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

inline std::string get_string(const json& j, const char* key, std::string fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(std::string(where) + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

inline std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ConfigError(std::string(where) + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace detail

inline LossSpec loss_from_json(const json& j, std::string_view where) {
  detail::check_keys(j, where, {"kind", "delta"});
  LossSpec s;
  s.kind = loss_kind_from_string(detail::get_string(j, "kind", "mse", where));
  s.delta = detail::get_number(j, "delta", 1.0, where);
  return s;
}

inline SynthSpec synth_from_json(const json& j, std::string_view where) {
  detail::check_keys(j, where,
                     {"kind", "duration", "rate", "gt_rate", "speed", "heading", "radius", "amplitude", "frequency",
                      "accel", "segment", "noise_acc", "noise_gyro", "seed"});
  SynthSpec s;
  s.kind = synth_kind_from_string(detail::get_string(j, "kind", std::string(to_string(s.kind)), where));
  s.duration = detail::get_number(j, "duration", s.duration, where);
  s.rate = detail::get_number(j, "rate", s.rate, where);
  s.gt_rate = detail::get_number(j, "gt_rate", s.gt_rate, where);
  s.speed = detail::get_number(j, "speed", s.speed, where);
  s.heading = detail::get_number(j, "heading", s.heading, where);
  s.radius = detail::get_number(j, "radius", s.radius, where);
  s.amplitude = detail::get_number(j, "amplitude", s.amplitude, where);
  s.frequency = detail::get_number(j, "frequency", s.frequency, where);
  s.accel = detail::get_number(j, "accel", s.accel, where);
  s.segment = detail::get_number(j, "segment", s.segment, where);
  s.noise_acc = detail::get_number(j, "noise_acc", s.noise_acc, where);
  s.noise_gyro = detail::get_number(j, "noise_gyro", s.noise_gyro, where);
  s.seed = detail::get_seed(j, "seed", s.seed, where);
  return s;
}

inline DatasetDescriptor descriptor_from_json(const json& j, std::string_view where) {
  detail::check_keys(j, where, {"preset", "name", "sampling_rate", "window_size", "stride", "target_kind", "epochs"});
  DatasetDescriptor d;
  if (j.contains("preset")) d = dataset_preset(detail::get_string(j, "preset", "", where));
  d.name = detail::get_string(j, "name", d.name, where);
  d.sampling_rate = detail::get_number(j, "sampling_rate", d.sampling_rate, where);
  d.window_size = detail::get_count(j, "window_size", d.window_size, where);
  d.stride = detail::get_count(j, "stride", d.stride, where);
  d.target_kind = target_kind_from_string(detail::get_string(j, "target_kind", std::string(to_string(d.target_kind)), where));
  d.epochs = detail::get_count(j, "epochs", d.epochs, where);
  return d;
}

inline DatasetConfig dataset_from_json(const json& j, std::string_view where, const std::filesystem::path& base_dir) {
  detail::check_keys(j, where, {"descriptor", "synthetic", "imu", "gt", "test_imu", "test_gt", "test_fraction"});
  DatasetConfig d;
  if (j.contains("descriptor")) d.descriptor = descriptor_from_json(j.at("descriptor"), "dataset.descriptor");
  const bool has_files = j.contains("imu") || j.contains("gt");
  if (has_files && j.contains("synthetic")) throw ConfigError(std::string(where) + ": give either synthetic or imu/gt");
  if (has_files) {
    auto resolve = [&](const char* key) -> std::filesystem::path {
      const std::string p = detail::get_string(j, key, "", where);
      if (p.empty()) return {};
      const std::filesystem::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    FileSource f{resolve("imu"), resolve("gt"), resolve("test_imu"), resolve("test_gt")};
    if (f.imu.empty() || f.gt.empty()) throw ConfigError(std::string(where) + ": both imu and gt are required");
    if (f.test_imu.empty() != f.test_gt.empty()) {
      throw ConfigError(std::string(where) + ": test_imu and test_gt must be given together");
    }
    d.source = f;
  } else {
    d.source = synth_from_json(j.contains("synthetic") ? j.at("synthetic") : json::object(), "dataset.synthetic");
  }
  d.test_fraction = detail::get_number(j, "test_fraction", d.test_fraction, where);
  return d;
}

inline ModelConfig model_from_json(const json& j, std::string_view where, Precision* precision) {
  detail::check_keys(j, where,
                     {"head_mode", "filters", "kernel", "stride", "pool", "dropout", "lstm_hidden", "fc_width", "precision"});
  ModelConfig m;
  m.head_mode = head_mode_from_string(detail::get_string(j, "head_mode", "single", where));
  m.filters = detail::get_count(j, "filters", m.filters, where);
  m.kernel = detail::get_count(j, "kernel", m.kernel, where);
  m.stride = detail::get_count(j, "stride", m.stride, where);
  m.pool = detail::get_count(j, "pool", m.pool, where);
  m.dropout = detail::get_number(j, "dropout", m.dropout, where);
  m.lstm_hidden = detail::get_count(j, "lstm_hidden", m.lstm_hidden, where);
  m.fc_width = detail::get_count(j, "fc_width", m.fc_width, where);
  if (precision != nullptr) *precision = precision_from_string(detail::get_string(j, "precision", "f64", where));
  return m;
}

inline TrainConfig train_from_json(const json& j, std::string_view where) {
  detail::check_keys(j, where, {"epochs", "batch_size", "learning_rate", "loss"});
  TrainConfig t;
  t.epochs = detail::get_count(j, "epochs", 0, where);
  t.batch_size = detail::get_count(j, "batch_size", t.batch_size, where);
  t.learning_rate = detail::get_number(j, "learning_rate", t.learning_rate, where);
  if (j.contains("loss")) t.loss = loss_from_json(j.at("loss"), "train.loss");
  return t;
}

inline PreprocStep preproc_step_from_json(const json& j, std::string_view where) {
  if (!j.is_object() || !j.contains("op") || !j.at("op").is_string()) {
    throw ConfigError(std::string(where) + ": each step needs an \"op\" string");
  }
  const std::string op = j.at("op").get<std::string>();
  if (op == "denoise") {
    detail::check_keys(j, where, {"op", "window"});
    return DenoiseStep{detail::get_count(j, "window", 10, where)};
  }
  if (op == "add_noise") {
    detail::check_keys(j, where, {"op", "sigma_acc", "sigma_gyro"});
    return AddNoiseStep{detail::get_number(j, "sigma_acc", 0.1, where), detail::get_number(j, "sigma_gyro", 0.001, where)};
  }
  if (op == "normalize") {
    detail::check_keys(j, where, {"op", "method"});
    return NormalizeStep{normalize_method_from_string(detail::get_string(j, "method", "zscore", where))};
  }
  if (op == "detrend") {
    detail::check_keys(j, where, {"op"});
    return DetrendStep{};
  }
  throw ConfigError(std::string(where) + ": unknown preprocessing op '" + op + "'");
}

inline AugmentationSpec augmentation_from_json(const json& j, std::string_view where) {
  detail::check_keys(j, where, {"kind", "axes", "std_acc", "std_gyro", "copies", "schedule"});
  AugmentationSpec a;
  a.kind = augment_kind_from_string(detail::get_string(j, "kind", "rotation", where));
  if (j.contains("axes")) {
    if (!j.at("axes").is_array()) throw ConfigError(std::string(where) + ".axes: expected an array");
    a.rotation_axes.clear();
    for (const auto& ax : j.at("axes")) {
      if (!ax.is_string()) throw ConfigError(std::string(where) + ".axes: expected strings");
      a.rotation_axes.push_back(rotation_axis_from_string(ax.get<std::string>()));
    }
  }
  a.bias_std_acc = detail::get_number(j, "std_acc", a.bias_std_acc, where);
  a.bias_std_gyro = detail::get_number(j, "std_gyro", a.bias_std_gyro, where);
  a.bias_copies = detail::get_count(j, "copies", a.bias_copies, where);
  if (a.kind == AugmentKind::kNoise && j.contains("copies") && !j.contains("schedule")) {
    a.noise_schedule = default_noise_schedule(a.bias_copies);
  }
  if (j.contains("schedule")) {
    if (!j.at("schedule").is_array()) throw ConfigError(std::string(where) + ".schedule: expected an array");
    a.noise_schedule.clear();
    for (const auto& level : j.at("schedule")) {
      if (!level.is_array() || level.size() != 2 || !level[0].is_number() || !level[1].is_number()) {
        throw ConfigError(std::string(where) + ".schedule: entries must be [sigma_acc, sigma_gyro]");
      }
      a.noise_schedule.push_back({level[0].get<double>(), level[1].get<double>()});
    }
  }
  return a;
}

inline TechniqueSpec technique_from_json(const json& j, std::string_view where) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(std::string(where) + ": each technique needs a \"type\" string");
  }
  const std::string type = j.at("type").get<std::string>();
  TechniqueSpec t;
  if (type == "baseline") {
    detail::check_keys(j, where, {"name", "type"});
    t.kind = BaselineTechnique{};
  } else if (type == "head2" || type == "head3") {
    detail::check_keys(j, where, {"name", "type"});
    t.kind = HeadTechnique{head_mode_from_string(type)};
  } else if (type == "loss") {
    detail::check_keys(j, where, {"name", "type", "loss"});
    if (!j.contains("loss")) throw ConfigError(std::string(where) + ": loss technique needs \"loss\"");
    t.kind = LossTechnique{loss_from_json(j.at("loss"), std::string(where) + ".loss")};
  } else if (type == "augment") {
    detail::check_keys(j, where, {"name", "type", "augment"});
    if (!j.contains("augment")) throw ConfigError(std::string(where) + ": augment technique needs \"augment\"");
    t.kind = AugmentTechnique{augmentation_from_json(j.at("augment"), std::string(where) + ".augment")};
  } else if (type == "preprocess") {
    detail::check_keys(j, where, {"name", "type", "steps"});
    if (!j.contains("steps") || !j.at("steps").is_array()) {
      throw ConfigError(std::string(where) + ": preprocess technique needs a \"steps\" array");
    }
    PreprocSpec p;
    for (const auto& s : j.at("steps")) p.steps.push_back(preproc_step_from_json(s, std::string(where) + ".steps"));
    t.kind = PreprocessTechnique{p};
  } else {
    throw ConfigError(std::string(where) + ": unknown technique type '" + type + "'");
  }
  t.name = detail::get_string(j, "name", type, where);
  return t;
}

inline SuiteConfig suite_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  detail::check_keys(j, "config",
                     {"dataset", "model", "train", "techniques", "repetitions", "base_seed", "workers", "formats"});
  SuiteConfig s;
  if (j.contains("dataset")) s.dataset = dataset_from_json(j.at("dataset"), "dataset", base_dir);
  if (j.contains("model")) s.model = model_from_json(j.at("model"), "model", &s.precision);
  s.train = train_from_json(j.contains("train") ? j.at("train") : json::object(), "train");
  if (s.train.epochs == 0) s.train.epochs = s.dataset.descriptor.epochs;
  if (s.train.epochs == 0) throw ConfigError("train.epochs must be given (or implied by a dataset preset)");
  s.model.output_dim = target_dim(s.dataset.descriptor.target_kind);
  if (!j.contains("techniques") || !j.at("techniques").is_array()) {
    throw ConfigError("config: \"techniques\" array is required");
  }
  for (std::size_t i = 0; i < j.at("techniques").size(); ++i) {
    s.techniques.push_back(technique_from_json(j.at("techniques")[i], "techniques[" + std::to_string(i) + "]"));
  }
  s.repetitions = detail::get_count(j, "repetitions", s.repetitions, "config");
  s.base_seed = detail::get_seed(j, "base_seed", s.base_seed, "config");
  s.workers = detail::get_count(j, "workers", s.workers, "config");
  if (j.contains("formats")) {
    if (!j.at("formats").is_array()) throw ConfigError("config.formats: expected an array");
    s.formats.clear();
    for (const auto& f : j.at("formats")) {
      if (!f.is_string()) throw ConfigError("config.formats: expected strings");
      s.formats.push_back(f.get<std::string>());
    }
  }
  validate(s);
  return s;
}

inline SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return suite_from_json(j, path.parent_path());
}

// ---- JSON writing (config echo in reports and checkpoints) ----

inline json to_json(const LossSpec& s) {
  json j{{"kind", to_string(s.kind)}};
  if (s.kind == LossKind::kHuber) j["delta"] = s.delta;
  return j;
}

inline json to_json(const ModelConfig& m) {
  return json{{"head_mode", to_string(m.head_mode)}, {"filters", m.filters},      {"kernel", m.kernel},
              {"stride", m.stride},                  {"pool", m.pool},            {"dropout", m.dropout},
              {"lstm_hidden", m.lstm_hidden},        {"fc_width", m.fc_width},    {"output_dim", m.output_dim}};
}

inline ModelConfig model_config_from_checkpoint_json(const json& j) {
  detail::check_keys(j, "checkpoint.model",
                     {"head_mode", "filters", "kernel", "stride", "pool", "dropout", "lstm_hidden", "fc_width", "output_dim"});
  ModelConfig m = model_from_json(
      [&] {
        json c = j;
        c.erase("output_dim");
        return c;
      }(),
      "checkpoint.model", nullptr);
  m.output_dim = detail::get_count(j, "output_dim", 1, "checkpoint.model");
  validate(m);
  return m;
}

inline json to_json(const TrainConfig& t) {
  return json{{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"learning_rate", t.learning_rate}, {"loss", to_json(t.loss)}};
}

inline json to_json(const DatasetDescriptor& d) {
  return json{{"name", d.name},
              {"sampling_rate", d.sampling_rate},
              {"window_size", d.window_size},
              {"stride", d.stride},
              {"target_kind", to_string(d.target_kind)}};
}

inline json to_json(const SynthSpec& s) {
  return json{{"kind", to_string(s.kind)}, {"duration", s.duration},   {"rate", s.rate},
              {"gt_rate", s.gt_rate},      {"speed", s.speed},         {"heading", s.heading},
              {"radius", s.radius},        {"amplitude", s.amplitude}, {"frequency", s.frequency},
              {"accel", s.accel},          {"segment", s.segment},     {"noise_acc", s.noise_acc},
              {"noise_gyro", s.noise_gyro}, {"seed", s.seed}};
}

inline json to_json(const DatasetConfig& d) {
  json j{{"descriptor", to_json(d.descriptor)}};
  if (const auto* s = std::get_if<SynthSpec>(&d.source)) {
    j["synthetic"] = to_json(*s);
  } else {
    const auto& f = std::get<FileSource>(d.source);
    // File names only, so reports do not depend on where the data lives.
    j["imu"] = f.imu.filename().string();
    j["gt"] = f.gt.filename().string();
    if (!f.test_imu.empty()) {
      j["test_imu"] = f.test_imu.filename().string();
      j["test_gt"] = f.test_gt.filename().string();
    }
  }
  j["test_fraction"] = d.test_fraction;
  return j;
}

inline json to_json(const AugmentationSpec& a) {
  json j{{"kind", to_string(a.kind)}};
  switch (a.kind) {
    case AugmentKind::kRotation: {
      json axes = json::array();
      for (auto ax : a.rotation_axes) axes.push_back(to_string(ax));
      j["axes"] = axes;
      break;
    }
    case AugmentKind::kBias:
      j["std_acc"] = a.bias_std_acc;
      j["std_gyro"] = a.bias_std_gyro;
      j["copies"] = a.bias_copies;
      break;
    case AugmentKind::kNoise: {
      json sched = json::array();
      for (const auto& n : a.noise_schedule) sched.push_back(json::array({n.sigma_acc, n.sigma_gyro}));
      j["schedule"] = sched;
      break;
    }
  }
  return j;
}

inline json to_json(const PreprocStep& step) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, DenoiseStep>) {
          return json{{"op", "denoise"}, {"window", s.window}};
        } else if constexpr (std::is_same_v<S, AddNoiseStep>) {
          return json{{"op", "add_noise"}, {"sigma_acc", s.sigma_acc}, {"sigma_gyro", s.sigma_gyro}};
        } else if constexpr (std::is_same_v<S, NormalizeStep>) {
          return json{{"op", "normalize"}, {"method", to_string(s.method)}};
        } else {
          return json{{"op", "detrend"}};
        }
      },
      step);
}

inline json to_json(const TechniqueSpec& t) {
  return std::visit(
      [&](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BaselineTechnique>) {
          return json{{"name", t.name}, {"type", "baseline"}};
        } else if constexpr (std::is_same_v<K, HeadTechnique>) {
          return json{{"name", t.name}, {"type", to_string(k.mode)}};
        } else if constexpr (std::is_same_v<K, LossTechnique>) {
          return json{{"name", t.name}, {"type", "loss"}, {"loss", to_json(k.loss)}};
        } else if constexpr (std::is_same_v<K, AugmentTechnique>) {
          return json{{"name", t.name}, {"type", "augment"}, {"augment", to_json(k.augmentation)}};
        } else {
          json steps = json::array();
          for (const auto& s : k.preprocessing.steps) steps.push_back(to_json(s));
          return json{{"name", t.name}, {"type", "preprocess"}, {"steps", steps}};
        }
      },
      t.kind);
}

inline json to_json(const SuiteConfig& s) {
  json techniques = json::array();
  for (const auto& t : s.techniques) techniques.push_back(to_json(t));
  json model = to_json(s.model);
  model.erase("output_dim");  // follows from the target kind
  model["precision"] = to_string(s.precision);
  return json{{"dataset", to_json(s.dataset)}, {"model", model},
              {"train", to_json(s.train)},     {"techniques", techniques},
              {"repetitions", s.repetitions},  {"base_seed", s.base_seed}};
}

}  // namespace inertia
