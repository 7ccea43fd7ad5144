#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "inertia/augmentation.hpp"
#include "inertia/data/csv.hpp"
#include "inertia/data/synth.hpp"
#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/model.hpp"
#include "inertia/preprocessing.hpp"
#include "inertia/rng.hpp"
#include "inertia/runner/config.hpp"

namespace inertia {

// Raw recordings, loaded once per suite and shared read-only between runs.
struct RawData {
  InertialSeries train_series;
  GroundTruth train_gt;
  InertialSeries test_series;
  GroundTruth test_gt;
};

template <typename F>
auto in_stage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    std::throw_with_nested(StageError(stage, e.what()));
  }
}

// Chronological split: the first (1 - test_fraction) of the samples train, the rest test.
inline std::pair<InertialSeries, InertialSeries> split_series(const InertialSeries& series, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DomainError("split: test_fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(series.size()) * (1.0 - test_fraction)));
  if (n_train == 0 || n_train >= series.size()) throw StructuralError("split: series too short to split");
  return {InertialSeries(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(n_train)),
          InertialSeries(series.begin() + static_cast<std::ptrdiff_t>(n_train), series.end())};
}

inline RawData load_raw_data(const DatasetConfig& cfg) {
  RawData raw;
  if (const auto* synth = std::get_if<SynthSpec>(&cfg.source)) {
    auto data = in_stage("synthesize", [&] { return synthesize_dataset(*synth); });
    in_stage("split", [&] {
      std::tie(raw.train_series, raw.test_series) = split_series(data.series, cfg.test_fraction);
      return 0;
    });
    raw.train_gt = data.gt;
    raw.test_gt = std::move(data.gt);
    return raw;
  }
  const auto& files = std::get<FileSource>(cfg.source);
  in_stage("parse", [&] {
    auto series = parse_imu_csv(files.imu);
    auto gt = parse_gt_csv(files.gt);
    validate(series);
    if (files.test_imu.empty()) {
      std::tie(raw.train_series, raw.test_series) = split_series(series, cfg.test_fraction);
      raw.train_gt = gt;
      raw.test_gt = std::move(gt);
    } else {
      raw.train_series = std::move(series);
      raw.train_gt = std::move(gt);
      raw.test_series = parse_imu_csv(files.test_imu);
      raw.test_gt = parse_gt_csv(files.test_gt);
      validate(raw.test_series);
    }
    return 0;
  });
  return raw;
}

// Order-sensitive FNV-1a over every window value and label.
inline std::uint64_t dataset_hash(const WindowedDataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const double* p, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < ds.size(); ++i) {
    mix(ds.windows[i].data.data(), ds.windows[i].data.size());
    mix(ds.labels[i].data(), ds.labels[i].size());
  }
  return h;
}

struct PreparedData {
  WindowedDataset train;  // after augmentation
  WindowedDataset test;
  std::size_t train_windows_before_augmentation = 0;
  std::vector<NormalizationStats> normalization;
};

// Every data stage of one run: preprocess, window, label, window-level preprocessing,
// then augmentation of the training windows only.
inline PreparedData prepare_data(const ExperimentConfig& cfg, const RawData& raw, std::uint64_t seed) {
  const PreprocSpec& pre = effective_preprocessing(cfg);
  const DatasetDescriptor& desc = cfg.dataset.descriptor;

  Rng train_noise = Rng::derive(seed, streams::kPreprocessTrain);
  Rng test_noise = Rng::derive(seed, streams::kPreprocessTest);
  auto splits = in_stage("preprocess", [&] {
    return preprocess_series(pre, raw.train_series, raw.test_series, train_noise, test_noise);
  });

  PreparedData out;
  out.normalization = splits.normalization;
  auto build = [&](const InertialSeries& series, const GroundTruth& gt) {
    const auto targets = in_stage("align", [&] { return align_gt(series, gt); });
    auto ds = in_stage("window", [&] { return build_windowed_dataset(series, targets, desc); });
    ds.windows = in_stage("preprocess", [&] { return preprocess_windows(pre, std::move(ds.windows)); });
    return ds;
  };
  out.train = build(splits.train, raw.train_gt);
  out.test = build(splits.test, raw.test_gt);
  out.train_windows_before_augmentation = out.train.size();

  if (const auto* aug = std::get_if<AugmentTechnique>(&cfg.technique.kind)) {
    Rng rng = Rng::derive(seed, streams::kAugment);
    out.train = in_stage("augment", [&] { return augment(out.train, aug->augmentation, rng); });
  }
  return out;
}

struct RunDiagnostics {
  std::size_t train_windows = 0;
  std::size_t augmented_train_windows = 0;
  std::size_t test_windows = 0;
  std::uint64_t test_hash = 0;
  std::uint64_t init_hash = 0;
  std::vector<NormalizationStats> normalization;
  double final_train_loss = 0.0;
};

struct RunResult {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double rmse = 0.0;
  std::string error;
  RunDiagnostics diagnostics;
  double seconds = 0.0;
};

struct TrainedModel {
  ModelConfig model;
  ParameterSet<double> parameters;
  double rmse = 0.0;
  RunDiagnostics diagnostics;
};

namespace detail {

template <typename Real>
TrainedModel run_typed(const ExperimentConfig& cfg, const PreparedData& data, std::uint64_t seed) {
  const ModelConfig model = effective_model(cfg);
  const TrainConfig tc = effective_train(cfg, seed);
  TrainedModel out;
  out.model = model;
  auto ps = in_stage("model", [&] {
    Rng init = Rng::derive(seed, streams::kInit);
    return build_model<Real>(model, init);
  });
  out.diagnostics.init_hash = parameter_hash(ps);
  const auto result = in_stage("train", [&] { return train(ps, model, tc, data.train); });
  out.diagnostics.final_train_loss = result.loss_curve.back();
  out.rmse = in_stage("evaluate", [&] {
    const double r = evaluate_rmse(ps, model, data.test);
    if (!std::isfinite(r)) throw NumericError("non-finite test RMSE");
    return r;
  });
  out.parameters = zero_parameters<double>(model);
  std::vector<const std::vector<Real>*> src;
  for_each_tensor(ps, [&](const std::string&, const std::vector<Real>& v) { src.push_back(&v); });
  std::size_t k = 0;
  for_each_tensor(out.parameters, [&](const std::string&, std::vector<double>& dst) {
    dst.assign(src[k]->begin(), src[k]->end());
    ++k;
  });
  return out;
}

}  // namespace detail

// One seeded run of one technique; every stage error is rethrown as StageError.
inline TrainedModel train_experiment(const ExperimentConfig& cfg, const RawData& raw, std::uint64_t seed) {
  const PreparedData data = prepare_data(cfg, raw, seed);
  TrainedModel out = cfg.precision == Precision::kF64 ? detail::run_typed<double>(cfg, data, seed)
                                                      : detail::run_typed<float>(cfg, data, seed);
  out.diagnostics.train_windows = data.train_windows_before_augmentation;
  out.diagnostics.augmented_train_windows = data.train.size();
  out.diagnostics.test_windows = data.test.size();
  out.diagnostics.test_hash = dataset_hash(data.test);
  out.diagnostics.normalization = data.normalization;
  return out;
}

inline RunResult run_experiment(const ExperimentConfig& cfg, const RawData& raw, std::uint64_t seed) {
  const auto trained = train_experiment(cfg, raw, seed);
  RunResult r;
  r.seed = seed;
  r.ok = true;
  r.rmse = trained.rmse;
  r.diagnostics = trained.diagnostics;
  return r;
}

inline RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_experiment(cfg, load_raw_data(cfg.dataset), seed);
}

struct TechniqueReport {
  TechniqueSpec technique;
  std::vector<RunResult> runs;
  std::size_t successful = 0;
  std::size_t failed_runs = 0;
  bool failed = false;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1), 0 for a single run
  std::optional<double> improvement_pct;
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<TechniqueReport> techniques;
  double wall_seconds = 0.0;

  bool any_failed() const {
    return std::any_of(techniques.begin(), techniques.end(), [](const TechniqueReport& t) { return t.failed; });
  }
};

inline void aggregate(TechniqueReport& t) {
  std::vector<double> ok;
  for (const auto& r : t.runs) {
    if (r.ok) ok.push_back(r.rmse);
  }
  t.successful = ok.size();
  t.failed_runs = t.runs.size() - ok.size();
  t.failed = ok.empty();
  if (ok.empty()) return;
  double sum = 0.0;
  for (double v : ok) sum += v;
  t.mean = sum / static_cast<double>(ok.size());
  double ss = 0.0;
  for (double v : ok) ss += (v - t.mean) * (v - t.mean);
  t.std = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
}

// Worker count: INERTIA_BENCH_WORKERS when set to a positive integer, else the configured value.
inline std::size_t resolve_workers(std::size_t configured) {
  if (const char* env = std::getenv("INERTIA_BENCH_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigError("INERTIA_BENCH_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    }
    return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(configured, 1);
}

using ProgressFn = std::function<void(const TechniqueSpec&, const RunResult&)>;

// Runs repetitions x techniques jobs; run i of every technique uses seed base_seed + i.
// Results are written into fixed slots, so the report does not depend on the worker count.
inline SuiteReport run_suite(const SuiteConfig& suite, std::size_t workers, const ProgressFn& progress = {}) {
  validate(suite);
  if (std::none_of(suite.techniques.begin(), suite.techniques.end(),
                   [](const TechniqueSpec& t) { return t.is_baseline(); })) {
    throw ConfigError("suite needs a baseline technique");
  }
  const auto wall_start = std::chrono::steady_clock::now();
  const RawData raw = load_raw_data(suite.dataset);

  SuiteReport report;
  report.config = suite;
  report.techniques.resize(suite.techniques.size());
  std::vector<ExperimentConfig> configs;
  for (std::size_t t = 0; t < suite.techniques.size(); ++t) {
    configs.push_back(experiment_config(suite, t));
    report.techniques[t].technique = suite.techniques[t];
    report.techniques[t].runs.resize(suite.repetitions);
  }

  const std::size_t jobs = suite.techniques.size() * suite.repetitions;
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t t = job / suite.repetitions;
      const std::size_t i = job % suite.repetitions;
      const std::uint64_t seed = suite.base_seed + i;
      const auto start = std::chrono::steady_clock::now();
      RunResult r;
      try {
        r = run_experiment(configs[t], raw, seed);
      } catch (const std::exception& e) {
        r = RunResult{};
        r.seed = seed;
        r.ok = false;
        r.error = e.what();
      }
      r.run_index = i;
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      report.techniques[t].runs[i] = r;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(suite.techniques[t], r);
      }
    }
  };
  const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1), jobs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& t : report.techniques) aggregate(t);
  const auto base = std::find_if(report.techniques.begin(), report.techniques.end(),
                                 [](const TechniqueReport& t) { return t.technique.is_baseline(); });
  if (!base->failed && base->mean > 0.0) {
    for (auto& t : report.techniques) {
      if (!t.failed) t.improvement_pct = improvement_pct(base->mean, t.mean);
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

}  // namespace inertia
