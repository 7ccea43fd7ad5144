#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "inertia/data/series.hpp"
#include "inertia/error.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/rng.hpp"

namespace inertia {

enum class NormalizeMethod { kZScore, kRobust };

inline std::string_view to_string(NormalizeMethod m) { return m == NormalizeMethod::kZScore ? "zscore" : "robust"; }

inline NormalizeMethod normalize_method_from_string(std::string_view s) {
  if (s == "zscore") return NormalizeMethod::kZScore;
  if (s == "robust") return NormalizeMethod::kRobust;
  throw ConfigError("unknown normalization method '" + std::string(s) + "'");
}

struct DenoiseStep {
  std::size_t window = 10;
  friend bool operator==(const DenoiseStep&, const DenoiseStep&) = default;
};
struct AddNoiseStep {
  double sigma_acc = 0.1;
  double sigma_gyro = 0.001;
  friend bool operator==(const AddNoiseStep&, const AddNoiseStep&) = default;
};
struct NormalizeStep {
  NormalizeMethod method = NormalizeMethod::kZScore;
  friend bool operator==(const NormalizeStep&, const NormalizeStep&) = default;
};
struct DetrendStep {
  friend bool operator==(const DetrendStep&, const DetrendStep&) = default;
};

using PreprocStep = std::variant<DenoiseStep, AddNoiseStep, NormalizeStep, DetrendStep>;

// Ordered steps; empty means no preprocessing. Detrending acts on windows, every other
// step on whole recordings before windowing.
struct PreprocSpec {
  std::vector<PreprocStep> steps;
  friend bool operator==(const PreprocSpec&, const PreprocSpec&) = default;
};

inline void validate(const PreprocSpec& spec) {
  for (const auto& step : spec.steps) {
    if (const auto* d = std::get_if<DenoiseStep>(&step); d != nullptr && d->window < 2) {
      throw DomainError("denoise: window must be >= 2");
    }
    if (const auto* n = std::get_if<AddNoiseStep>(&step);
        n != nullptr && (!(n->sigma_acc >= 0.0) || !(n->sigma_gyro >= 0.0))) {
      throw DomainError("add_noise: standard deviations must be >= 0");
    }
  }
}

// Forward window average x~_t = mean(x_t .. x_{t+n-1}); keeps the first T-n+1 timestamps.
inline InertialSeries moving_average(const InertialSeries& x, std::size_t n) {
  if (n < 1) throw StructuralError("moving_average: window must be >= 1");
  if (n > x.size()) {
    throw StructuralError("moving_average: window " + std::to_string(n) + " longer than series of " +
                          std::to_string(x.size()));
  }
  const std::size_t out_len = x.size() - n + 1;
  InertialSeries out(out_len);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < out_len; ++t) {
    out[t].t = x[t].t;
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += x[t + i].channel(c);
      out[t].channel(c) = sum * inv;
    }
  }
  return out;
}

inline InertialSeries add_measurement_noise(const InertialSeries& x, double sigma_acc, double sigma_gyro, Rng& rng) {
  if (!(sigma_acc >= 0.0) || !(sigma_gyro >= 0.0)) throw DomainError("add_noise: standard deviations must be >= 0");
  InertialSeries out = x;
  if (sigma_acc == 0.0 && sigma_gyro == 0.0) return out;
  for (auto& s : out) {
    for (double& v : s.f) v += sigma_acc * rng.normal();
    for (double& v : s.w) v += sigma_gyro * rng.normal();
  }
  return out;
}

// Per-channel center/scale; fitted on training data and reused unchanged on test data.
struct NormalizationStats {
  NormalizeMethod method = NormalizeMethod::kZScore;
  std::array<double, kImuChannels> center{};
  std::array<double, kImuChannels> scale{};

  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

// Quantile by linear interpolation between order statistics at position q (n - 1).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw StructuralError("quantile: empty input");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline NormalizationStats fit_normalization(const InertialSeries& train, NormalizeMethod method) {
  if (train.empty()) throw StructuralError("normalize: empty training series");
  NormalizationStats stats;
  stats.method = method;
  const double n = static_cast<double>(train.size());
  for (std::size_t c = 0; c < kImuChannels; ++c) {
    auto values = channel_values(train, c);
    if (method == NormalizeMethod::kZScore) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / n);  // population std
      if (!(sd > 0.0)) throw DegenerateChannelError(c, imu_channel_names()[c], "zero standard deviation");
      stats.center[c] = mean;
      stats.scale[c] = sd;
    } else {
      std::sort(values.begin(), values.end());
      const double iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
      if (!(iqr > 0.0)) throw DegenerateChannelError(c, imu_channel_names()[c], "zero interquartile range");
      stats.center[c] = quantile_sorted(values, 0.5);
      stats.scale[c] = iqr;
    }
  }
  return stats;
}

inline InertialSeries apply_normalization(const InertialSeries& x, const NormalizationStats& stats) {
  InertialSeries out = x;
  for (auto& s : out) {
    for (std::size_t c = 0; c < kImuChannels; ++c) s.channel(c) = (s.channel(c) - stats.center[c]) / stats.scale[c];
  }
  return out;
}

// Fits on x itself; use fit_normalization + apply_normalization to carry train statistics to test data.
inline InertialSeries normalize(const InertialSeries& x, NormalizeMethod method) {
  return apply_normalization(x, fit_normalization(x, method));
}

// Residual of a per-channel least-squares line a t + b, with t = 0 .. n-1.
inline std::vector<double> detrend_linear(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  const double t_mean = static_cast<double>(n - 1) / 2.0;
  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    sxy += dt * (x[t] - x_mean);
    sxx += dt * dt;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = x_mean - slope * t_mean;
  for (std::size_t t = 0; t < n; ++t) out[t] = x[t] - (slope * static_cast<double>(t) + intercept);
  return out;
}

inline Tensor2<double> detrend_linear(const Tensor2<double>& window) {
  Tensor2<double> out(window.channels, window.steps);
  for (std::size_t c = 0; c < window.channels; ++c) {
    const auto r = detrend_linear(window.row(c));
    std::copy(r.begin(), r.end(), out.row(c).begin());
  }
  return out;
}

inline bool has_window_steps(const PreprocSpec& spec) {
  return std::any_of(spec.steps.begin(), spec.steps.end(),
                     [](const PreprocStep& s) { return std::holds_alternative<DetrendStep>(s); });
}

// Recording-level steps for one train/test split pair. Normalization statistics come from
// `train` only; noise draws use the per-split generators.
struct PreprocessedSplits {
  InertialSeries train;
  InertialSeries test;
  std::vector<NormalizationStats> normalization;  // one per normalize step, in order
};

inline PreprocessedSplits preprocess_series(const PreprocSpec& spec, InertialSeries train, InertialSeries test,
                                            Rng& train_rng, Rng& test_rng) {
  validate(spec);
  PreprocessedSplits out;
  for (const auto& step : spec.steps) {
    if (const auto* d = std::get_if<DenoiseStep>(&step)) {
      train = moving_average(train, d->window);
      test = moving_average(test, d->window);
    } else if (const auto* n = std::get_if<AddNoiseStep>(&step)) {
      train = add_measurement_noise(train, n->sigma_acc, n->sigma_gyro, train_rng);
      test = add_measurement_noise(test, n->sigma_acc, n->sigma_gyro, test_rng);
    } else if (const auto* z = std::get_if<NormalizeStep>(&step)) {
      const auto stats = fit_normalization(train, z->method);
      train = apply_normalization(train, stats);
      test = apply_normalization(test, stats);
      out.normalization.push_back(stats);
    }
  }
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

inline std::vector<Tensor2<double>> preprocess_windows(const PreprocSpec& spec, std::vector<Tensor2<double>> windows) {
  for (const auto& step : spec.steps) {
    if (std::holds_alternative<DetrendStep>(step)) {
      for (auto& w : windows) w = detrend_linear(w);
    }
  }
  return windows;
}

}  // namespace inertia
