#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/data/series.hpp"
#include "inertia/error.hpp"
#include "inertia/kernels/tensor.hpp"

namespace inertia {

enum class TargetKind { kDistanceXY, kPositionXY, kHeading };

inline std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::kDistanceXY: return "distance_xy";
    case TargetKind::kPositionXY: return "position_xy";
    case TargetKind::kHeading: return "heading";
  }
  return "?";
}

inline TargetKind target_kind_from_string(std::string_view s) {
  if (s == "distance_xy") return TargetKind::kDistanceXY;
  if (s == "position_xy") return TargetKind::kPositionXY;
  if (s == "heading") return TargetKind::kHeading;
  throw ConfigError("unknown target kind '" + std::string(s) + "'");
}

inline std::size_t target_dim(TargetKind k) { return k == TargetKind::kPositionXY ? 2 : 1; }

struct DatasetDescriptor {
  std::string name = "synthetic";
  double sampling_rate = 120.0;
  std::size_t window_size = 120;
  std::size_t stride = 60;
  TargetKind target_kind = TargetKind::kDistanceXY;
  std::size_t epochs = 0;  // suggested epoch count, 0 if unspecified

  friend bool operator==(const DatasetDescriptor&, const DatasetDescriptor&) = default;
};

inline void validate(const DatasetDescriptor& d) {
  if (d.window_size < 1) throw StructuralError("descriptor: window_size must be >= 1");
  if (d.stride < 1) throw StructuralError("descriptor: stride must be >= 1");
  if (!(d.sampling_rate > 0.0)) throw StructuralError("descriptor: sampling_rate must be > 0");
}

// Published dataset settings. EuRoC, RIDI and RoNIN have two published strides;
// the "_text" variants carry the alternative one.
inline std::vector<DatasetDescriptor> dataset_presets() {
  return {
      {"quadnet_horizontal", 120.0, 120, 60, TargetKind::kDistanceXY, 150},
      {"quadnet_vertical", 120.0, 120, 60, TargetKind::kDistanceXY, 150},
      {"euroc_mav", 200.0, 200, 100, TargetKind::kPositionXY, 150},
      {"euroc_mav_text", 200.0, 200, 50, TargetKind::kPositionXY, 150},
      {"doorinet", 120.0, 20, 20, TargetKind::kHeading, 100},
      {"ridi", 200.0, 200, 100, TargetKind::kPositionXY, 100},
      {"ridi_text", 200.0, 200, 10, TargetKind::kPositionXY, 100},
      {"ronin", 200.0, 200, 10, TargetKind::kPositionXY, 120},
      {"ronin_text", 200.0, 200, 100, TargetKind::kPositionXY, 120},
      {"morpi", 120.0, 360, 60, TargetKind::kDistanceXY, 80},
  };
}

inline DatasetDescriptor dataset_preset(std::string_view name) {
  for (const auto& d : dataset_presets()) {
    if (d.name == name) return d;
  }
  throw ConfigError("unknown dataset preset '" + std::string(name) + "'");
}

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// Ground truth resampled at every IMU timestamp.
struct AlignedTargets {
  std::vector<double> t;
  std::vector<Vec3> position;
  std::vector<double> heading;
};

// Linear interpolation of position, shortest-arc interpolation of heading.
inline AlignedTargets align_gt(const InertialSeries& series, const GroundTruth& gt) {
  if (gt.t.empty()) throw CoverageError("align_gt: empty ground truth");
  if (gt.has_position() && gt.position.size() != gt.t.size()) throw StructuralError("align_gt: position length");
  if (gt.has_heading() && gt.heading.size() != gt.t.size()) throw StructuralError("align_gt: heading length");
  require_monotonic(gt.t, "ground truth");

  AlignedTargets out;
  out.t = timestamps(series);
  if (gt.has_position()) out.position.resize(series.size());
  if (gt.has_heading()) out.heading.resize(series.size());

  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series[i].t;
    if (t < gt.t.front() || t > gt.t.back()) {
      throw CoverageError("align_gt: IMU timestamp " + std::to_string(t) + " outside ground-truth span [" +
                          std::to_string(gt.t.front()) + ", " + std::to_string(gt.t.back()) + "]");
    }
    auto hi = static_cast<std::size_t>(std::lower_bound(gt.t.begin(), gt.t.end(), t) - gt.t.begin());
    std::size_t lo = hi;
    double alpha = 0.0;
    if (gt.t[hi] != t) {
      lo = hi - 1;
      alpha = (t - gt.t[lo]) / (gt.t[hi] - gt.t[lo]);
    }
    if (gt.has_position()) {
      for (std::size_t k = 0; k < 3; ++k) {
        out.position[i][k] = gt.position[lo][k] + alpha * (gt.position[hi][k] - gt.position[lo][k]);
      }
    }
    if (gt.has_heading()) {
      const double delta = wrap_angle(gt.heading[hi] - gt.heading[lo]);
      out.heading[i] = wrap_angle(gt.heading[lo] + alpha * delta);
    }
  }
  return out;
}

inline std::size_t window_count(std::size_t length, std::size_t window, std::size_t stride) {
  if (length < window) return 0;
  return (length - window) / stride + 1;
}

inline std::vector<std::size_t> window_starts(std::size_t length, const DatasetDescriptor& d) {
  validate(d);
  if (length < d.window_size) {
    throw StructuralError("make_windows: series of " + std::to_string(length) + " samples shorter than window " +
                          std::to_string(d.window_size));
  }
  std::vector<std::size_t> starts(window_count(length, d.window_size, d.stride));
  for (std::size_t k = 0; k < starts.size(); ++k) starts[k] = k * d.stride;
  return starts;
}

// Each window is a (6 x window_size) tensor copied from a contiguous sample run.
inline std::vector<Tensor2<double>> make_windows(const InertialSeries& series, const DatasetDescriptor& d) {
  const auto starts = window_starts(series.size(), d);
  std::vector<Tensor2<double>> windows;
  windows.reserve(starts.size());
  for (std::size_t s : starts) {
    Tensor2<double> w(kImuChannels, d.window_size);
    for (std::size_t t = 0; t < d.window_size; ++t) {
      for (std::size_t c = 0; c < kImuChannels; ++c) w(c, t) = series[s + t].channel(c);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

// distance_xy: planar arc length along the window's track; position_xy: end - start in the
// plane; heading: heading at the last sample of the window.
inline std::vector<double> window_label(const AlignedTargets& targets, std::size_t start, std::size_t length,
                                        TargetKind kind) {
  const std::size_t end = start + length;  // exclusive
  switch (kind) {
    case TargetKind::kDistanceXY: {
      if (targets.position.size() < end) throw CoverageError("extract_labels: no position coverage for window");
      double distance = 0.0;
      for (std::size_t i = start + 1; i < end; ++i) {
        distance += std::hypot(targets.position[i][0] - targets.position[i - 1][0],
                               targets.position[i][1] - targets.position[i - 1][1]);
      }
      return {distance};
    }
    case TargetKind::kPositionXY: {
      if (targets.position.size() < end) throw CoverageError("extract_labels: no position coverage for window");
      return {targets.position[end - 1][0] - targets.position[start][0],
              targets.position[end - 1][1] - targets.position[start][1]};
    }
    case TargetKind::kHeading: {
      if (targets.heading.size() < end) throw CoverageError("extract_labels: no heading coverage for window");
      return {targets.heading[end - 1]};
    }
  }
  return {};
}

inline std::vector<std::vector<double>> extract_labels(const std::vector<std::size_t>& starts, std::size_t window_size,
                                                       const AlignedTargets& targets, TargetKind kind) {
  std::vector<std::vector<double>> labels;
  labels.reserve(starts.size());
  for (std::size_t s : starts) labels.push_back(window_label(targets, s, window_size, kind));
  return labels;
}

struct WindowedDataset {
  std::vector<Tensor2<double>> windows;
  std::vector<std::vector<double>> labels;
  DatasetDescriptor descriptor;

  std::size_t size() const { return windows.size(); }
  std::size_t label_dim() const { return labels.empty() ? target_dim(descriptor.target_kind) : labels.front().size(); }

  friend bool operator==(const WindowedDataset&, const WindowedDataset&) = default;
};

inline void validate(const WindowedDataset& ds) {
  if (ds.windows.size() != ds.labels.size()) throw StructuralError("dataset: window/label count mismatch");
  for (const auto& w : ds.windows) require_finite(w, "dataset window");
}

inline WindowedDataset build_windowed_dataset(const InertialSeries& series, const AlignedTargets& targets,
                                              const DatasetDescriptor& d) {
  WindowedDataset ds;
  ds.descriptor = d;
  ds.windows = make_windows(series, d);
  ds.labels = extract_labels(window_starts(series.size(), d), d.window_size, targets, d.target_kind);
  return ds;
}

}  // namespace inertia
