#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/rng.hpp"

namespace inertia {

using Mat3 = std::array<std::array<double, 3>, 3>;

enum class RotationAxis { kT1, kT2, kT3 };

inline std::string_view to_string(RotationAxis a) {
  switch (a) {
    case RotationAxis::kT1: return "T1";
    case RotationAxis::kT2: return "T2";
    case RotationAxis::kT3: return "T3";
  }
  return "?";
}

inline RotationAxis rotation_axis_from_string(std::string_view s) {
  if (s == "T1") return RotationAxis::kT1;
  if (s == "T2") return RotationAxis::kT2;
  if (s == "T3") return RotationAxis::kT3;
  throw ConfigError("unknown rotation matrix '" + std::string(s) + "' (expected T1, T2 or T3)");
}

// pi/6 rotations: T1 about z, T2 about x, T3 about y.
inline Mat3 rotation_matrix(RotationAxis which) {
  const double c = std::cos(std::numbers::pi / 6.0);
  const double s = std::sin(std::numbers::pi / 6.0);
  switch (which) {
    case RotationAxis::kT1: return {{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
    case RotationAxis::kT2: return {{{1.0, 0.0, 0.0}, {0.0, c, s}, {0.0, -s, c}}};
    case RotationAxis::kT3: return {{{c, 0.0, -s}, {0.0, 1.0, 0.0}, {s, 0.0, c}}};
  }
  return {};
}

inline Mat3 identity3() { return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }

inline std::array<double, 3> multiply(const Mat3& R, const std::array<double, 3>& v) {
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = R[i][0] * v[0] + R[i][1] * v[1] + R[i][2] * v[2];
  return out;
}

// Applies R to the accelerometer triple and to the gyroscope triple of every sample.
inline Tensor2<double> rotate_samples(const Tensor2<double>& window, const Mat3& R) {
  if (window.channels != 6) throw StructuralError("rotate_samples: window must have 6 channels");
  Tensor2<double> out(window.channels, window.steps);
  for (std::size_t t = 0; t < window.steps; ++t) {
    for (std::size_t base : {std::size_t{0}, std::size_t{3}}) {
      const auto r = multiply(R, {window(base, t), window(base + 1, t), window(base + 2, t)});
      for (std::size_t k = 0; k < 3; ++k) out(base + k, t) = r[k];
    }
  }
  return out;
}

enum class AugmentKind { kRotation, kBias, kNoise };

inline std::string_view to_string(AugmentKind k) {
  switch (k) {
    case AugmentKind::kRotation: return "rotation";
    case AugmentKind::kBias: return "bias";
    case AugmentKind::kNoise: return "noise";
  }
  return "?";
}

inline AugmentKind augment_kind_from_string(std::string_view s) {
  if (s == "rotation") return AugmentKind::kRotation;
  if (s == "bias") return AugmentKind::kBias;
  if (s == "noise") return AugmentKind::kNoise;
  throw ConfigError("unknown augmentation kind '" + std::string(s) + "'");
}

struct NoiseLevel {
  double sigma_acc = 0.1;
  double sigma_gyro = 0.001;
  friend bool operator==(const NoiseLevel&, const NoiseLevel&) = default;
};

// Single draw at (0.1, 0.001), or the three-copy schedule 0.1 / 0.25 / 0.5 with the gyro
// level scaled by the same factors.
inline std::vector<NoiseLevel> default_noise_schedule(std::size_t copies) {
  if (copies == 3) return {{0.1, 0.001}, {0.25, 0.0025}, {0.5, 0.005}};
  if (copies == 1) return {{0.1, 0.001}};
  throw DomainError("default noise schedule exists for 1 or 3 copies only");
}

struct AugmentationSpec {
  AugmentKind kind = AugmentKind::kRotation;
  std::vector<RotationAxis> rotation_axes{RotationAxis::kT1};
  double bias_std_acc = 0.1;
  double bias_std_gyro = 0.001;
  std::size_t bias_copies = 1;
  std::vector<NoiseLevel> noise_schedule = default_noise_schedule(1);

  friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

inline void validate(const AugmentationSpec& spec) {
  switch (spec.kind) {
    case AugmentKind::kRotation:
      if (spec.rotation_axes.empty()) throw DomainError("rotation augmentation: no rotation matrices selected");
      break;
    case AugmentKind::kBias:
      if (!(spec.bias_std_acc >= 0.0) || !(spec.bias_std_gyro >= 0.0)) {
        throw DomainError("bias augmentation: standard deviations must be >= 0");
      }
      if (spec.bias_copies < 1) throw DomainError("bias augmentation: copies must be >= 1");
      break;
    case AugmentKind::kNoise:
      if (spec.noise_schedule.empty()) throw DomainError("noise augmentation: empty schedule");
      for (const auto& n : spec.noise_schedule) {
        if (!(n.sigma_acc >= 0.0) || !(n.sigma_gyro >= 0.0)) {
          throw DomainError("noise augmentation: standard deviations must be >= 0");
        }
      }
      break;
  }
}

namespace detail {

inline void require_kind(const AugmentationSpec& spec, AugmentKind kind) {
  validate(spec);
  if (spec.kind != kind) throw UsageError("augmentation spec kind does not match the requested augmentation");
}

inline void append_copy(WindowedDataset& out, const WindowedDataset& original, std::vector<Tensor2<double>> windows) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.windows.push_back(std::move(windows[i]));
    out.labels.push_back(original.labels[i]);
  }
}

}  // namespace detail

// One bias vector per copy, constant across that whole copy.
inline std::vector<std::array<double, 6>> draw_bias_vectors(const AugmentationSpec& spec, Rng& rng) {
  std::vector<std::array<double, 6>> biases(spec.bias_copies);
  for (auto& b : biases) {
    for (std::size_t c = 0; c < 6; ++c) b[c] = (c < 3 ? spec.bias_std_acc : spec.bias_std_gyro) * rng.normal();
  }
  return biases;
}

inline WindowedDataset augment_bias(const WindowedDataset& dataset, const AugmentationSpec& spec, Rng& rng) {
  detail::require_kind(spec, AugmentKind::kBias);
  validate(dataset);
  WindowedDataset out = dataset;
  for (const auto& b : draw_bias_vectors(spec, rng)) {
    std::vector<Tensor2<double>> copy = dataset.windows;
    for (auto& w : copy) {
      for (std::size_t c = 0; c < w.channels; ++c) {
        for (double& v : w.row(c)) v += b[c];
      }
    }
    detail::append_copy(out, dataset, std::move(copy));
  }
  return out;
}

inline WindowedDataset augment_noise(const WindowedDataset& dataset, const AugmentationSpec& spec, Rng& rng) {
  detail::require_kind(spec, AugmentKind::kNoise);
  validate(dataset);
  WindowedDataset out = dataset;
  for (const auto& level : spec.noise_schedule) {
    std::vector<Tensor2<double>> copy = dataset.windows;
    for (auto& w : copy) {
      for (std::size_t t = 0; t < w.steps; ++t) {
        for (std::size_t c = 0; c < w.channels; ++c) {
          w(c, t) += (c < 3 ? level.sigma_acc : level.sigma_gyro) * rng.normal();
        }
      }
    }
    detail::append_copy(out, dataset, std::move(copy));
  }
  return out;
}

inline WindowedDataset augment_rotation(const WindowedDataset& dataset, const AugmentationSpec& spec) {
  detail::require_kind(spec, AugmentKind::kRotation);
  validate(dataset);
  WindowedDataset out = dataset;
  for (RotationAxis axis : spec.rotation_axes) {
    const Mat3 R = rotation_matrix(axis);
    std::vector<Tensor2<double>> copy;
    copy.reserve(dataset.size());
    for (const auto& w : dataset.windows) copy.push_back(rotate_samples(w, R));
    detail::append_copy(out, dataset, std::move(copy));
  }
  return out;
}

inline WindowedDataset augment(const WindowedDataset& dataset, const AugmentationSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case AugmentKind::kRotation: return augment_rotation(dataset, spec);
    case AugmentKind::kBias: return augment_bias(dataset, spec, rng);
    case AugmentKind::kNoise: return augment_noise(dataset, spec, rng);
  }
  return dataset;
}

inline std::size_t augmentation_multiplier(const AugmentationSpec& spec) {
  switch (spec.kind) {
    case AugmentKind::kRotation: return 1 + spec.rotation_axes.size();
    case AugmentKind::kBias: return 1 + spec.bias_copies;
    case AugmentKind::kNoise: return 1 + spec.noise_schedule.size();
  }
  return 1;
}

}  // namespace inertia
