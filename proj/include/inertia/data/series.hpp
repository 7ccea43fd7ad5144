#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "inertia/error.hpp"

namespace inertia {

using Vec3 = std::array<double, 3>;

inline constexpr std::size_t kImuChannels = 6;
inline constexpr double kGravity = 9.80665;

inline const std::array<std::string, kImuChannels>& imu_channel_names() {
  static const std::array<std::string, kImuChannels> names{"fx", "fy", "fz", "wx", "wy", "wz"};
  return names;
}

// Specific force f (m/s^2) and angular rate w (rad/s) in the sensor frame.
struct InertialSample {
  double t = 0.0;
  Vec3 f{};
  Vec3 w{};

  double channel(std::size_t c) const { return c < 3 ? f[c] : w[c - 3]; }
  double& channel(std::size_t c) { return c < 3 ? f[c] : w[c - 3]; }

  friend bool operator==(const InertialSample&, const InertialSample&) = default;
};

using InertialSeries = std::vector<InertialSample>;

// Ground truth stream; position and/or heading may be present.
struct GroundTruth {
  std::vector<double> t;
  std::vector<Vec3> position;  // meters, empty if absent
  std::vector<double> heading;  // radians, empty if absent

  bool has_position() const { return !position.empty(); }
  bool has_heading() const { return !heading.empty(); }
  std::size_t size() const { return t.size(); }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

inline void require_monotonic(const std::vector<double>& t, const std::string& what) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw DataError(what + ": timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

inline void validate(const InertialSeries& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (!std::isfinite(s.t)) throw DataError("series: non-finite timestamp at index " + std::to_string(i));
    for (std::size_t c = 0; c < kImuChannels; ++c) {
      if (!std::isfinite(s.channel(c))) throw DataError("series: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && !(s.t > series[i - 1].t)) {
      throw DataError("series: timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

inline std::vector<double> timestamps(const InertialSeries& series) {
  std::vector<double> t(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) t[i] = series[i].t;
  return t;
}

inline std::vector<double> channel_values(const InertialSeries& series, std::size_t c) {
  std::vector<double> v(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) v[i] = series[i].channel(c);
  return v;
}

}  // namespace inertia
