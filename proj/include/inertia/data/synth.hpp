#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/data/series.hpp"
#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/rng.hpp"

namespace inertia {

enum class SynthKind { kLine, kCircle, kSinusoid, kCircleLine };

inline std::string_view to_string(SynthKind k) {
  switch (k) {
    case SynthKind::kLine: return "line";
    case SynthKind::kCircle: return "circle";
    case SynthKind::kSinusoid: return "sinusoid";
    case SynthKind::kCircleLine: return "circle_line";
  }
  return "?";
}

inline SynthKind synth_kind_from_string(std::string_view s) {
  if (s == "line") return SynthKind::kLine;
  if (s == "circle") return SynthKind::kCircle;
  if (s == "sinusoid") return SynthKind::kSinusoid;
  if (s == "circle_line") return SynthKind::kCircleLine;
  throw ConfigError("unknown synthetic trajectory kind '" + std::string(s) + "'");
}

struct SynthSpec {
  SynthKind kind = SynthKind::kCircleLine;
  double duration = 60.0;  // s
  double rate = 120.0;     // IMU Hz
  double gt_rate = 0.0;    // GT Hz, 0 = same as IMU
  double speed = 1.0;      // m/s (initial speed for circle_line)
  double heading = 0.0;    // initial heading, rad
  double radius = 1.0;     // circle / circle_line turn radius, m
  double amplitude = 1.0;  // sinusoid lateral amplitude, m
  double frequency = 0.2;  // sinusoid lateral frequency, Hz
  double accel = 0.2;      // circle_line tangential acceleration on straight legs, m/s^2
  double segment = 5.0;    // circle_line segment duration, s
  double noise_acc = 0.0;  // m/s^2, white
  double noise_gyro = 0.0;  // rad/s, white
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

inline void validate(const SynthSpec& s) {
  if (!(s.duration > 0.0) || !(s.rate > 0.0) || s.gt_rate < 0.0) {
    throw DomainError("synth: duration and rate must be > 0, gt_rate >= 0");
  }
  if (s.noise_acc < 0.0 || s.noise_gyro < 0.0) throw DomainError("synth: noise levels must be >= 0");
  if ((s.kind == SynthKind::kCircle || s.kind == SynthKind::kCircleLine) && !(s.radius > 0.0)) {
    throw DomainError("synth: radius must be > 0");
  }
  if (s.kind == SynthKind::kCircleLine && !(s.segment > 0.0)) throw DomainError("synth: segment must be > 0");
  if (!(s.speed >= 0.0)) throw DomainError("synth: speed must be >= 0");
}

// Planar kinematic state; the body x axis points along the velocity (yaw = heading).
struct KinematicState {
  Vec3 position{};
  Vec3 velocity{};
  Vec3 acceleration{};  // navigation frame, gravity excluded
  double yaw = 0.0;     // unwrapped
  double yaw_rate = 0.0;
};

struct SyntheticData {
  InertialSeries series;
  GroundTruth gt;  // position and heading
  KinematicState initial;
};

namespace detail {

// Constant tangential acceleration + constant turn rate, starting from a known state.
struct PathSegment {
  double t0 = 0.0;
  double duration = 0.0;
  std::complex<double> p0;
  double v0 = 0.0;
  double psi0 = 0.0;
  double accel = 0.0;
  double turn_rate = 0.0;

  KinematicState at(double t) const {
    using namespace std::complex_literals;
    const double tau = t - t0;
    const double v = v0 + accel * tau;
    const double psi = psi0 + turn_rate * tau;
    const std::complex<double> heading0 = std::polar(1.0, psi0);
    std::complex<double> p;
    if (std::abs(turn_rate) < 1e-12) {
      p = p0 + (v0 * tau + 0.5 * accel * tau * tau) * heading0;
    } else {
      // Closed form of the integral of (v0 + a s) exp(i(psi0 + W s)) ds over [0, tau].
      const double w = turn_rate;
      auto primitive = [&](double s) {
        return ((v0 + accel * s) / (1i * w) + accel / (w * w)) * std::polar(1.0, w * s);
      };
      p = p0 + heading0 * (primitive(tau) - primitive(0.0));
    }
    const std::complex<double> dir = std::polar(1.0, psi);
    const std::complex<double> vel = v * dir;
    const std::complex<double> acc = accel * dir + v * turn_rate * 1i * dir;
    KinematicState s;
    s.position = {p.real(), p.imag(), 0.0};
    s.velocity = {vel.real(), vel.imag(), 0.0};
    s.acceleration = {acc.real(), acc.imag(), 0.0};
    s.yaw = psi;
    s.yaw_rate = turn_rate;
    return s;
  }
};

inline std::vector<PathSegment> build_segments(const SynthSpec& spec) {
  std::vector<PathSegment> segs;
  auto append = [&](double duration, double accel, double turn_rate) {
    PathSegment s;
    if (segs.empty()) {
      s.p0 = {0.0, 0.0};
      s.v0 = spec.speed;
      s.psi0 = spec.heading;
    } else {
      const auto& prev = segs.back();
      const auto end = prev.at(prev.t0 + prev.duration);
      s.t0 = prev.t0 + prev.duration;
      s.p0 = {end.position[0], end.position[1]};
      s.v0 = prev.v0 + prev.accel * prev.duration;
      s.psi0 = end.yaw;
    }
    s.duration = duration;
    s.accel = accel;
    s.turn_rate = turn_rate;
    segs.push_back(s);
  };

  switch (spec.kind) {
    case SynthKind::kLine:
      append(spec.duration, 0.0, 0.0);
      break;
    case SynthKind::kCircle:
      append(spec.duration, 0.0, spec.speed / spec.radius);
      break;
    case SynthKind::kCircleLine: {
      // Repeating cycle: speed up along a line, left arc, slow down along a line, right arc.
      const double T = spec.segment;
      const double v_fast = spec.speed + spec.accel * T;
      double t = 0.0;
      for (std::size_t k = 0; t < spec.duration; ++k, t += T) {
        switch (k % 4) {
          case 0: append(T, spec.accel, 0.0); break;
          case 1: append(T, 0.0, v_fast / spec.radius); break;
          case 2: append(T, -spec.accel, 0.0); break;
          case 3: append(T, 0.0, -spec.speed / spec.radius); break;
        }
      }
      break;
    }
    case SynthKind::kSinusoid:
      break;
  }
  return segs;
}

// x = v t, y = A sin(2 pi f t); heading follows the velocity.
inline KinematicState sinusoid_state(const SynthSpec& spec, double t) {
  const double w = 2.0 * std::numbers::pi * spec.frequency;
  const double A = spec.amplitude;
  const double v = spec.speed;
  KinematicState s;
  s.position = {v * t, A * std::sin(w * t), 0.0};
  s.velocity = {v, A * w * std::cos(w * t), 0.0};
  s.acceleration = {0.0, -A * w * w * std::sin(w * t), 0.0};
  const double vx = s.velocity[0], vy = s.velocity[1];
  const double ax = s.acceleration[0], ay = s.acceleration[1];
  s.yaw = std::atan2(vy, vx);
  const double speed2 = vx * vx + vy * vy;
  s.yaw_rate = speed2 > 0.0 ? (vx * ay - vy * ax) / speed2 : 0.0;
  return s;
}

}  // namespace detail

// Analytic kinematic state at time t.
class Trajectory {
 public:
  explicit Trajectory(SynthSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    segments_ = detail::build_segments(spec_);
  }

  KinematicState at(double t) const {
    if (spec_.kind == SynthKind::kSinusoid) return detail::sinusoid_state(spec_, t);
    std::size_t k = 0;
    while (k + 1 < segments_.size() && t >= segments_[k + 1].t0) ++k;
    return segments_[k].at(t);
  }

  // Specific force and angular rate in the body frame (x forward, y left, z up).
  InertialSample measure(double t) const {
    const auto s = at(t);
    const double c = std::cos(s.yaw), sn = std::sin(s.yaw);
    InertialSample m;
    m.t = t;
    m.f = {c * s.acceleration[0] + sn * s.acceleration[1], -sn * s.acceleration[0] + c * s.acceleration[1],
           s.acceleration[2] + kGravity};
    m.w = {0.0, 0.0, s.yaw_rate};
    return m;
  }

  const SynthSpec& spec() const { return spec_; }

 private:
  SynthSpec spec_;
  std::vector<detail::PathSegment> segments_;
};

// Samples cover [0, duration] at the IMU rate; the GT stream is extended to the last
// IMU timestamp when its own grid stops short of it.
inline SyntheticData synthesize_dataset(const SynthSpec& spec) {
  const Trajectory traj(spec);
  const auto n = static_cast<std::size_t>(std::floor(spec.duration * spec.rate + 1e-9)) + 1;
  const double gt_rate = spec.gt_rate > 0.0 ? spec.gt_rate : spec.rate;
  const auto m = static_cast<std::size_t>(std::floor(spec.duration * gt_rate + 1e-9)) + 1;

  Rng rng(spec.seed);
  SyntheticData out;
  out.initial = traj.at(0.0);
  out.series.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto sample = traj.measure(static_cast<double>(i) / spec.rate);
    if (spec.noise_acc > 0.0 || spec.noise_gyro > 0.0) {
      for (double& v : sample.f) v += spec.noise_acc * rng.normal();
      for (double& v : sample.w) v += spec.noise_gyro * rng.normal();
    }
    out.series.push_back(sample);
  }

  auto push_gt = [&](double t) {
    const auto s = traj.at(t);
    out.gt.t.push_back(t);
    out.gt.position.push_back(s.position);
    out.gt.heading.push_back(wrap_angle(s.yaw));
  };
  for (std::size_t k = 0; k < m; ++k) push_gt(static_cast<double>(k) / gt_rate);
  if (out.gt.t.back() < out.series.back().t) push_gt(out.series.back().t);
  return out;
}

}  // namespace inertia
