#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "derived_oracles.hpp"
#include "inertia/data/csv.hpp"
#include "inertia/data/synth.hpp"
#include "inertia/data/windowing.hpp"

using namespace inertia;

namespace {

InertialSeries parse_imu(const std::string& text) {
  std::istringstream in(text);
  return parse_imu_csv(in, "imu.csv");
}

SyntheticData synth(SynthKind kind, double duration, double rate = 120.0) {
  SynthSpec s;
  s.kind = kind;
  s.duration = duration;
  s.rate = rate;
  return synthesize_dataset(s);
}

}  // namespace

TEST(ImuCsv, ParsesWellFormedRows) {
  const auto s = parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,3,4,5,6\n0.01, -1e-3,0,9.8,0,0,0.5\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].t, 0.01);
  EXPECT_EQ(s[1].f[0], -1e-3);
  EXPECT_EQ(s[0].w[2], 6.0);
}

TEST(ImuCsv, ShortRowNamesLine) {
  try {
    parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,3,4,5,6\n0.1,1,2,3,4,5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(std::string(e.what()).rfind("imu.csv:3:", 0), 0u);
  }
}

TEST(ImuCsv, MalformedInputs) {
  EXPECT_THROW(parse_imu("t,fx,fy,fz,wx,wy\n0,1,2,3,4,5\n"), ParseError);
  EXPECT_THROW(parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,x,4,5,6\n"), ParseError);
  EXPECT_THROW(parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,3,4,5,6,7\n"), ParseError);
  EXPECT_THROW(parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,nan,4,5,6\n"), ParseError);
  EXPECT_THROW(parse_imu("t,fx,fy,fz,wx,wy,wz\n0,1,2,3,4,5,6\n0,1,2,3,4,5,6\n"), DataError);
}

TEST(GtCsv, PositionAndHeading) {
  std::istringstream pos("t,px,py,pz\n0,0,0,0\n1,2,3,4\n");
  const auto g = parse_gt_pos_csv(pos, "gt_pos.csv");
  EXPECT_TRUE(g.has_position());
  EXPECT_EQ(g.position[1][2], 4.0);
  std::istringstream yaw("t,yaw\n0,0.5\n1,0.25\n");
  EXPECT_EQ(parse_gt_heading_csv(yaw, "gt_heading.csv").heading[1], 0.25);
  std::istringstream bad("t,yaw\n1,0\n0.5,0\n");
  EXPECT_THROW(parse_gt_heading_csv(bad, "gt_heading.csv"), DataError);
}

TEST(Csv, WriteParseRoundTripIsBitExact) {
  SynthSpec s;
  s.duration = 5.0;
  s.noise_acc = 0.03;
  s.noise_gyro = 0.001;
  s.seed = 4;
  const auto d = synthesize_dataset(s);
  std::stringstream imu, pos, yaw;
  write_imu_csv(imu, d.series);
  write_gt_pos_csv(pos, d.gt);
  write_gt_heading_csv(yaw, d.gt);
  EXPECT_EQ(parse_imu_csv(imu), d.series);
  const auto p = parse_gt_pos_csv(pos);
  EXPECT_EQ(p.t, d.gt.t);
  EXPECT_EQ(p.position, d.gt.position);
  EXPECT_EQ(parse_gt_heading_csv(yaw).heading, d.gt.heading);
}

TEST(AlignGt, ConstantAndCoverage) {
  GroundTruth gt;
  gt.t = {0.0, 1.0, 2.0};
  gt.position = {{3, 4, 0}, {3, 4, 0}, {3, 4, 0}};
  InertialSeries s(5);
  for (std::size_t i = 0; i < 5; ++i) s[i].t = 0.5 * static_cast<double>(i);
  for (const auto& p : align_gt(s, gt).position) EXPECT_EQ(p, (Vec3{3, 4, 0}));
  s.back().t = 2.01;
  EXPECT_THROW(align_gt(s, gt), CoverageError);
}

TEST(Windows, CountMatchesEnumeration) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 1 + rng.below(20), s = 1 + rng.below(10), T = w + rng.below(60);
    std::size_t brute = 0;
    for (std::size_t start = 0; start + w <= T; start += s) ++brute;
    EXPECT_EQ(window_starts(T, {"x", 100, w, s}).size(), brute);
  }
  EXPECT_EQ(window_starts(120, {"x", 100, 120, 60}).size(), 1u);
  EXPECT_THROW(window_starts(119, {"x", 100, 120, 60}), StructuralError);
}

TEST(Windows, ContiguousAndRegenerable) {
  const auto d = synth(SynthKind::kCircleLine, 8.0);
  const DatasetDescriptor desc{"x", 120, 50, 30};
  const auto a = make_windows(d.series, desc);
  EXPECT_EQ(a, make_windows(d.series, desc));
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t t = 0; t < 50; ++t) EXPECT_EQ(a[k](2, t), d.series[k * 30 + t].f[2]);
  }
}

TEST(Labels, StationaryTrackAndCoverage) {
  const auto d = synth(SynthKind::kLine, 2.0);
  AlignedTargets still;
  still.position.assign(100, Vec3{1, 1, 0});
  EXPECT_EQ(window_label(still, 0, 100, TargetKind::kDistanceXY)[0], 0.0);
  EXPECT_THROW(window_label(still, 50, 60, TargetKind::kDistanceXY), CoverageError);
  EXPECT_THROW(window_label(still, 0, 10, TargetKind::kHeading), CoverageError);
}

TEST(Labels, PositionAndHeadingTargets) {
  const auto d = synth(SynthKind::kLine, 3.0);
  const auto t = align_gt(d.series, d.gt);
  const auto disp = window_label(t, 0, 121, TargetKind::kPositionXY);
  EXPECT_NEAR(disp[0], 1.0, 1e-9);
  EXPECT_NEAR(disp[1], 0.0, 1e-12);
  EXPECT_NEAR(window_label(t, 0, 121, TargetKind::kHeading)[0], 0.0, 1e-12);
}

TEST(Labels, DistanceInvariantUnderTrackRotation) {
  const auto d = synth(SynthKind::kCircleLine, 30.0);
  const auto t = align_gt(d.series, d.gt);
  for (double angle : {0.3, 2.0, -1.7}) {
    AlignedTargets r = t;
    const double c = std::cos(angle), s = std::sin(angle);
    for (auto& p : r.position) p = {c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
    for (std::size_t start = 0; start + 120 <= t.t.size(); start += 60) {
      EXPECT_NEAR(window_label(r, start, 120, TargetKind::kDistanceXY)[0],
                  window_label(t, start, 120, TargetKind::kDistanceXY)[0], 1e-9);
    }
  }
}

TEST(Synth, ConstantVelocityLine) {
  for (const auto& s : synth(SynthKind::kLine, 2.0).series) {
    EXPECT_EQ(s.f, (Vec3{0, 0, kGravity}));
    EXPECT_EQ(s.w, (Vec3{0, 0, 0}));
  }
}

TEST(Synth, SameSeedBitIdentical) {
  SynthSpec s;
  s.noise_acc = 0.1;
  s.seed = 9;
  const auto a = synthesize_dataset(s), b = synthesize_dataset(s);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.gt.position, b.gt.position);
  s.seed = 10;
  EXPECT_NE(a.series, synthesize_dataset(s).series);
}

TEST(Synth, DoubleIntegrationRecoversPositions) {
  // Rotate body-frame specific force into the navigation frame with the integrated gyro
  // heading, remove gravity, integrate twice with the trapezoid rule.
  for (auto kind : {SynthKind::kCircleLine, SynthKind::kSinusoid, SynthKind::kCircle}) {
    SynthSpec spec;
    spec.kind = kind;
    spec.duration = 10.0;
    spec.rate = 1000.0;
    spec.segment = 2.5;
    const auto d = synthesize_dataset(spec);
    const double dt = 1.0 / spec.rate;
    double yaw = d.initial.yaw;
    double vx = d.initial.velocity[0], vy = d.initial.velocity[1];
    double px = d.initial.position[0], py = d.initial.position[1];
    double path = 0.0;
    auto nav = [](const InertialSample& s, double psi) {
      return std::array<double, 3>{std::cos(psi) * s.f[0] - std::sin(psi) * s.f[1],
                                   std::sin(psi) * s.f[0] + std::cos(psi) * s.f[1], s.f[2] - kGravity};
    };
    for (std::size_t i = 1; i < d.series.size(); ++i) {
      const double yaw_next = yaw + 0.5 * dt * (d.series[i - 1].w[2] + d.series[i].w[2]);
      const auto a0 = nav(d.series[i - 1], yaw), a1 = nav(d.series[i], yaw_next);
      EXPECT_NEAR(a1[2], 0.0, 1e-12);
      const double vx1 = vx + 0.5 * dt * (a0[0] + a1[0]), vy1 = vy + 0.5 * dt * (a0[1] + a1[1]);
      px += 0.5 * dt * (vx + vx1);
      py += 0.5 * dt * (vy + vy1);
      path += 0.5 * dt * (std::hypot(vx, vy) + std::hypot(vx1, vy1));
      vx = vx1;
      vy = vy1;
      yaw = yaw_next;
    }
    const auto& end = d.gt.position.back();
    EXPECT_LT(std::hypot(px - end[0], py - end[1]), 1e-3 * path) << to_string(kind);
  }
}

TEST(Synth, GtResampledAtItsOwnRate) {
  SynthSpec s;
  s.duration = 3.05;
  s.gt_rate = 10.0;
  const auto d = synthesize_dataset(s);
  EXPECT_EQ(d.gt.t.front(), 0.0);
  EXPECT_EQ(d.gt.t.back(), d.series.back().t);
  EXPECT_NO_THROW(align_gt(d.series, d.gt));
}

TEST(Synth, InvalidSpec) {
  SynthSpec s;
  s.duration = 0.0;
  EXPECT_THROW(synthesize_dataset(s), DomainError);
  s = SynthSpec{};
  s.radius = 0.0;
  EXPECT_THROW(synthesize_dataset(s), DomainError);
  EXPECT_THROW(synth_kind_from_string("spiral"), ConfigError);
}

TEST(Descriptors, PresetsIncludeTextVariants) {
  const auto quad = dataset_preset("quadnet_horizontal");
  EXPECT_EQ(quad.window_size, 120u);
  EXPECT_EQ(quad.stride, 60u);
  EXPECT_EQ(dataset_preset("euroc_mav").stride, 100u);
  EXPECT_EQ(dataset_preset("euroc_mav_text").stride, 50u);
  EXPECT_EQ(dataset_preset("ronin").stride, 10u);
  EXPECT_EQ(dataset_preset("ronin_text").stride, 100u);
  EXPECT_THROW(dataset_preset("kitti"), ConfigError);
}
