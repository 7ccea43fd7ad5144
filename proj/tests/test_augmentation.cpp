#include <gtest/gtest.h>

#include <cmath>

#include "derived_oracles.hpp"
#include "inertia/augmentation.hpp"

using namespace inertia;

namespace {

WindowedDataset random_dataset(Rng& rng, std::size_t n = 5, std::size_t steps = 40) {
  WindowedDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    ds.windows.push_back(oracles::random_tensor(6, steps, rng));
    ds.labels.push_back({rng.uniform(0.0, 3.0)});
  }
  return ds;
}

AugmentationSpec spec_of(AugmentKind kind) {
  AugmentationSpec s;
  s.kind = kind;
  return s;
}

void expect_prefix_and_labels(const WindowedDataset& in, const WindowedDataset& out, std::size_t multiplier) {
  ASSERT_EQ(out.size(), multiplier * in.size());
  ASSERT_EQ(out.labels.size(), out.windows.size());
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(out.windows[i], in.windows[i]);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out.labels[i], in.labels[i % in.size()]);
}

}  // namespace

TEST(RotationMatrix, T2FixesXAxisAndIdentityLeavesWindow) {
  const auto v = multiply(rotation_matrix(RotationAxis::kT2), {1, 0, 0});
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
  Rng rng(1);
  const auto w = oracles::random_tensor(6, 10, rng);
  EXPECT_EQ(rotate_samples(w, identity3()), w);
}

TEST(RotationMatrix, AxesFixedByEachMatrix) {
  const auto z = multiply(rotation_matrix(RotationAxis::kT1), {0, 0, 1});
  EXPECT_NEAR(z[2], 1.0, 1e-15);
  const auto y = multiply(rotation_matrix(RotationAxis::kT3), {0, 1, 0});
  EXPECT_NEAR(y[1], 1.0, 1e-15);
  EXPECT_THROW(rotation_axis_from_string("T4"), ConfigError);
}

TEST(RotateSamples, PreservesPerSampleNorms) {
  Rng rng(2);
  const auto w = oracles::random_tensor(6, 100, rng);
  for (auto axis : {RotationAxis::kT1, RotationAxis::kT2, RotationAxis::kT3}) {
    const auto r = rotate_samples(w, rotation_matrix(axis));
    for (std::size_t t = 0; t < w.steps; ++t) {
      for (std::size_t g = 0; g < 6; g += 3) {
        const double a = std::hypot(w(g, t), w(g + 1, t), w(g + 2, t));
        const double b = std::hypot(r(g, t), r(g + 1, t), r(g + 2, t));
        EXPECT_NEAR(a, b, 1e-9);
      }
    }
  }
}

TEST(Augment, RotationMultipliers) {
  Rng rng(3);
  const auto ds = random_dataset(rng);
  auto s = spec_of(AugmentKind::kRotation);
  expect_prefix_and_labels(ds, augment(ds, s, rng), 2);
  s.rotation_axes = {RotationAxis::kT1, RotationAxis::kT2, RotationAxis::kT3};
  const auto out = augment(ds, s, rng);
  expect_prefix_and_labels(ds, out, 4);
  EXPECT_EQ(augmentation_multiplier(s), 4u);
  EXPECT_EQ(out.windows[2 * ds.size() + 1], rotate_samples(ds.windows[1], rotation_matrix(RotationAxis::kT2)));
}

TEST(Augment, BiasCopiesAreChannelConstantShifts) {
  Rng rng(4);
  const auto ds = random_dataset(rng);
  auto s = spec_of(AugmentKind::kBias);
  s.bias_copies = 3;
  Rng arng(5);
  const auto out = augment(ds, s, arng);
  expect_prefix_and_labels(ds, out, 4);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t c = 0; c < 6; ++c) {
      std::vector<double> diff;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t t = 0; t < ds.windows[i].steps; ++t) diff.push_back(out.windows[k * ds.size() + i](c, t) - ds.windows[i](c, t));
      }
      double m = 0.0, v = 0.0;
      for (double d : diff) m += d;
      m /= static_cast<double>(diff.size());
      for (double d : diff) v += (d - m) * (d - m);
      EXPECT_LT(v / static_cast<double>(diff.size()), 1e-18);
    }
  }
}

TEST(Augment, ZeroBiasCopiesEqualOriginals) {
  Rng rng(6);
  const auto ds = random_dataset(rng);
  auto s = spec_of(AugmentKind::kBias);
  s.bias_std_acc = s.bias_std_gyro = 0.0;
  const auto out = augment(ds, s, rng);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(out.windows[ds.size() + i], ds.windows[i]);
}

TEST(Augment, NoiseMultipliersAndZeroMean) {
  Rng rng(7);
  const auto ds = random_dataset(rng, 20, 200);
  auto s = spec_of(AugmentKind::kNoise);
  expect_prefix_and_labels(ds, augment(ds, s, rng), 2);
  s.noise_schedule = default_noise_schedule(3);
  const auto out = augment(ds, s, rng);
  expect_prefix_and_labels(ds, out, 4);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t t = 0; t < 200; ++t) {
      sum += out.windows[3 * ds.size() + i](0, t) - ds.windows[i](0, t);
      ++n;
    }
  }
  EXPECT_LT(std::abs(sum / static_cast<double>(n)), 0.05);
}

TEST(Augment, NoiseScheduleValues) {
  const auto s = default_noise_schedule(3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (NoiseLevel{0.1, 0.001}));
  EXPECT_EQ(s[1], (NoiseLevel{0.25, 0.0025}));
  EXPECT_EQ(s[2], (NoiseLevel{0.5, 0.005}));
  EXPECT_THROW(default_noise_schedule(2), DomainError);
}

TEST(Augment, SameSeedSameOutput) {
  Rng rng(8);
  const auto ds = random_dataset(rng);
  for (auto kind : {AugmentKind::kBias, AugmentKind::kNoise}) {
    Rng a(3), b(3);
    EXPECT_EQ(augment(ds, spec_of(kind), a), augment(ds, spec_of(kind), b));
  }
}

TEST(Augment, SpecValidation) {
  Rng rng(9);
  const auto ds = random_dataset(rng);
  auto s = spec_of(AugmentKind::kRotation);
  s.rotation_axes.clear();
  EXPECT_THROW(augment(ds, s, rng), DomainError);
  s = spec_of(AugmentKind::kNoise);
  s.noise_schedule.clear();
  EXPECT_THROW(augment(ds, s, rng), DomainError);
  s = spec_of(AugmentKind::kBias);
  s.bias_std_acc = -1.0;
  EXPECT_THROW(augment(ds, s, rng), DomainError);
  EXPECT_THROW(augment_bias(ds, spec_of(AugmentKind::kNoise), rng), UsageError);
}

TEST(Augment, DistanceLabelsInvariantToTrackRotation) {
  // same track started at a different heading: sensor readings and labels must not change
  SynthSpec s;
  s.kind = SynthKind::kCircleLine;
  s.duration = 12.0;
  const auto base = synthesize_dataset(s);
  s.heading = 1.1;
  const auto turned = synthesize_dataset(s);
  const DatasetDescriptor d;
  const auto a = build_windowed_dataset(base.series, align_gt(base.series, base.gt), d);
  const auto b = build_windowed_dataset(turned.series, align_gt(turned.series, turned.gt), d);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.labels[i][0], b.labels[i][0], 1e-9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a.windows[i].size(); ++k) EXPECT_NEAR(a.windows[i].data[k], b.windows[i].data[k], 1e-9);
  }
}
