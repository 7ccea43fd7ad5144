#include <gtest/gtest.h>

#include <cmath>

#include "derived_oracles.hpp"
#include "inertia/preprocessing.hpp"

using namespace inertia;

namespace {

InertialSeries random_series(Rng& rng, std::size_t n, double scale = 1.0) {
  InertialSeries s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].t = 0.01 * static_cast<double>(i);
    for (std::size_t c = 0; c < kImuChannels; ++c) s[i].channel(c) = scale * rng.normal() + static_cast<double>(c);
  }
  return s;
}

// Moves channel c of every sample to position perm[c].
InertialSeries permute(const InertialSeries& x, const std::array<std::size_t, 6>& perm) {
  InertialSeries out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < kImuChannels; ++c) out[i].channel(perm[c]) = x[i].channel(c);
  }
  return out;
}

double variance(const std::vector<double>& v) {
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(MovingAverage, ConstantAndIdentity) {
  InertialSeries x(10);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i].t = static_cast<double>(i);
    x[i].f = {2.0, 2.0, 2.0};
  }
  const auto y = moving_average(x, 4);
  ASSERT_EQ(y.size(), 7u);
  for (const auto& s : y) EXPECT_EQ(s.f[0], 2.0);
  Rng rng(1);
  const auto r = random_series(rng, 20);
  EXPECT_EQ(moving_average(r, 1), r);
}

TEST(MovingAverage, KeepsLeadingTimestamps) {
  Rng rng(2);
  const auto x = random_series(rng, 30);
  const auto y = moving_average(x, 5);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i].t, x[i].t);
}

TEST(MovingAverage, ReducesWhiteNoiseVariance) {
  Rng rng(3);
  const auto x = random_series(rng, 5000);
  for (std::size_t n : {2, 10, 50}) {
    const auto y = moving_average(x, n);
    for (std::size_t c = 0; c < kImuChannels; ++c) EXPECT_LE(variance(channel_values(y, c)), variance(channel_values(x, c)));
  }
}

TEST(MovingAverage, WindowLongerThanSeries) {
  Rng rng(4);
  EXPECT_THROW(moving_average(random_series(rng, 5), 6), StructuralError);
}

TEST(AddNoise, ZeroSigmaAndDeterminism) {
  Rng rng(5);
  const auto x = random_series(rng, 50);
  Rng a(9), b(9);
  EXPECT_EQ(add_measurement_noise(x, 0.0, 0.0, a), x);
  EXPECT_EQ(add_measurement_noise(x, 0.1, 0.001, a), add_measurement_noise(x, 0.1, 0.001, b));
}

TEST(AddNoise, GyroUsesItsOwnSigma) {
  InertialSeries x(50000);
  Rng rng(6);
  const auto y = add_measurement_noise(x, 0.1, 0.001, rng);
  const double sd = std::sqrt(variance(channel_values(y, 4)));
  EXPECT_NEAR(sd, 0.001, 0.00005);
}

TEST(Normalize, ZScoreMomentsOnTrainSplit) {
  Rng rng(7);
  const auto x = normalize(random_series(rng, 999, 3.0), NormalizeMethod::kZScore);
  for (std::size_t c = 0; c < kImuChannels; ++c) {
    const auto v = channel_values(x, c);
    double m = 0.0;
    for (double e : v) m += e;
    m /= static_cast<double>(v.size());
    EXPECT_LT(std::abs(m), 1e-9);
    EXPECT_LT(std::abs(std::sqrt(variance(v)) - 1.0), 1e-9);
  }
}

TEST(Normalize, TestSplitReusesTrainStatistics) {
  Rng rng(8);
  const auto train = random_series(rng, 200);
  auto test = random_series(rng, 80, 5.0);
  PreprocSpec spec{{NormalizeStep{NormalizeMethod::kZScore}}};
  Rng tr(1), te(2);
  const auto out = preprocess_series(spec, train, test, tr, te);
  ASSERT_EQ(out.normalization.size(), 1u);
  const auto stats = fit_normalization(train, NormalizeMethod::kZScore);
  EXPECT_EQ(out.normalization[0], stats);
  for (std::size_t i = 0; i < test.size(); ++i) {
    EXPECT_EQ(out.test[i].f[1], (test[i].f[1] - stats.center[1]) / stats.scale[1]);
  }
}

TEST(Normalize, DegenerateChannelIsNamed) {
  Rng rng(9);
  auto x = random_series(rng, 40);
  for (auto& s : x) s.w[1] = 0.5;
  try {
    normalize(x, NormalizeMethod::kZScore);
    FAIL() << "expected DegenerateChannelError";
  } catch (const DegenerateChannelError& e) {
    EXPECT_EQ(e.channel(), 4u);
    EXPECT_EQ(e.channel_name(), "wy");
  }
  // robust fails on zero IQR even when the std is not zero
  for (std::size_t i = 0; i < x.size(); ++i) x[i].w[1] = i == 0 ? 9.0 : 0.5;
  EXPECT_THROW(normalize(x, NormalizeMethod::kRobust), DegenerateChannelError);
  EXPECT_NO_THROW(normalize(x, NormalizeMethod::kZScore));
}

TEST(Detrend, LinearInputAndZeroSum) {
  for (double v : detrend_linear(std::vector<double>{2, 4, 6, 8})) EXPECT_NEAR(v, 0.0, 1e-12);
  Rng rng(10);
  const auto w = oracles::random_tensor(6, 37, rng);
  const auto d = detrend_linear(w);
  for (std::size_t c = 0; c < 6; ++c) {
    double s = 0.0;
    for (double v : d.row(c)) s += v;
    EXPECT_LT(std::abs(s), 1e-9);
  }
}

TEST(Detrend, Idempotent) {
  Rng rng(11);
  const auto once = detrend_linear(oracles::random_tensor(6, 50, rng));
  const auto twice = detrend_linear(once);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_LT(std::abs(once.data[i] - twice.data[i]), 1e-9);
}

TEST(Preprocessing, ChannelPermutationCommutes) {
  Rng rng(12);
  const auto x = random_series(rng, 120);
  const std::array<std::size_t, 6> perm{3, 5, 0, 1, 4, 2};
  for (auto method : {NormalizeMethod::kZScore, NormalizeMethod::kRobust}) {
    EXPECT_EQ(permute(normalize(x, method), perm), normalize(permute(x, perm), method));
  }
  EXPECT_EQ(permute(moving_average(x, 7), perm), moving_average(permute(x, perm), 7));

  const auto w = oracles::random_tensor(6, 30, rng);
  Tensor2<double> pw(6, 30);
  for (std::size_t c = 0; c < 6; ++c) std::copy(w.row(c).begin(), w.row(c).end(), pw.row(perm[c]).begin());
  const auto a = detrend_linear(w), b = detrend_linear(pw);
  for (std::size_t c = 0; c < 6; ++c) {
    for (std::size_t t = 0; t < 30; ++t) EXPECT_EQ(a(c, t), b(perm[c], t));
  }
}

TEST(Preprocessing, SpecValidation) {
  EXPECT_THROW(validate(PreprocSpec{{DenoiseStep{1}}}), DomainError);
  EXPECT_THROW(validate(PreprocSpec{{AddNoiseStep{-1.0, 0.0}}}), DomainError);
  EXPECT_NO_THROW(validate(PreprocSpec{}));
  EXPECT_THROW(normalize_method_from_string("minmax"), ConfigError);
}

TEST(Preprocessing, EmptySpecIsIdentity) {
  Rng rng(13);
  const auto train = random_series(rng, 30), test = random_series(rng, 20);
  Rng a(1), b(2);
  const auto out = preprocess_series(PreprocSpec{}, train, test, a, b);
  EXPECT_EQ(out.train, train);
  EXPECT_EQ(out.test, test);
  EXPECT_TRUE(out.normalization.empty());
}
