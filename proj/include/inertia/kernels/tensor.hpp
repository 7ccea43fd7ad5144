#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "inertia/error.hpp"

namespace inertia {

// Channel-major 2D tensor: element (c, t) lives at data[c * steps + t].
template <typename Real = double>
struct Tensor2 {
  std::size_t channels = 0;
  std::size_t steps = 0;
  std::vector<Real> data;

  Tensor2() = default;
  Tensor2(std::size_t channels_, std::size_t steps_, Real fill = Real{0})
      : channels(channels_), steps(steps_), data(channels_ * steps_, fill) {}

  // One initializer row per channel.
  Tensor2(std::initializer_list<std::initializer_list<Real>> rows) {
    channels = rows.size();
    steps = channels == 0 ? 0 : rows.begin()->size();
    data.reserve(channels * steps);
    for (const auto& row : rows) {
      if (row.size() != steps) throw StructuralError("Tensor2: ragged initializer rows");
      data.insert(data.end(), row.begin(), row.end());
    }
  }

  static Tensor2 column(std::span<const Real> values) {
    Tensor2 out(values.size(), 1);
    std::copy(values.begin(), values.end(), out.data.begin());
    return out;
  }

  Real& operator()(std::size_t c, std::size_t t) { return data[c * steps + t]; }
  Real operator()(std::size_t c, std::size_t t) const { return data[c * steps + t]; }

  std::span<Real> row(std::size_t c) { return {data.data() + c * steps, steps}; }
  std::span<const Real> row(std::size_t c) const { return {data.data() + c * steps, steps}; }

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }

  template <typename Other>
  Tensor2<Other> cast() const {
    Tensor2<Other> out(channels, steps);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<Other>(data[i]);
    return out;
  }

  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

template <typename Real>
void require_finite(std::span<const Real> values, const char* what) {
  for (Real v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite value");
  }
}

template <typename Real>
void require_finite(const Tensor2<Real>& x, const char* what) {
  require_finite(std::span<const Real>(x.data), what);
}

namespace detail {

// y += alpha * x
template <typename Real>
inline void axpy(Real alpha, const Real* x, Real* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Fixed four-way reduction order so results are reproducible and the loop vectorizes.
template <typename Real>
inline Real dot(const Real* a, const Real* b, std::size_t n) {
  Real s0{0}, s1{0}, s2{0}, s3{0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

template <typename Real>
inline Real sigmoid(Real x) {
  if (x >= Real{0}) return Real{1} / (Real{1} + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real{1} + e);
}

}  // namespace detail

}  // namespace inertia
