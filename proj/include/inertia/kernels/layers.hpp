#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "inertia/error.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/rng.hpp"

namespace inertia {

struct ConvSpec {
  std::size_t in_channels = 6;
  std::size_t filters = 64;
  std::size_t kernel = 5;
  std::size_t stride = 1;

  std::size_t output_steps(std::size_t input_steps) const {
    return (input_steps - kernel) / stride + 1;
  }

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

// Weights laid out as [filter][channel][offset].
template <typename Real = double>
struct ConvParams {
  ConvSpec spec;
  std::vector<Real> weights;
  std::vector<Real> bias;

  ConvParams() = default;
  explicit ConvParams(const ConvSpec& s)
      : spec(s), weights(s.filters * s.in_channels * s.kernel, Real{0}), bias(s.filters, Real{0}) {}

  Real& w(std::size_t f, std::size_t c, std::size_t i) {
    return weights[(f * spec.in_channels + c) * spec.kernel + i];
  }
  Real w(std::size_t f, std::size_t c, std::size_t i) const {
    return weights[(f * spec.in_channels + c) * spec.kernel + i];
  }

  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

// y = x W + b with W stored row-major as (in x out).
template <typename Real = double>
struct DenseParams {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<Real> weights;
  std::vector<Real> bias;

  DenseParams() = default;
  DenseParams(std::size_t in_, std::size_t out_)
      : in(in_), out(out_), weights(in_ * out_, Real{0}), bias(out_, Real{0}) {}

  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

struct DropoutSpec {
  double rate = 0.25;
};

enum class Mode { kTrain, kEval };

inline void validate(const ConvSpec& spec) {
  if (spec.in_channels < 1 || spec.filters < 1 || spec.kernel < 1 || spec.stride < 1) {
    throw StructuralError("ConvSpec: channels, filters, kernel and stride must all be >= 1");
  }
}

inline void validate(const DropoutSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate < 1.0)) throw DomainError("DropoutSpec: rate must lie in [0, 1)");
}

template <typename Real>
void validate(const ConvParams<Real>& p) {
  validate(p.spec);
  if (p.weights.size() != p.spec.filters * p.spec.in_channels * p.spec.kernel || p.bias.size() != p.spec.filters) {
    throw StructuralError("ConvParams: buffer sizes do not match spec");
  }
}

template <typename Real>
void validate(const DenseParams<Real>& p) {
  if (p.weights.size() != p.in * p.out || p.bias.size() != p.out) {
    throw StructuralError("DenseParams: buffer sizes do not match shape");
  }
}

template <typename Real>
Tensor2<Real> conv1d_forward(const Tensor2<Real>& input, const ConvParams<Real>& params) {
  validate(params);
  const ConvSpec& spec = params.spec;
  if (input.channels != spec.in_channels) {
    throw StructuralError("conv1d: input has " + std::to_string(input.channels) + " channels, expected " +
                          std::to_string(spec.in_channels));
  }
  if (input.steps < spec.kernel) throw StructuralError("conv1d: input shorter than kernel");
  require_finite(input, "conv1d input");

  const std::size_t out_steps = spec.output_steps(input.steps);
  Tensor2<Real> out(spec.filters, out_steps);
  for (std::size_t f = 0; f < spec.filters; ++f) {
    Real* y = out.row(f).data();
    std::fill(y, y + out_steps, params.bias[f]);
    for (std::size_t c = 0; c < spec.in_channels; ++c) {
      const Real* x = input.row(c).data();
      for (std::size_t i = 0; i < spec.kernel; ++i) {
        const Real w = params.w(f, c, i);
        if (spec.stride == 1) {
          detail::axpy(w, x + i, y, out_steps);
        } else {
          for (std::size_t t = 0; t < out_steps; ++t) y[t] += w * x[t * spec.stride + i];
        }
      }
    }
  }
  return out;
}

// Accumulates parameter gradients into `grad` (if non-null) and returns d(loss)/d(input).
template <typename Real>
Tensor2<Real> conv1d_backward(const Tensor2<Real>& input, const ConvParams<Real>& params,
                              const Tensor2<Real>& dout, ConvParams<Real>* grad) {
  const ConvSpec& spec = params.spec;
  const std::size_t out_steps = spec.output_steps(input.steps);
  if (dout.channels != spec.filters || dout.steps != out_steps) {
    throw StructuralError("conv1d backward: upstream gradient shape mismatch");
  }
  Tensor2<Real> dx(input.channels, input.steps);
  for (std::size_t f = 0; f < spec.filters; ++f) {
    const Real* dy = dout.row(f).data();
    if (grad != nullptr) {
      Real s{0};
      for (std::size_t t = 0; t < out_steps; ++t) s += dy[t];
      grad->bias[f] += s;
    }
    for (std::size_t c = 0; c < spec.in_channels; ++c) {
      const Real* x = input.row(c).data();
      Real* gx = dx.row(c).data();
      for (std::size_t i = 0; i < spec.kernel; ++i) {
        const Real w = params.w(f, c, i);
        if (spec.stride == 1) {
          if (grad != nullptr) grad->w(f, c, i) += detail::dot(dy, x + i, out_steps);
          detail::axpy(w, dy, gx + i, out_steps);
        } else {
          Real s{0};
          for (std::size_t t = 0; t < out_steps; ++t) {
            s += dy[t] * x[t * spec.stride + i];
            gx[t * spec.stride + i] += w * dy[t];
          }
          if (grad != nullptr) grad->w(f, c, i) += s;
        }
      }
    }
  }
  return dx;
}

template <typename Real>
Tensor2<Real> relu(const Tensor2<Real>& x) {
  Tensor2<Real> out = x;
  for (Real& v : out.data) v = std::max(v, Real{0});
  return out;
}

template <typename Real>
Tensor2<Real> relu_backward(const Tensor2<Real>& x, const Tensor2<Real>& dout) {
  Tensor2<Real> dx(x.channels, x.steps);
  for (std::size_t i = 0; i < x.data.size(); ++i) dx.data[i] = x.data[i] > Real{0} ? dout.data[i] : Real{0};
  return dx;
}

// Non-overlapping max pooling (stride = depth); a trailing partial window is dropped.
// `argmax` (optional) receives the source step of every pooled cell.
template <typename Real>
Tensor2<Real> maxpool1d(const Tensor2<Real>& x, std::size_t depth, std::vector<std::size_t>* argmax = nullptr) {
  if (depth < 1 || depth > x.steps) {
    throw StructuralError("maxpool1d: depth " + std::to_string(depth) + " invalid for " + std::to_string(x.steps) +
                          " steps");
  }
  const std::size_t out_steps = x.steps / depth;
  Tensor2<Real> out(x.channels, out_steps);
  if (argmax != nullptr) argmax->assign(x.channels * out_steps, 0);
  for (std::size_t c = 0; c < x.channels; ++c) {
    const Real* src = x.row(c).data();
    for (std::size_t t = 0; t < out_steps; ++t) {
      std::size_t best = t * depth;
      for (std::size_t i = 1; i < depth; ++i) {
        if (src[t * depth + i] > src[best]) best = t * depth + i;
      }
      out(c, t) = src[best];
      if (argmax != nullptr) (*argmax)[c * out_steps + t] = best;
    }
  }
  return out;
}

template <typename Real>
Tensor2<Real> maxpool1d_backward(const Tensor2<Real>& x, const std::vector<std::size_t>& argmax,
                                 const Tensor2<Real>& dout) {
  Tensor2<Real> dx(x.channels, x.steps);
  for (std::size_t c = 0; c < dout.channels; ++c) {
    for (std::size_t t = 0; t < dout.steps; ++t) dx(c, argmax[c * dout.steps + t]) += dout(c, t);
  }
  return dx;
}

// Per-element scale factors: 0 for dropped units, 1/(1-p) for kept ones.
template <typename Real>
std::vector<Real> dropout_mask(std::size_t n, const DropoutSpec& spec, Rng& rng) {
  validate(spec);
  const Real keep_scale = static_cast<Real>(1.0 / (1.0 - spec.rate));
  std::vector<Real> mask(n);
  for (Real& m : mask) m = rng.bernoulli(1.0 - spec.rate) ? keep_scale : Real{0};
  return mask;
}

// Inverted dropout: identity in eval mode, x * r / (1-p) with r ~ Bernoulli(1-p) in train mode.
template <typename Real>
Tensor2<Real> dropout_apply(const Tensor2<Real>& x, const DropoutSpec& spec, Mode mode, Rng& rng) {
  validate(spec);
  if (mode == Mode::kEval || spec.rate == 0.0) return x;
  const auto mask = dropout_mask<Real>(x.size(), spec, rng);
  Tensor2<Real> out = x;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask[i];
  return out;
}

template <typename Real>
std::vector<Real> fc_forward(std::span<const Real> x, const DenseParams<Real>& params) {
  validate(params);
  if (x.size() != params.in) {
    throw StructuralError("fc: input length " + std::to_string(x.size()) + ", expected " + std::to_string(params.in));
  }
  std::vector<Real> y(params.bias);
  for (std::size_t i = 0; i < params.in; ++i) {
    detail::axpy(x[i], params.weights.data() + i * params.out, y.data(), params.out);
  }
  return y;
}

template <typename Real>
std::vector<Real> fc_backward(std::span<const Real> x, const DenseParams<Real>& params, std::span<const Real> dy,
                              DenseParams<Real>* grad) {
  if (dy.size() != params.out) throw StructuralError("fc backward: upstream gradient length mismatch");
  std::vector<Real> dx(params.in);
  for (std::size_t i = 0; i < params.in; ++i) {
    const Real* w = params.weights.data() + i * params.out;
    dx[i] = detail::dot(w, dy.data(), params.out);
    if (grad != nullptr) detail::axpy(x[i], dy.data(), grad->weights.data() + i * params.out, params.out);
  }
  if (grad != nullptr) {
    for (std::size_t j = 0; j < params.out; ++j) grad->bias[j] += dy[j];
  }
  return dx;
}

}  // namespace inertia
