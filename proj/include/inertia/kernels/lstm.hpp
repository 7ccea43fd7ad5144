#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "inertia/error.hpp"
#include "inertia/kernels/tensor.hpp"

namespace inertia {

// One LSTM direction. Gate pre-activations z (length 4H, blocks i | f | g | o) are
//   z = x_t W_input + h_{t-1} W_hidden + bias
// with W_input stored as (input_size x 4H) and W_hidden as (hidden_size x 4H), row-major.
template <typename Real = double>
struct LstmDirection {
  std::vector<Real> w_input;
  std::vector<Real> w_hidden;
  std::vector<Real> bias;

  friend bool operator==(const LstmDirection&, const LstmDirection&) = default;
};

template <typename Real = double>
struct LstmParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  LstmDirection<Real> forward;
  LstmDirection<Real> backward;

  LstmParams() = default;
  LstmParams(std::size_t input, std::size_t hidden) : input_size(input), hidden_size(hidden) {
    for (auto* d : {&forward, &backward}) {
      d->w_input.assign(input * 4 * hidden, Real{0});
      d->w_hidden.assign(hidden * 4 * hidden, Real{0});
      d->bias.assign(4 * hidden, Real{0});
    }
  }

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

template <typename Real>
void validate(const LstmParams<Real>& p) {
  const std::size_t gates = 4 * p.hidden_size;
  for (const auto* d : {&p.forward, &p.backward}) {
    if (d->w_input.size() != p.input_size * gates || d->w_hidden.size() != p.hidden_size * gates ||
        d->bias.size() != gates) {
      throw StructuralError("LstmParams: weight shapes inconsistent with input/hidden sizes");
    }
  }
  if (p.hidden_size == 0) throw StructuralError("LstmParams: hidden_size must be >= 1");
}

namespace detail {

// Per-step activations kept for backpropagation through time, indexed by processing order.
template <typename Real>
struct LstmTrace {
  std::vector<std::size_t> order;  // time index processed at each step
  std::vector<Real> gates;         // activated i, f, g, o per step (4H each)
  std::vector<Real> cell;          // c per step (H each)
  std::vector<Real> cell_tanh;     // tanh(c) per step
  std::vector<Real> hidden;        // h per step
};

// x_time_major: T rows of input_size.
template <typename Real>
void lstm_direction_forward(const std::vector<Real>& x_time_major, std::size_t steps, std::size_t input_size,
                            std::size_t hidden, const LstmDirection<Real>& p, bool reverse, LstmTrace<Real>& trace) {
  const std::size_t G = 4 * hidden;
  trace.order.resize(steps);
  trace.gates.assign(steps * G, Real{0});
  trace.cell.assign(steps * hidden, Real{0});
  trace.cell_tanh.assign(steps * hidden, Real{0});
  trace.hidden.assign(steps * hidden, Real{0});

  std::vector<Real> z(G);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    trace.order[k] = t;
    std::copy(p.bias.begin(), p.bias.end(), z.begin());
    const Real* x = x_time_major.data() + t * input_size;
    for (std::size_t j = 0; j < input_size; ++j) axpy(x[j], p.w_input.data() + j * G, z.data(), G);
    if (k > 0) {
      const Real* h_prev = trace.hidden.data() + (k - 1) * hidden;
      for (std::size_t j = 0; j < hidden; ++j) axpy(h_prev[j], p.w_hidden.data() + j * G, z.data(), G);
    }
    Real* a = trace.gates.data() + k * G;
    Real* c = trace.cell.data() + k * hidden;
    Real* tc = trace.cell_tanh.data() + k * hidden;
    Real* h = trace.hidden.data() + k * hidden;
    const Real* c_prev = k > 0 ? trace.cell.data() + (k - 1) * hidden : nullptr;
    for (std::size_t u = 0; u < hidden; ++u) {
      const Real gi = sigmoid(z[u]);
      const Real gf = sigmoid(z[hidden + u]);
      const Real gg = std::tanh(z[2 * hidden + u]);
      const Real go = sigmoid(z[3 * hidden + u]);
      a[u] = gi;
      a[hidden + u] = gf;
      a[2 * hidden + u] = gg;
      a[3 * hidden + u] = go;
      c[u] = gi * gg + (c_prev != nullptr ? gf * c_prev[u] : Real{0});
      tc[u] = std::tanh(c[u]);
      h[u] = go * tc[u];
    }
  }
}

// dh_out: gradient w.r.t. this direction's output, time-major (T x H).
// Accumulates into grad (if non-null) and adds input gradients into dx_time_major (T x input_size).
template <typename Real>
void lstm_direction_backward(const std::vector<Real>& x_time_major, std::size_t input_size, std::size_t hidden,
                             const LstmDirection<Real>& p, const LstmTrace<Real>& trace,
                             const std::vector<Real>& dh_out, LstmDirection<Real>* grad,
                             std::vector<Real>& dx_time_major) {
  const std::size_t G = 4 * hidden;
  const std::size_t steps = trace.order.size();
  std::vector<Real> dh(hidden), dc_next(hidden, Real{0}), dh_next(hidden, Real{0}), dz(G);
  for (std::size_t kk = steps; kk-- > 0;) {
    const std::size_t t = trace.order[kk];
    const Real* a = trace.gates.data() + kk * G;
    const Real* tc = trace.cell_tanh.data() + kk * hidden;
    const Real* c_prev = kk > 0 ? trace.cell.data() + (kk - 1) * hidden : nullptr;
    for (std::size_t u = 0; u < hidden; ++u) dh[u] = dh_out[t * hidden + u] + dh_next[u];
    for (std::size_t u = 0; u < hidden; ++u) {
      const Real gi = a[u], gf = a[hidden + u], gg = a[2 * hidden + u], go = a[3 * hidden + u];
      const Real d_o = dh[u] * tc[u];
      const Real dc = dh[u] * go * (Real{1} - tc[u] * tc[u]) + dc_next[u];
      const Real d_i = dc * gg;
      const Real d_g = dc * gi;
      const Real d_f = c_prev != nullptr ? dc * c_prev[u] : Real{0};
      dc_next[u] = dc * gf;
      dz[u] = d_i * gi * (Real{1} - gi);
      dz[hidden + u] = d_f * gf * (Real{1} - gf);
      dz[2 * hidden + u] = d_g * (Real{1} - gg * gg);
      dz[3 * hidden + u] = d_o * go * (Real{1} - go);
    }
    const Real* x = x_time_major.data() + t * input_size;
    Real* dx = dx_time_major.data() + t * input_size;
    for (std::size_t j = 0; j < input_size; ++j) {
      dx[j] += dot(p.w_input.data() + j * G, dz.data(), G);
      if (grad != nullptr) axpy(x[j], dz.data(), grad->w_input.data() + j * G, G);
    }
    if (kk > 0) {
      const Real* h_prev = trace.hidden.data() + (kk - 1) * hidden;
      for (std::size_t j = 0; j < hidden; ++j) {
        dh_next[j] = dot(p.w_hidden.data() + j * G, dz.data(), G);
        if (grad != nullptr) axpy(h_prev[j], dz.data(), grad->w_hidden.data() + j * G, G);
      }
    }
    if (grad != nullptr) {
      for (std::size_t r = 0; r < G; ++r) grad->bias[r] += dz[r];
    }
  }
}

template <typename Real>
std::vector<Real> to_time_major(const Tensor2<Real>& x) {
  std::vector<Real> out(x.size());
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t t = 0; t < x.steps; ++t) out[t * x.channels + c] = x(c, t);
  }
  return out;
}

}  // namespace detail

// Everything bilstm_backward needs from the forward pass.
template <typename Real = double>
struct BiLstmCache {
  std::vector<Real> x_time_major;
  std::size_t steps = 0;
  detail::LstmTrace<Real> forward;
  detail::LstmTrace<Real> backward;
};

// Output has 2H channels: rows [0, H) hold forward states, rows [H, 2H) backward states,
// both aligned to the input time index.
template <typename Real>
Tensor2<Real> bilstm_forward(const Tensor2<Real>& x, const LstmParams<Real>& params,
                             BiLstmCache<Real>* cache = nullptr) {
  validate(params);
  if (x.channels != params.input_size) {
    throw StructuralError("bilstm: input has " + std::to_string(x.channels) + " channels, expected " +
                          std::to_string(params.input_size));
  }
  require_finite(x, "bilstm input");
  const std::size_t H = params.hidden_size;
  BiLstmCache<Real> local;
  BiLstmCache<Real>& c = cache != nullptr ? *cache : local;
  c.x_time_major = detail::to_time_major(x);
  c.steps = x.steps;
  detail::lstm_direction_forward(c.x_time_major, x.steps, x.channels, H, params.forward, false, c.forward);
  detail::lstm_direction_forward(c.x_time_major, x.steps, x.channels, H, params.backward, true, c.backward);

  Tensor2<Real> out(2 * H, x.steps);
  for (std::size_t k = 0; k < x.steps; ++k) {
    const std::size_t tf = c.forward.order[k];
    const std::size_t tb = c.backward.order[k];
    for (std::size_t u = 0; u < H; ++u) {
      out(u, tf) = c.forward.hidden[k * H + u];
      out(H + u, tb) = c.backward.hidden[k * H + u];
    }
  }
  return out;
}

template <typename Real>
Tensor2<Real> bilstm_backward(const BiLstmCache<Real>& cache, const LstmParams<Real>& params,
                              const Tensor2<Real>& dout, LstmParams<Real>* grad) {
  const std::size_t H = params.hidden_size;
  const std::size_t I = params.input_size;
  if (dout.channels != 2 * H || dout.steps != cache.steps) {
    throw StructuralError("bilstm backward: upstream gradient shape mismatch");
  }
  std::vector<Real> dh_fwd(cache.steps * H), dh_bwd(cache.steps * H);
  for (std::size_t t = 0; t < cache.steps; ++t) {
    for (std::size_t u = 0; u < H; ++u) {
      dh_fwd[t * H + u] = dout(u, t);
      dh_bwd[t * H + u] = dout(H + u, t);
    }
  }
  std::vector<Real> dx_tm(cache.steps * I, Real{0});
  detail::lstm_direction_backward(cache.x_time_major, I, H, params.forward, cache.forward, dh_fwd,
                                  grad != nullptr ? &grad->forward : nullptr, dx_tm);
  detail::lstm_direction_backward(cache.x_time_major, I, H, params.backward, cache.backward, dh_bwd,
                                  grad != nullptr ? &grad->backward : nullptr, dx_tm);
  Tensor2<Real> dx(I, cache.steps);
  for (std::size_t t = 0; t < cache.steps; ++t) {
    for (std::size_t j = 0; j < I; ++j) dx(j, t) = dx_tm[t * I + j];
  }
  return dx;
}

}  // namespace inertia
