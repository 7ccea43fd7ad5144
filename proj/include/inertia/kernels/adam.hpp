#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "inertia/error.hpp"

namespace inertia {

template <typename Real = double>
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  std::vector<Real> first_moment;
  std::vector<Real> second_moment;

  explicit AdamState(double learning_rate = 1e-3) : lr(learning_rate) {}
};

template <typename Real>
void validate(const AdamState<Real>& s) {
  if (!(s.lr > 0.0)) throw DomainError("Adam: learning rate must be > 0");
  if (!(s.beta1 > 0.0 && s.beta1 < 1.0 && s.beta2 > 0.0 && s.beta2 < 1.0)) {
    throw DomainError("Adam: betas must lie in (0, 1)");
  }
}

// One bias-corrected Adam update over a flat parameter buffer. Moment buffers are
// sized on the first step and must keep that size afterwards.
template <typename Real>
void adam_step(std::span<Real> params, std::span<const Real> grads, AdamState<Real>& state) {
  validate(state);
  if (params.size() != grads.size()) throw StructuralError("Adam: parameter/gradient size mismatch");
  if (state.step_count == 0 && state.first_moment.empty()) {
    state.first_moment.assign(params.size(), Real{0});
    state.second_moment.assign(params.size(), Real{0});
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw StructuralError("Adam: moment buffers do not match parameter layout");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const Real b1 = static_cast<Real>(state.beta1);
  const Real b2 = static_cast<Real>(state.beta2);
  const Real c1 = static_cast<Real>(1.0 - std::pow(state.beta1, t));
  const Real c2 = static_cast<Real>(1.0 - std::pow(state.beta2, t));
  const Real lr = static_cast<Real>(state.lr);
  const Real eps = static_cast<Real>(state.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Real g = grads[i];
    Real& m = state.first_moment[i];
    Real& v = state.second_moment[i];
    m = b1 * m + (Real{1} - b1) * g;
    v = b2 * v + (Real{1} - b2) * g * g;
    const Real m_hat = m / c1;
    const Real v_hat = v / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace inertia
