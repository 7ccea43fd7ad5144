#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/error.hpp"

namespace inertia {

enum class LossKind { kMse, kMae, kHuber, kLogCosh };

struct LossSpec {
  LossKind kind = LossKind::kMse;
  double delta = 1.0;  // huber threshold

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

inline std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::kMse: return "mse";
    case LossKind::kMae: return "mae";
    case LossKind::kHuber: return "huber";
    case LossKind::kLogCosh: return "logcosh";
  }
  return "?";
}

inline LossKind loss_kind_from_string(std::string_view s) {
  if (s == "mse") return LossKind::kMse;
  if (s == "mae" || s == "l1") return LossKind::kMae;
  if (s == "huber") return LossKind::kHuber;
  if (s == "logcosh") return LossKind::kLogCosh;
  throw ConfigError("unknown loss kind '" + std::string(s) + "'");
}

inline void validate(const LossSpec& spec) {
  if (spec.kind == LossKind::kHuber && !(spec.delta > 0.0)) throw DomainError("huber: delta must be > 0");
}

template <typename Real = double>
struct LossValue {
  double value = 0.0;
  std::vector<Real> grad;  // d(loss)/d(prediction)
};

// Stable log(cosh(e)) = |e| + log1p(exp(-2|e|)) - ln 2.
inline double log_cosh(double e) {
  const double a = std::abs(e);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Mean of the per-element loss over n elements, with its gradient w.r.t. the prediction.
template <typename Real>
LossValue<Real> compute_loss(const LossSpec& spec, std::span<const Real> target, std::span<const Real> prediction) {
  validate(spec);
  if (target.size() != prediction.size()) throw StructuralError("loss: target/prediction length mismatch");
  if (target.empty()) throw StructuralError("loss: empty input");
  const double n = static_cast<double>(target.size());
  LossValue<Real> out;
  out.grad.resize(target.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = static_cast<double>(prediction[i]) - static_cast<double>(target[i]);
    const double a = std::abs(e);
    double term = 0.0;
    double d = 0.0;
    switch (spec.kind) {
      case LossKind::kMse:
        term = e * e;
        d = 2.0 * e;
        break;
      case LossKind::kMae:
        term = a;
        d = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
        break;
      case LossKind::kHuber:
        if (a <= spec.delta) {
          term = 0.5 * e * e;
          d = e;
        } else {
          term = spec.delta * a - 0.5 * spec.delta * spec.delta;
          d = e > 0.0 ? spec.delta : -spec.delta;
        }
        break;
      case LossKind::kLogCosh:
        term = log_cosh(e);
        d = std::tanh(e);
        break;
    }
    sum += term;
    out.grad[i] = static_cast<Real>(d / n);
  }
  out.value = sum / n;
  return out;
}

template <typename Real>
double metric_rmse(std::span<const Real> target, std::span<const Real> prediction) {
  if (target.size() != prediction.size()) throw StructuralError("rmse: target/prediction length mismatch");
  if (target.empty()) throw StructuralError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = static_cast<double>(target[i]) - static_cast<double>(prediction[i]);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(target.size()));
}

// Positive values mean the technique lowered the error.
inline double improvement_pct(double rmse_base, double rmse_tech) {
  if (!(rmse_base > 0.0)) throw DomainError("improvement_pct: baseline RMSE must be > 0");
  return 100.0 * (rmse_base - rmse_tech) / rmse_base;
}

}  // namespace inertia
