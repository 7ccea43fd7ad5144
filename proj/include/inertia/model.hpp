#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/data/windowing.hpp"
#include "inertia/error.hpp"
#include "inertia/kernels/adam.hpp"
#include "inertia/kernels/layers.hpp"
#include "inertia/kernels/lstm.hpp"
#include "inertia/kernels/tape.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/losses.hpp"
#include "inertia/rng.hpp"

namespace inertia {

enum class HeadMode { kSingle, kHead2, kHead3 };

inline std::string_view to_string(HeadMode m) {
  switch (m) {
    case HeadMode::kSingle: return "single";
    case HeadMode::kHead2: return "head2";
    case HeadMode::kHead3: return "head3";
  }
  return "?";
}

inline HeadMode head_mode_from_string(std::string_view s) {
  if (s == "single") return HeadMode::kSingle;
  if (s == "head2") return HeadMode::kHead2;
  if (s == "head3") return HeadMode::kHead3;
  throw ConfigError("unknown head mode '" + std::string(s) + "'");
}

struct ModelConfig {
  HeadMode head_mode = HeadMode::kSingle;
  std::size_t filters = 64;
  std::size_t kernel = 5;
  std::size_t stride = 1;
  std::size_t pool = 3;
  double dropout = 0.25;
  std::size_t lstm_hidden = 128;
  std::size_t fc_width = 256;
  std::size_t output_dim = 1;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Input channel groups feeding each convolutional branch.
inline std::vector<std::vector<std::size_t>> branch_channels(HeadMode mode) {
  switch (mode) {
    case HeadMode::kSingle: return {{0, 1, 2, 3, 4, 5}};
    case HeadMode::kHead2: return {{0, 1, 2}, {3, 4, 5}};
    case HeadMode::kHead3: return {{0, 3}, {1, 4}, {2, 5}};
  }
  throw StructuralError("invalid head mode");
}

inline void validate(const ModelConfig& c) {
  if (c.head_mode != HeadMode::kSingle && c.head_mode != HeadMode::kHead2 && c.head_mode != HeadMode::kHead3) {
    throw StructuralError("ModelConfig: invalid head mode");
  }
  if (c.filters < 1 || c.kernel < 1 || c.stride < 1 || c.pool < 1) {
    throw StructuralError("ModelConfig: filters, kernel, stride and pool must be >= 1");
  }
  if (c.lstm_hidden < 1 || c.fc_width < 1) throw StructuralError("ModelConfig: lstm_hidden and fc_width must be >= 1");
  if (c.output_dim < 1) throw StructuralError("ModelConfig: output_dim must be >= 1");
  validate(DropoutSpec{c.dropout});
}

// Shortest window the configured conv + pool stages accept.
inline std::size_t min_window_steps(const ModelConfig& c) { return c.kernel + (c.pool - 1) * c.stride; }

template <typename Real = double>
struct ParameterSet {
  std::vector<ConvParams<Real>> branches;
  LstmParams<Real> lstm;
  DenseParams<Real> fc;
  DenseParams<Real> output;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

// Visits every parameter buffer in a fixed order with a stable name.
template <typename PS, typename F>
void for_each_tensor(PS& ps, F&& fn) {
  for (std::size_t b = 0; b < ps.branches.size(); ++b) {
    const std::string prefix = "branch" + std::to_string(b) + ".conv.";
    fn(prefix + "weight", ps.branches[b].weights);
    fn(prefix + "bias", ps.branches[b].bias);
  }
  fn(std::string("lstm.forward.w_input"), ps.lstm.forward.w_input);
  fn(std::string("lstm.forward.w_hidden"), ps.lstm.forward.w_hidden);
  fn(std::string("lstm.forward.bias"), ps.lstm.forward.bias);
  fn(std::string("lstm.backward.w_input"), ps.lstm.backward.w_input);
  fn(std::string("lstm.backward.w_hidden"), ps.lstm.backward.w_hidden);
  fn(std::string("lstm.backward.bias"), ps.lstm.backward.bias);
  fn(std::string("fc.weight"), ps.fc.weights);
  fn(std::string("fc.bias"), ps.fc.bias);
  fn(std::string("output.weight"), ps.output.weights);
  fn(std::string("output.bias"), ps.output.bias);
}

template <typename Real>
std::size_t parameter_count(const ParameterSet<Real>& ps) {
  std::size_t n = 0;
  for_each_tensor(ps, [&](const std::string&, const std::vector<Real>& v) { n += v.size(); });
  return n;
}

// Closed-form count for a configuration, independent of any built ParameterSet.
inline std::size_t expected_parameter_count(const ModelConfig& c) {
  std::size_t n = 0;
  for (const auto& group : branch_channels(c.head_mode)) n += c.filters * group.size() * c.kernel + c.filters;
  const std::size_t lstm_in = c.filters * branch_channels(c.head_mode).size();
  const std::size_t H = c.lstm_hidden;
  n += 2 * (lstm_in * 4 * H + H * 4 * H + 4 * H);
  n += 2 * H * c.fc_width + c.fc_width;
  n += c.fc_width * c.output_dim + c.output_dim;
  return n;
}

// FNV-1a over the raw bytes of every buffer, in visiting order.
template <typename Real>
std::uint64_t parameter_hash(const ParameterSet<Real>& ps) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for_each_tensor(ps, [&](const std::string&, const std::vector<Real>& v) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(Real); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  });
  return h;
}

// Zero-valued ParameterSet with the configured shapes.
template <typename Real = double>
ParameterSet<Real> zero_parameters(const ModelConfig& c) {
  validate(c);
  ParameterSet<Real> ps;
  const auto groups = branch_channels(c.head_mode);
  for (const auto& group : groups) {
    ps.branches.emplace_back(ConvSpec{group.size(), c.filters, c.kernel, c.stride});
  }
  ps.lstm = LstmParams<Real>(c.filters * groups.size(), c.lstm_hidden);
  ps.fc = DenseParams<Real>(2 * c.lstm_hidden, c.fc_width);
  ps.output = DenseParams<Real>(c.fc_width, c.output_dim);
  return ps;
}

template <typename Real>
void validate(const ParameterSet<Real>& ps, const ModelConfig& c) {
  const auto expected = zero_parameters<Real>(c);
  if (ps.branches.size() != expected.branches.size()) throw StructuralError("ParameterSet: branch count mismatch");
  for (std::size_t b = 0; b < ps.branches.size(); ++b) {
    if (!(ps.branches[b].spec == expected.branches[b].spec)) throw StructuralError("ParameterSet: conv spec mismatch");
  }
  std::vector<std::size_t> sizes;
  for_each_tensor(expected, [&](const std::string&, const std::vector<Real>& v) { sizes.push_back(v.size()); });
  std::size_t k = 0;
  for_each_tensor(ps, [&](const std::string& name, const std::vector<Real>& v) {
    if (v.size() != sizes[k++]) throw StructuralError("ParameterSet: tensor '" + name + "' has the wrong size");
    for (Real x : v) {
      if (!std::isfinite(static_cast<double>(x))) throw NumericError("ParameterSet: non-finite value in '" + name + "'");
    }
  });
}

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
template <typename Real = double>
ParameterSet<Real> build_model(const ModelConfig& c, Rng& rng) {
  auto ps = zero_parameters<Real>(c);
  auto fill = [&](std::vector<Real>& v, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Real& x : v) x = static_cast<Real>(rng.uniform(-bound, bound));
  };
  for (auto& conv : ps.branches) {
    const std::size_t fan_in = conv.spec.in_channels * conv.spec.kernel;
    fill(conv.weights, fan_in);
    fill(conv.bias, fan_in);
  }
  for (auto* dir : {&ps.lstm.forward, &ps.lstm.backward}) {
    const std::size_t fan_in = ps.lstm.input_size + ps.lstm.hidden_size;
    fill(dir->w_input, fan_in);
    fill(dir->w_hidden, fan_in);
    fill(dir->bias, fan_in);
  }
  fill(ps.fc.weights, ps.fc.in);
  fill(ps.fc.bias, ps.fc.in);
  fill(ps.output.weights, ps.output.in);
  fill(ps.output.bias, ps.output.in);
  return ps;
}

// Records one window's forward pass on the tape and returns the output node (output_dim x 1).
// Gradients flow into `grads` when it is non-null.
template <typename Real>
typename Tape<Real>::Node record_forward(Tape<Real>& tape, const ParameterSet<Real>& ps, const ModelConfig& c,
                                         const Tensor2<Real>& window, Mode mode, Rng& dropout_rng,
                                         ParameterSet<Real>* grads) {
  if (window.channels != kImuChannels) {
    throw StructuralError("model: window has " + std::to_string(window.channels) + " channels, expected 6");
  }
  if (window.steps < min_window_steps(c)) {
    throw StructuralError("model: window of " + std::to_string(window.steps) + " steps is shorter than the minimum " +
                          std::to_string(min_window_steps(c)));
  }
  using Node = typename Tape<Real>::Node;
  const Node x = tape.input(window);
  const auto groups = branch_channels(c.head_mode);
  std::vector<Node> pooled;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const Node in = c.head_mode == HeadMode::kSingle ? x : tape.select_channels(x, groups[b]);
    const Node conv = tape.conv1d(in, ps.branches[b], grads ? &grads->branches[b] : nullptr);
    pooled.push_back(tape.maxpool(tape.relu(conv), c.pool));
  }
  const Node merged = pooled.size() == 1 ? pooled.front() : tape.concat_channels(pooled);
  const Node seq = tape.bilstm(merged, ps.lstm, grads ? &grads->lstm : nullptr);
  const Node summary = tape.bilstm_summary(seq);
  const Node dropped = tape.dropout(summary, DropoutSpec{c.dropout}, mode, dropout_rng);
  const Node fc = tape.dense(dropped, ps.fc, grads ? &grads->fc : nullptr);
  return tape.dense(fc, ps.output, grads ? &grads->output : nullptr);
}

// Eval-mode predictions, one row of output_dim values per window.
template <typename Real = double>
std::vector<std::vector<double>> predict(const ParameterSet<Real>& ps, const ModelConfig& c,
                                         const std::vector<Tensor2<double>>& windows) {
  validate(c);
  Rng unused(0);
  std::vector<std::vector<double>> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    Tape<Real> tape;
    const auto node = record_forward<Real>(tape, ps, c, w.template cast<Real>(), Mode::kEval, unused, nullptr);
    const auto& y = tape.value(node).data;
    out.emplace_back(y.begin(), y.end());
  }
  return out;
}

struct TrainConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  LossSpec loss{};
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline void validate(const TrainConfig& tc) {
  if (tc.epochs < 1) throw StructuralError("TrainConfig: epochs must be >= 1");
  if (tc.batch_size < 1) throw StructuralError("TrainConfig: batch_size must be >= 1");
  if (!(tc.learning_rate > 0.0)) throw DomainError("TrainConfig: learning_rate must be > 0");
  validate(tc.loss);
}

struct TrainResult {
  std::vector<double> loss_curve;  // mean training loss per epoch
};

namespace detail {

template <typename Real>
void zero_fill(ParameterSet<Real>& ps) {
  for_each_tensor(ps, [](const std::string&, std::vector<Real>& v) { std::fill(v.begin(), v.end(), Real{0}); });
}

}  // namespace detail

// Mini-batch Adam. Batch loss is the mean of per-window losses (each already a mean over
// output_dim); the order of windows is reshuffled every epoch from tc.seed.
template <typename Real = double>
TrainResult train(ParameterSet<Real>& ps, const ModelConfig& c, const TrainConfig& tc, const WindowedDataset& data) {
  validate(c);
  validate(tc);
  if (data.size() == 0) throw UsageError("train: empty dataset");
  validate(data);
  for (const auto& label : data.labels) {
    if (label.size() != c.output_dim) throw StructuralError("train: label width does not match output_dim");
  }
  validate(ps, c);

  std::vector<Tensor2<Real>> windows;
  windows.reserve(data.size());
  for (const auto& w : data.windows) windows.push_back(w.template cast<Real>());
  std::vector<std::vector<Real>> labels;
  for (const auto& l : data.labels) labels.emplace_back(l.begin(), l.end());

  Rng shuffle_rng = Rng::derive(tc.seed, streams::kShuffle);
  Rng dropout_rng = Rng::derive(tc.seed, streams::kDropout);
  std::vector<AdamState<Real>> adam;
  for_each_tensor(ps, [&](const std::string&, std::vector<Real>&) { adam.emplace_back(tc.learning_rate); });

  auto grads = zero_parameters<Real>(c);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(start + tc.batch_size, order.size());
      const Real scale = Real{1} / static_cast<Real>(end - start);
      detail::zero_fill(grads);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        Tape<Real> tape;
        const auto out = record_forward(tape, ps, c, windows[idx], Mode::kTrain, dropout_rng, &grads);
        const auto loss = compute_loss<Real>(tc.loss, labels[idx], tape.value(out).data);
        if (!std::isfinite(loss.value)) {
          throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1));
        }
        epoch_loss += loss.value;
        auto upstream = Tensor2<Real>::column(loss.grad);
        for (Real& g : upstream.data) g *= scale;
        tape.backward(out, upstream);
      }
      std::size_t k = 0;
      std::vector<std::vector<Real>*> grad_buffers;
      for_each_tensor(grads, [&](const std::string&, std::vector<Real>& g) { grad_buffers.push_back(&g); });
      for_each_tensor(ps, [&](const std::string&, std::vector<Real>& p) {
        adam_step<Real>(p, *grad_buffers[k], adam[k]);
        ++k;
      });
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

// Mean loss of eval-mode predictions against the dataset labels.
template <typename Real = double>
double evaluate_loss(const ParameterSet<Real>& ps, const ModelConfig& c, const WindowedDataset& data,
                     const LossSpec& spec) {
  if (data.size() == 0) throw UsageError("evaluate: empty dataset");
  const auto pred = predict(ps, c, data.windows);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += compute_loss<double>(spec, data.labels[i], pred[i]).value;
  }
  return total / static_cast<double>(pred.size());
}

// RMSE over every (window, output component) pair.
template <typename Real = double>
double evaluate_rmse(const ParameterSet<Real>& ps, const ModelConfig& c, const WindowedDataset& data) {
  if (data.size() == 0) throw UsageError("evaluate: empty dataset");
  const auto pred = predict(ps, c, data.windows);
  std::vector<double> y, yhat;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != data.labels[i].size()) throw StructuralError("evaluate: label width mismatch");
    y.insert(y.end(), data.labels[i].begin(), data.labels[i].end());
    yhat.insert(yhat.end(), pred[i].begin(), pred[i].end());
  }
  return metric_rmse<double>(y, yhat);
}

}  // namespace inertia
