#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "inertia/error.hpp"
#include "inertia/kernels/layers.hpp"
#include "inertia/kernels/lstm.hpp"
#include "inertia/kernels/tensor.hpp"
#include "inertia/rng.hpp"

namespace inertia {

// Records a forward pass as a list of nodes; backward() walks it in reverse.
// Parameter gradients accumulate into the grad buffers bound at record time
// (pass nullptr to skip them). Vectors are carried as (n x 1) tensors.
template <typename Real = double>
class Tape {
 public:
  using Node = std::size_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  Node input(Tensor2<Real> value) { return push(std::move(value), nullptr); }

  Node conv1d(Node x, const ConvParams<Real>& params, ConvParams<Real>* grad) {
    auto y = conv1d_forward(value(x), params);
    return push(std::move(y), [x, &params, grad](Tape& tp, Node self) {
      tp.accumulate(x, conv1d_backward(tp.value(x), params, tp.grad(self), grad));
    });
  }

  Node relu(Node x) {
    auto y = inertia::relu(value(x));
    return push(std::move(y), [x](Tape& tp, Node self) { tp.accumulate(x, relu_backward(tp.value(x), tp.grad(self))); });
  }

  Node maxpool(Node x, std::size_t depth) {
    auto argmax = std::make_shared<std::vector<std::size_t>>();
    auto y = maxpool1d(value(x), depth, argmax.get());
    return push(std::move(y), [x, argmax](Tape& tp, Node self) {
      tp.accumulate(x, maxpool1d_backward(tp.value(x), *argmax, tp.grad(self)));
    });
  }

  Node bilstm(Node x, const LstmParams<Real>& params, LstmParams<Real>* grad) {
    auto cache = std::make_shared<BiLstmCache<Real>>();
    auto y = bilstm_forward(value(x), params, cache.get());
    return push(std::move(y), [x, &params, grad, cache](Tape& tp, Node self) {
      tp.accumulate(x, bilstm_backward(*cache, params, tp.grad(self), grad));
    });
  }

  // Final forward state concatenated with the final backward state (time 0), as a (2H x 1) vector.
  Node bilstm_summary(Node seq) {
    const auto& s = value(seq);
    const std::size_t H = s.channels / 2;
    Tensor2<Real> y(2 * H, 1);
    for (std::size_t u = 0; u < H; ++u) {
      y(u, 0) = s(u, s.steps - 1);
      y(H + u, 0) = s(H + u, 0);
    }
    return push(std::move(y), [seq, H](Tape& tp, Node self) {
      const auto& g = tp.grad(self);
      const auto& s = tp.value(seq);
      Tensor2<Real> dx(s.channels, s.steps);
      for (std::size_t u = 0; u < H; ++u) {
        dx(u, s.steps - 1) = g(u, 0);
        dx(H + u, 0) = g(H + u, 0);
      }
      tp.accumulate(seq, dx);
    });
  }

  Node dropout(Node x, const DropoutSpec& spec, Mode mode, Rng& rng) {
    validate(spec);
    if (mode == Mode::kEval || spec.rate == 0.0) return identity(x);
    return dropout_masked(x, dropout_mask<Real>(value(x).size(), spec, rng));
  }

  // Dropout with an explicit mask of scale factors (0 or 1/(1-p)).
  Node dropout_masked(Node x, std::vector<Real> mask) {
    const auto& v = value(x);
    if (mask.size() != v.size()) throw StructuralError("dropout: mask size mismatch");
    Tensor2<Real> y = v;
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] *= mask[i];
    auto shared = std::make_shared<std::vector<Real>>(std::move(mask));
    return push(std::move(y), [x, shared](Tape& tp, Node self) {
      Tensor2<Real> dx = tp.grad(self);
      for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= (*shared)[i];
      tp.accumulate(x, dx);
    });
  }

  Node dense(Node x, const DenseParams<Real>& params, DenseParams<Real>* grad) {
    auto y = fc_forward(std::span<const Real>(value(x).data), params);
    return push(Tensor2<Real>::column(y), [x, &params, grad](Tape& tp, Node self) {
      const auto& xv = tp.value(x);
      auto dx = fc_backward(std::span<const Real>(xv.data), params, std::span<const Real>(tp.grad(self).data), grad);
      Tensor2<Real> g(xv.channels, xv.steps);
      g.data = std::move(dx);
      tp.accumulate(x, g);
    });
  }

  Node select_channels(Node x, std::vector<std::size_t> channels) {
    const auto& v = value(x);
    Tensor2<Real> y(channels.size(), v.steps);
    for (std::size_t k = 0; k < channels.size(); ++k) {
      if (channels[k] >= v.channels) throw StructuralError("select_channels: channel index out of range");
      std::copy(v.row(channels[k]).begin(), v.row(channels[k]).end(), y.row(k).begin());
    }
    return push(std::move(y), [x, channels = std::move(channels)](Tape& tp, Node self) {
      const auto& g = tp.grad(self);
      const auto& xv = tp.value(x);
      Tensor2<Real> dx(xv.channels, xv.steps);
      for (std::size_t k = 0; k < channels.size(); ++k) {
        for (std::size_t t = 0; t < xv.steps; ++t) dx(channels[k], t) += g(k, t);
      }
      tp.accumulate(x, dx);
    });
  }

  Node concat_channels(std::vector<Node> parts) {
    if (parts.empty()) throw StructuralError("concat_channels: nothing to concatenate");
    const std::size_t steps = value(parts.front()).steps;
    std::size_t total = 0;
    for (Node p : parts) {
      if (value(p).steps != steps) throw StructuralError("concat_channels: step counts differ");
      total += value(p).channels;
    }
    Tensor2<Real> y(total, steps);
    std::size_t offset = 0;
    for (Node p : parts) {
      const auto& v = value(p);
      std::copy(v.data.begin(), v.data.end(), y.data.begin() + offset * steps);
      offset += v.channels;
    }
    return push(std::move(y), [parts = std::move(parts)](Tape& tp, Node self) {
      const auto& g = tp.grad(self);
      std::size_t offset = 0;
      for (Node p : parts) {
        const auto& v = tp.value(p);
        Tensor2<Real> dx(v.channels, v.steps);
        std::copy(g.data.begin() + offset * g.steps, g.data.begin() + (offset + v.channels) * g.steps,
                  dx.data.begin());
        tp.accumulate(p, dx);
        offset += v.channels;
      }
    });
  }

  const Tensor2<Real>& value(Node n) const { return at(n).value; }
  const Tensor2<Real>& grad(Node n) const { return at(n).grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Seeds d(loss)/d(out) = upstream and propagates to every recorded node and bound parameter.
  void backward(Node out, const Tensor2<Real>& upstream) {
    if (nodes_.empty() || out >= nodes_.size()) throw UsageError("backward called before a recorded forward pass");
    if (upstream.channels != nodes_[out].value.channels || upstream.steps != nodes_[out].value.steps) {
      throw StructuralError("backward: upstream gradient shape does not match output");
    }
    for (auto& n : nodes_) n.grad = Tensor2<Real>(n.value.channels, n.value.steps);
    nodes_[out].grad = upstream;
    for (Node k = out + 1; k-- > 0;) {
      if (nodes_[k].backward) nodes_[k].backward(*this, k);
    }
  }

  void clear() { nodes_.clear(); }

 private:
  using BackwardFn = std::function<void(Tape&, Node)>;

  struct Record {
    Tensor2<Real> value;
    Tensor2<Real> grad;
    BackwardFn backward;
  };

  Node push(Tensor2<Real> value, BackwardFn fn) {
    nodes_.push_back(Record{std::move(value), {}, std::move(fn)});
    return nodes_.size() - 1;
  }

  Node identity(Node x) {
    return push(value(x), [x](Tape& tp, Node self) { tp.accumulate(x, tp.grad(self)); });
  }

  void accumulate(Node n, const Tensor2<Real>& g) {
    auto& dst = nodes_[n].grad.data;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g.data[i];
  }

  const Record& at(Node n) const {
    if (n >= nodes_.size()) throw UsageError("tape: unknown node");
    return nodes_[n];
  }

  std::vector<Record> nodes_;
};

}  // namespace inertia
