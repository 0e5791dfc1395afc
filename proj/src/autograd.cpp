// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfar/error.hpp"

namespace sfar {

std::string to_string(const Shape& s) {
  return "[" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + "]";
}

// ---------------------------------------------------------------- ParamSet

ParamId ParamSet::add(const std::string& name, Shape shape) {
  if (by_name_.count(name)) throw Error("duplicate parameter name: " + name);
  if (shape.size() == 0) throw Error("parameter " + name + " has an empty shape");
  by_name_[name] = params_.size();
  params_.push_back(Parameter{name, shape, std::vector<double>(shape.size(), 0.0)});
  return ParamId{params_.size() - 1};
}

ParamId ParamSet::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? ParamId{} : ParamId{it->second};
}

ParamId ParamSet::require(const std::string& name) const {
  ParamId id = find(name);
  if (!id.valid()) throw Error("unknown parameter: " + name);
  return id;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamSet::round_to_f32() {
  for (auto& p : params_)
    for (double& v : p.value) v = static_cast<double>(static_cast<float>(v));
}

// -------------------------------------------------------------- GradBuffer

GradBuffer::GradBuffer(const ParamSet& params) {
  grads_.reserve(params.size());
  for (const auto& p : params) grads_.emplace_back(p.value.size(), 0.0);
}

void GradBuffer::zero() {
  for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

double GradBuffer::global_norm() const {
  double sq = 0.0;
  for (const auto& g : grads_)
    for (double v : g) sq += v * v;
  return std::sqrt(sq);
}

void GradBuffer::scale(double factor) {
  for (auto& g : grads_)
    for (double& v : g) v *= factor;
}

void GradBuffer::add(const GradBuffer& other) {
  if (other.grads_.size() != grads_.size()) throw Error("gradient buffers do not match");
  for (std::size_t i = 0; i < grads_.size(); ++i)
    for (std::size_t j = 0; j < grads_[i].size(); ++j) grads_[i][j] += other.grads_[i][j];
}

// ------------------------------------------------------------------ Tensor

const Shape& Tensor::shape() const { return graph_->node(id_).shape; }

std::span<const double> Tensor::values() const {
  const auto& n = graph_->node(id_);
  return {n.value(), n.shape.size()};
}

double Tensor::item() const {
  if (size() != 1) throw Error("item() on a tensor of shape " + to_string(shape()));
  return values()[0];
}

std::span<const double> Tensor::grad() const {
  auto& n = graph_->node(id_);
  if (!n.requires_grad) return {};
  if (!n.external_grad && n.grad_data.empty()) return {};
  return {n.grad(), n.shape.size()};
}

// ------------------------------------------------------------------- Graph

Graph::Graph(const ParamSet& params, GradBuffer* grads, Precision precision)
    : params_(&params), grads_(grads), precision_(precision) {
  if (grads && grads->size() != params.size())
    throw Error("gradient buffer was built for a different parameter set");
  nodes_.reserve(1024);
}

Tensor Graph::param(ParamId id) {
  auto it = param_nodes_.find(id.index);
  if (it != param_nodes_.end()) return Tensor(this, it->second);
  const Parameter& p = (*params_)[id];
  Node n;
  n.shape = p.shape;
  n.external = p.value.data();
  if (grads_) {
    n.requires_grad = true;
    n.external_grad = (*grads_)[id].data();
  }
  nodes_.push_back(std::move(n));
  param_nodes_[id.index] = nodes_.size() - 1;
  return Tensor(this, nodes_.size() - 1);
}

Tensor Graph::constant(std::vector<double> values, Shape shape) {
  if (values.size() != shape.size()) throw Error("constant: data does not match shape");
  return emit(shape, std::move(values), {}, nullptr);
}

Tensor Graph::constant(std::vector<double> values) {
  Shape s{values.size(), 1};
  return constant(std::move(values), s);
}

Tensor Graph::zeros(std::size_t n) { return constant(std::vector<double>(n, 0.0)); }

Tensor Graph::scalar(double v) { return constant(std::vector<double>{v}); }

Tensor Graph::emit(Shape shape, std::vector<double> data, std::vector<std::size_t> inputs,
                   std::function<void(Graph&, std::size_t)> backprop) {
  if (precision_ == Precision::f32)
    for (double& v : data) v = static_cast<double>(static_cast<float>(v));
  Node n;
  n.shape = shape;
  n.data = std::move(data);
  for (std::size_t in : inputs) n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

std::span<double> Graph::grad_of(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.external_grad && n.grad_data.size() != n.shape.size()) n.grad_data.assign(n.shape.size(), 0.0);
  return {n.grad(), n.shape.size()};
}

void Graph::backward(Tensor loss) {
  if (!grads_) throw Error("backward on a graph built without a gradient buffer");
  if (&loss.graph() != this) throw Error("backward: tensor belongs to another graph");
  if (loss.size() != 1) throw Error("backward requires a scalar loss, got " + to_string(loss.shape()));
  for (std::size_t i = 0; i <= loss.id(); ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad && !n.external_grad) n.grad_data.assign(n.shape.size(), 0.0);
  }
  if (!nodes_[loss.id()].requires_grad) return;
  grad_of(loss.id())[0] += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backprop) n.backprop(*this, i);
  }
}

// --------------------------------------------------------------------- ops

namespace ad {
namespace {

void require_same_graph(Tensor a, Tensor b) {
  if (&a.graph() != &b.graph()) throw Error("tensors belong to different graphs");
}

void require_vector(Tensor a, const char* op) {
  if (!a.shape().is_vector()) throw Error(std::string(op) + ": expected a vector, got " + to_string(a.shape()));
}

void require_same_shape(Tensor a, Tensor b, const char* op) {
  require_same_graph(a, b);
  if (a.shape() != b.shape())
    throw Error(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
}

bool needs(Graph& g, std::size_t id) { return g.node(id).requires_grad; }

const double* val(Graph& g, std::size_t id) { return g.node(id).value(); }

// Elementwise unary op whose derivative is expressed through the output y
// (and input x when needed).
template <class Fwd, class Deriv>
Tensor unary(Tensor x, Fwd f, Deriv d) {
  Graph& g = x.graph();
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return g.emit(x.shape(), std::move(out), {x.id()}, [d](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double* go = n.grad();
    const double* y = n.value();
    const double* xv = val(g, in);
    auto gi = g.grad_of(in);
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += go[i] * d(xv[i], y[i]);
  });
}

}  // namespace

Tensor add(Tensor a, Tensor b) {
  require_same_shape(a, b, "add");
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return a.graph().emit(a.shape(), std::move(out), {a.id(), b.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    for (std::size_t in : n.inputs) {
      if (!needs(g, in)) continue;
      auto gi = g.grad_of(in);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += go[i];
    }
  });
}

Tensor sub(Tensor a, Tensor b) {
  require_same_shape(a, b, "sub");
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return a.graph().emit(a.shape(), std::move(out), {a.id(), b.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    for (std::size_t k = 0; k < 2; ++k) {
      std::size_t in = n.inputs[k];
      if (!needs(g, in)) continue;
      double sign = k == 0 ? 1.0 : -1.0;
      auto gi = g.grad_of(in);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += sign * go[i];
    }
  });
}

Tensor mul(Tensor a, Tensor b) {
  require_same_shape(a, b, "mul");
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return a.graph().emit(a.shape(), std::move(out), {a.id(), b.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    std::size_t ia = n.inputs[0], ib = n.inputs[1];
    const double* va = val(g, ia);
    const double* vb = val(g, ib);
    if (needs(g, ia)) {
      auto gi = g.grad_of(ia);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += go[i] * vb[i];
    }
    if (needs(g, ib)) {
      auto gi = g.grad_of(ib);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += go[i] * va[i];
    }
  });
}

Tensor scale(Tensor a, double factor) {
  return unary(a, [factor](double x) { return x * factor; }, [factor](double, double) { return factor; });
}

Tensor add_n(std::span<const Tensor> xs) {
  if (xs.empty()) throw Error("add_n of an empty list");
  Graph& g = xs[0].graph();
  std::vector<double> out(xs[0].size(), 0.0);
  std::vector<std::size_t> ids;
  for (const Tensor& t : xs) {
    require_same_shape(xs[0], t, "add_n");
    auto v = t.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    ids.push_back(t.id());
  }
  return g.emit(xs[0].shape(), std::move(out), std::move(ids), [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    for (std::size_t in : n.inputs) {
      if (!needs(g, in)) continue;
      auto gi = g.grad_of(in);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += go[i];
    }
  });
}

Tensor matvec(Tensor m, Tensor x) {
  require_same_graph(m, x);
  require_vector(x, "matvec");
  const std::size_t rows = m.shape().rows, cols = m.shape().cols;
  if (x.size() != cols)
    throw Error("matvec: matrix " + to_string(m.shape()) + " times vector " + to_string(x.shape()));
  const double* w = m.values().data();
  const double* xv = x.values().data();
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * xv[c];
    out[r] = acc;
  }
  return m.graph().emit({rows, 1}, std::move(out), {m.id(), x.id()}, [rows, cols](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    std::size_t im = n.inputs[0], ix = n.inputs[1];
    const double* w = val(g, im);
    const double* xv = val(g, ix);
    if (needs(g, im)) {
      double* gw = g.grad_of(im).data();
      for (std::size_t r = 0; r < rows; ++r) {
        const double gr = go[r];
        if (gr == 0.0) continue;
        double* row = gw + r * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] += gr * xv[c];
      }
    }
    if (needs(g, ix)) {
      double* gx = g.grad_of(ix).data();
      for (std::size_t r = 0; r < rows; ++r) {
        const double gr = go[r];
        if (gr == 0.0) continue;
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) gx[c] += wr[c] * gr;
      }
    }
  });
}

Tensor row(Tensor m, std::size_t index) {
  const std::size_t rows = m.shape().rows, cols = m.shape().cols;
  if (index >= rows)
    throw Error("row " + std::to_string(index) + " out of range for " + to_string(m.shape()));
  auto mv = m.values();
  std::vector<double> out(mv.begin() + static_cast<std::ptrdiff_t>(index * cols),
                          mv.begin() + static_cast<std::ptrdiff_t>((index + 1) * cols));
  return m.graph().emit({cols, 1}, std::move(out), {m.id()}, [index, cols](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double* go = n.grad();
    double* gm = g.grad_of(in).data() + index * cols;
    for (std::size_t c = 0; c < cols; ++c) gm[c] += go[c];
  });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw Error("concat of an empty list");
  Graph& g = parts[0].graph();
  std::vector<double> out;
  std::vector<std::size_t> ids;
  for (const Tensor& t : parts) {
    require_same_graph(parts[0], t);
    require_vector(t, "concat");
    auto v = t.values();
    out.insert(out.end(), v.begin(), v.end());
    ids.push_back(t.id());
  }
  const std::size_t total = out.size();
  return g.emit({total, 1}, std::move(out), std::move(ids), [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    std::size_t offset = 0;
    for (std::size_t in : n.inputs) {
      const std::size_t len = g.node(in).shape.size();
      if (needs(g, in)) {
        auto gi = g.grad_of(in);
        for (std::size_t i = 0; i < len; ++i) gi[i] += go[offset + i];
      }
      offset += len;
    }
  });
}

Tensor slice(Tensor x, std::size_t offset, std::size_t length) {
  require_vector(x, "slice");
  if (offset + length > x.size() || length == 0) throw Error("slice out of range");
  auto xv = x.values();
  std::vector<double> out(xv.begin() + static_cast<std::ptrdiff_t>(offset),
                          xv.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return x.graph().emit({length, 1}, std::move(out), {x.id()}, [offset, length](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double* go = n.grad();
    auto gi = g.grad_of(in);
    for (std::size_t i = 0; i < length; ++i) gi[offset + i] += go[i];
  });
}

Tensor tanh(Tensor x) {
  return unary(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(Tensor x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(Tensor x) {
  return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(Tensor x) {
  return unary(x, [](double v) { return std::log(v); }, [](double xv, double) { return 1.0 / xv; });
}

Tensor dot(Tensor a, Tensor b) {
  require_same_graph(a, b);
  require_vector(a, "dot");
  require_vector(b, "dot");
  if (a.size() != b.size()) throw Error("dot: length mismatch");
  auto av = a.values(), bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return a.graph().emit({1, 1}, {acc}, {a.id(), b.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double go = n.grad()[0];
    std::size_t ia = n.inputs[0], ib = n.inputs[1];
    const double* va = val(g, ia);
    const double* vb = val(g, ib);
    const std::size_t len = g.node(ia).shape.size();
    if (needs(g, ia)) {
      auto gi = g.grad_of(ia);
      for (std::size_t i = 0; i < len; ++i) gi[i] += go * vb[i];
    }
    if (needs(g, ib)) {
      auto gi = g.grad_of(ib);
      for (std::size_t i = 0; i < len; ++i) gi[i] += go * va[i];
    }
  });
}

Tensor sum(Tensor x) {
  auto xv = x.values();
  double acc = 0.0;
  for (double v : xv) acc += v;
  return x.graph().emit({1, 1}, {acc}, {x.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double go = n.grad()[0];
    for (double& v : g.grad_of(in)) v += go;
  });
}

Tensor pick(Tensor x, std::size_t index) {
  if (index >= x.size()) throw Error("pick: index out of range");
  return x.graph().emit({1, 1}, {x.values()[index]}, {x.id()}, [index](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    g.grad_of(in)[index] += n.grad()[0];
  });
}

namespace {

std::vector<double> stable_softmax(std::span<const double> x, const std::vector<bool>* mask) {
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i])) throw NumericError("softmax: NaN input");
    if (mask && !(*mask)[i]) continue;
    mx = std::max(mx, x[i]);
    any = true;
  }
  if (!any) throw Error("softmax: every position is masked");
  std::vector<double> out(x.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    out[i] = std::exp(x[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

void softmax_backward(Graph& g, std::size_t self) {
  auto& n = g.node(self);
  std::size_t in = n.inputs[0];
  if (!needs(g, in)) return;
  const double* go = n.grad();
  const double* y = n.value();
  const std::size_t len = n.shape.size();
  double inner = 0.0;
  for (std::size_t i = 0; i < len; ++i) inner += go[i] * y[i];
  auto gi = g.grad_of(in);
  for (std::size_t i = 0; i < len; ++i) gi[i] += y[i] * (go[i] - inner);
}

}  // namespace

Tensor softmax(Tensor x) {
  require_vector(x, "softmax");
  return x.graph().emit(x.shape(), stable_softmax(x.values(), nullptr), {x.id()}, softmax_backward);
}

Tensor masked_softmax(Tensor x, const std::vector<bool>& mask) {
  require_vector(x, "masked_softmax");
  if (mask.size() != x.size()) throw Error("masked_softmax: mask length mismatch");
  // Masked outputs are exactly zero, so the generic softmax Jacobian applies.
  return x.graph().emit(x.shape(), stable_softmax(x.values(), &mask), {x.id()}, softmax_backward);
}

Tensor log_softmax(Tensor x) {
  require_vector(x, "log_softmax");
  auto xv = x.values();
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : xv) {
    if (std::isnan(v)) throw NumericError("log_softmax: NaN input");
    mx = std::max(mx, v);
  }
  double z = 0.0;
  for (double v : xv) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] - lse;
  return x.graph().emit(x.shape(), std::move(out), {x.id()}, [](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double* go = n.grad();
    const double* y = n.value();
    const std::size_t len = n.shape.size();
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) total += go[i];
    auto gi = g.grad_of(in);
    for (std::size_t i = 0; i < len; ++i) gi[i] += go[i] - std::exp(y[i]) * total;
  });
}

Tensor weighted_sum(Tensor weights, std::span<const Tensor> vectors) {
  require_vector(weights, "weighted_sum");
  if (vectors.empty() || weights.size() != vectors.size())
    throw Error("weighted_sum: weights and vectors disagree in count");
  Graph& g = weights.graph();
  const std::size_t dim = vectors[0].size();
  std::vector<double> out(dim, 0.0);
  std::vector<std::size_t> ids{weights.id()};
  auto wv = weights.values();
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    require_same_graph(weights, vectors[k]);
    if (vectors[k].size() != dim) throw Error("weighted_sum: vectors differ in length");
    auto v = vectors[k].values();
    for (std::size_t i = 0; i < dim; ++i) out[i] += wv[k] * v[i];
    ids.push_back(vectors[k].id());
  }
  return g.emit({dim, 1}, std::move(out), std::move(ids), [dim](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    const double* go = n.grad();
    std::size_t iw = n.inputs[0];
    const double* w = val(g, iw);
    const bool need_w = needs(g, iw);
    for (std::size_t k = 1; k < n.inputs.size(); ++k) {
      std::size_t iv = n.inputs[k];
      const double* v = val(g, iv);
      if (need_w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) acc += go[i] * v[i];
        g.grad_of(iw)[k - 1] += acc;
      }
      if (needs(g, iv)) {
        auto gv = g.grad_of(iv);
        for (std::size_t i = 0; i < dim; ++i) gv[i] += w[k - 1] * go[i];
      }
    }
  });
}

Tensor binary_cross_entropy(Tensor probs, const std::vector<double>& labels, double eps) {
  require_vector(probs, "binary_cross_entropy");
  if (labels.size() != probs.size()) throw Error("binary_cross_entropy: label count mismatch");
  auto pv = probs.values();
  double loss = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double p = std::clamp(pv[i], eps, 1.0 - eps);
    loss -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return probs.graph().emit({1, 1}, {loss}, {probs.id()}, [labels, eps](Graph& g, std::size_t self) {
    auto& n = g.node(self);
    std::size_t in = n.inputs[0];
    if (!needs(g, in)) return;
    const double go = n.grad()[0];
    const double* pv = val(g, in);
    auto gi = g.grad_of(in);
    for (std::size_t i = 0; i < gi.size(); ++i) {
      if (pv[i] < eps || pv[i] > 1.0 - eps) continue;  // clamped: flat
      gi[i] += go * (-labels[i] / pv[i] + (1.0 - labels[i]) / (1.0 - pv[i]));
    }
  });
}

Tensor dropout(Tensor x, double p, bool training, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw Error("dropout probability must be in [0, 1), got " + std::to_string(p));
  if (!training || p == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = keep(rng) ? 1.0 / (1.0 - p) : 0.0;
  return mul(x, x.graph().constant(std::move(mask), x.shape()));
}

}  // namespace ad

void init_glorot_uniform(Parameter& p, std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(p.shape.cols);
  const double fan_out = static_cast<double>(p.shape.rows);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : p.value) v = dist(rng);
}

void init_normal(Parameter& p, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : p.value) v = dist(rng);
}

}  // namespace sfar
