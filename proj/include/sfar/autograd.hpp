// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal define-by-run reverse-mode automatic differentiation.
//
// A Graph records every operation applied to its tensors and replays them in
// reverse on backward(). Trainable weights live in a ParamSet, outside of any
// graph; a graph only borrows them. Gradients land in a GradBuffer supplied at
// graph construction, so several graphs can accumulate into the same buffer.
//
// Values are stored as doubles. In Precision::f32 mode every op result is
// rounded to binary32 so the numbers behave like float storage; f64 mode keeps
// full precision for finite-difference checks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sfar {

enum class Precision { f32, f64 };

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
  bool is_vector() const { return cols == 1; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// A named trainable array. Vectors use cols == 1.
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
};

struct ParamId {
  std::size_t index = static_cast<std::size_t>(-1);
  bool valid() const { return index != static_cast<std::size_t>(-1); }
};

class ParamSet {
 public:
  ParamId add(const std::string& name, Shape shape);
  ParamId find(const std::string& name) const;
  ParamId require(const std::string& name) const;

  Parameter& operator[](ParamId id) { return params_.at(id.index); }
  const Parameter& operator[](ParamId id) const { return params_.at(id.index); }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  /// Rounds every stored value to binary32.
  void round_to_f32();

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> by_name_;
};

/// Gradient storage aligned with a ParamSet.
class GradBuffer {
 public:
  GradBuffer() = default;
  explicit GradBuffer(const ParamSet& params);

  std::span<double> operator[](ParamId id) { return grads_.at(id.index); }
  std::span<const double> operator[](ParamId id) const { return grads_.at(id.index); }
  std::size_t size() const { return grads_.size(); }

  void zero();
  double global_norm() const;
  void scale(double factor);
  void add(const GradBuffer& other);

 private:
  std::vector<std::vector<double>> grads_;
};

class Graph;

/// Handle to a node of a Graph. Cheap to copy; only valid while the graph lives.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Graph* g, std::size_t id) : graph_(g), id_(id) {}

  bool defined() const { return graph_ != nullptr; }
  Graph& graph() const { return *graph_; }
  std::size_t id() const { return id_; }

  const Shape& shape() const;
  std::size_t size() const { return shape().size(); }
  std::span<const double> values() const;
  double item() const;
  double operator[](std::size_t i) const { return values()[i]; }
  /// Gradient after backward(); empty if the node does not require grad.
  std::span<const double> grad() const;

 private:
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  /// `grads` may be null, in which case nothing requires grad and backward is
  /// unavailable (inference mode).
  explicit Graph(const ParamSet& params, GradBuffer* grads = nullptr,
                 Precision precision = Precision::f32);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor param(ParamId id);
  Tensor constant(std::vector<double> values, Shape shape);
  Tensor constant(std::vector<double> values);
  Tensor zeros(std::size_t n);
  Tensor scalar(double v);

  /// Populates gradients of every reachable parameter. Parameter gradients
  /// accumulate across calls; intermediate gradients are reset each call.
  void backward(Tensor loss);

  Precision precision() const { return precision_; }
  bool tracks_grad() const { return grads_ != nullptr; }
  std::size_t node_count() const { return nodes_.size(); }

  // Op construction interface, used by the functions in namespace ad.
  struct Node {
    Shape shape;
    std::vector<double> data;
    const double* external = nullptr;
    std::vector<double> grad_data;
    double* external_grad = nullptr;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    std::function<void(Graph&, std::size_t)> backprop;

    const double* value() const { return external ? external : data.data(); }
    double* grad() { return external_grad ? external_grad : grad_data.data(); }
  };

  Node& node(std::size_t id) { return nodes_[id]; }
  const Node& node(std::size_t id) const { return nodes_[id]; }

  /// Adds a computed node. `inputs` decide whether it requires grad.
  Tensor emit(Shape shape, std::vector<double> data, std::vector<std::size_t> inputs,
              std::function<void(Graph&, std::size_t)> backprop);
  /// Mutable view of a node's gradient (allocating it if needed).
  std::span<double> grad_of(std::size_t id);

 private:
  const ParamSet* params_;
  GradBuffer* grads_;
  Precision precision_;
  std::vector<Node> nodes_;
  std::map<std::size_t, std::size_t> param_nodes_;
};

/// Differentiable operations. Vectors are tensors with cols == 1.
namespace ad {

Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);
Tensor scale(Tensor a, double factor);
/// Sum of same-shaped tensors, accumulated left to right.
Tensor add_n(std::span<const Tensor> xs);
/// Matrix (rows x cols) times vector (cols) -> vector (rows).
Tensor matvec(Tensor matrix, Tensor x);
/// Row `index` of a matrix, as a vector.
Tensor row(Tensor matrix, std::size_t index);
Tensor concat(std::span<const Tensor> parts);
Tensor slice(Tensor x, std::size_t offset, std::size_t length);
Tensor tanh(Tensor x);
Tensor sigmoid(Tensor x);
Tensor exp(Tensor x);
Tensor log(Tensor x);
/// Inner product of two vectors -> scalar.
Tensor dot(Tensor a, Tensor b);
/// Sum of all elements -> scalar.
Tensor sum(Tensor x);
/// Element `index` of a vector -> scalar.
Tensor pick(Tensor x, std::size_t index);
/// Numerically stable softmax (max subtraction). Throws NumericError on NaN.
Tensor softmax(Tensor x);
Tensor log_softmax(Tensor x);
/// Softmax over the positions where mask is true; masked positions get 0.
/// Throws if every position is masked.
Tensor masked_softmax(Tensor x, const std::vector<bool>& mask);
/// sum_i weights[i] * vectors[i].
Tensor weighted_sum(Tensor weights, std::span<const Tensor> vectors);
/// Binary cross-entropy summed over elements, probabilities clamped to [eps, 1-eps].
Tensor binary_cross_entropy(Tensor probs, const std::vector<double>& labels, double eps = 1e-12);
/// Training: zero each element with probability p and scale survivors by
/// 1/(1-p). Inference: identity. Throws for p outside [0, 1).
Tensor dropout(Tensor x, double p, bool training, std::mt19937_64& rng);

}  // namespace ad

/// Uniform(+-sqrt(6/(fan_in+fan_out))) initialisation of a matrix parameter.
void init_glorot_uniform(Parameter& p, std::mt19937_64& rng);
void init_normal(Parameter& p, double stddev, std::mt19937_64& rng);

}  // namespace sfar
