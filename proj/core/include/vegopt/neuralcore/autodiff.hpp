#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vegopt/matrix.hpp"

namespace vegopt::neuralcore {

// Reverse-mode differentiation over a DAG of matrix-valued nodes. Each node
// owns its value and a gradient slot of the same shape; the backprop rule of
// an operation reads the node's gradient and accumulates into its parents.
struct Node {
  Matrix value;
  Matrix grad;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;
  bool is_parameter = false;
  bool requires_grad = false;  // a parameter is reachable through the parents
};

class Value {
 public:
  Value() = default;
  explicit Value(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  // Leaf without gradient tracking.
  static Value constant(Matrix m);
  static Value scalar(double v) { return constant(Matrix(1, 1, v)); }
  // Leaf with a persistent gradient slot; gradients accumulate until zeroed.
  static Value parameter(Matrix m);

  const Matrix& value() const { return node_->value; }
  Matrix& value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  Matrix& grad() { return node_->grad; }
  double item() const { return node_->value[0]; }

  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }

  bool valid() const { return static_cast<bool>(node_); }
  bool is_parameter() const { return node_->is_parameter; }
  void zero_grad() { node_->grad.fill(0.0); }

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Fills gradients of every node reachable from `loss` (a 1×1 node) with
// d loss / d node along every path that reaches a parameter (constant-only
// subgraphs keep zero gradients). Throws InvariantError when loss is not scalar or the graph
// contains a cycle.
void backward(const Value& loss);

// --- elementwise -----------------------------------------------------------
Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value scale(const Value& a, double s);
Value square(const Value& a);
Value relu(const Value& a);
Value exp(const Value& a);
Value log(const Value& a);

// --- reductions and reshaping ---------------------------------------------
Value sum(const Value& a);
Value mean(const Value& a);
Value matmul(const Value& a, const Value& b);
Value transpose(const Value& a);
// Stack the rows of a on top of the rows of b (equal column counts).
Value concat_rows(const Value& a, const Value& b);
Value row(const Value& a, std::size_t r);
Value element(const Value& a, std::size_t i);
// Softmax over all entries of a vector, computed with max subtraction.
Value softmax(const Value& a);

Value mse_loss(const Value& prediction, const Value& target);
// -log softmax(logits)[label]
Value softmax_cross_entropy(const Value& logits, std::size_t label);

// --- convolution ------------------------------------------------------------
// x: T×C_in, kernel: (K·C_in)×C_out with row r·C_in + ci holding tap r,
// bias: 1×C_out. y[t] = bias + Σ_r x[t − r·dilation] · w[r], zero left padding.
Value causal_conv1d(const Value& x, const Value& kernel, const Value& bias, int kernel_size,
                    int dilation);

namespace detail {
// Adds an edge child -> parent after construction. Exists only so tests can
// build a cyclic graph; regular operations never mutate parents.
void link(const Value& child, const Value& parent);
}  // namespace detail

}  // namespace vegopt::neuralcore
