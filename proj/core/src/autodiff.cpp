#include "vegopt/neuralcore/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "vegopt/error.hpp"

namespace vegopt::neuralcore {

namespace {

Value make(Matrix value, std::vector<std::shared_ptr<Node>> parents, std::function<void(Node&)> rule) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  n->backprop = std::move(rule);
  n->requires_grad = std::any_of(n->parents.begin(), n->parents.end(),
                                 [](const auto& p) { return p->requires_grad; });
  return Value(std::move(n));
}

void require_same_shape(const Value& a, const Value& b, const char* op) {
  if (!a.value().same_shape(b.value()))
    throw InvariantError(std::string(op) + ": operand shapes differ");
}

Matrix& grad_of(const std::shared_ptr<Node>& n) { return n->grad; }

}  // namespace

Value Value::constant(Matrix m) { return make(std::move(m), {}, nullptr); }

Value Value::parameter(Matrix m) {
  auto n = std::make_shared<Node>();
  n->grad = Matrix(m.rows(), m.cols());
  n->value = std::move(m);
  n->is_parameter = true;
  n->requires_grad = true;
  return Value(std::move(n));
}

void backward(const Value& loss) {
  if (!loss.valid() || loss.value().size() != 1)
    throw InvariantError("backward() needs a scalar loss");

  // Iterative DFS post-order; a node met again while still on the stack means a cycle.
  enum class Mark { kOpen, kDone };
  std::unordered_map<const Node*, Mark> marks;
  std::vector<std::shared_ptr<Node>> order;
  std::vector<std::pair<std::shared_ptr<Node>, std::size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  marks[loss.node().get()] = Mark::kOpen;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      const auto parent = node->parents[next++];
      const auto it = marks.find(parent.get());
      if (it == marks.end()) {
        marks[parent.get()] = Mark::kOpen;
        stack.emplace_back(parent, 0);
      } else if (it->second == Mark::kOpen) {
        throw InvariantError("computation graph contains a cycle");
      }
      continue;
    }
    marks[node.get()] = Mark::kDone;
    order.push_back(node);
    stack.pop_back();
  }

  for (const auto& n : order) {
    if (n->is_parameter) {
      if (!n->grad.same_shape(n->value)) n->grad = Matrix(n->value.rows(), n->value.cols());
    } else {
      n->grad = Matrix(n->value.rows(), n->value.cols());
    }
  }
  loss.node()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop && (*it)->requires_grad) (*it)->backprop(**it);
}

// ---------------------------------------------------------------------------

Value add(const Value& a, const Value& b) {
  require_same_shape(a, b, "add");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make(std::move(out), {a.node(), b.node()}, [](Node& n) {
    for (auto& p : n.parents)
      for (std::size_t i = 0; i < n.grad.size(); ++i) grad_of(p)[i] += n.grad[i];
  });
}

Value sub(const Value& a, const Value& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make(std::move(out), {a.node(), b.node()}, [](Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      grad_of(n.parents[0])[i] += n.grad[i];
      grad_of(n.parents[1])[i] -= n.grad[i];
    }
  });
}

Value mul(const Value& a, const Value& b) {
  require_same_shape(a, b, "mul");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make(std::move(out), {a.node(), b.node()}, [](Node& n) {
    const auto& pa = n.parents[0];
    const auto& pb = n.parents[1];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      pa->grad[i] += n.grad[i] * pb->value[i];
      pb->grad[i] += n.grad[i] * pa->value[i];
    }
  });
}

Value scale(const Value& a, double s) {
  Matrix out = a.value();
  for (auto& v : out.data()) v *= s;
  return make(std::move(out), {a.node()}, [s](Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += s * n.grad[i];
  });
}

Value square(const Value& a) { return mul(a, a); }

Value relu(const Value& a) {
  Matrix out = a.value();
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return make(std::move(out), {a.node()}, [](Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (n.value[i] > 0.0) n.parents[0]->grad[i] += n.grad[i];
  });
}

Value exp(const Value& a) {
  Matrix out = a.value();
  for (auto& v : out.data()) v = std::exp(v);
  return make(std::move(out), {a.node()}, [](Node& n) {
    for (std::size_t i = 0; i < n.grad.size(); ++i) n.parents[0]->grad[i] += n.grad[i] * n.value[i];
  });
}

Value log(const Value& a) {
  Matrix out = a.value();
  for (auto& v : out.data()) v = std::log(v);
  return make(std::move(out), {a.node()}, [](Node& n) {
    const auto& p = n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i] / p->value[i];
  });
}

Value sum(const Value& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return make(Matrix(1, 1, s), {a.node()}, [](Node& n) {
    for (auto& g : n.parents[0]->grad.data()) g += n.grad[0];
  });
}

Value mean(const Value& a) {
  if (a.value().empty()) throw InvariantError("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Value matmul(const Value& a, const Value& b) {
  const auto& A = a.value();
  const auto& B = b.value();
  if (A.cols() != B.rows()) throw InvariantError("matmul: inner dimensions differ");
  Matrix out(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double aik = A(i, k);
      for (std::size_t j = 0; j < B.cols(); ++j) out(i, j) += aik * B(k, j);
    }
  return make(std::move(out), {a.node(), b.node()}, [](Node& n) {
    const auto& pa = n.parents[0];
    const auto& pb = n.parents[1];
    const auto& A = pa->value;
    const auto& B = pb->value;
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (std::size_t k = 0; k < A.cols(); ++k) {
        double ga = 0.0;
        const double aik = A(i, k);
        for (std::size_t j = 0; j < B.cols(); ++j) {
          ga += n.grad(i, j) * B(k, j);
          pb->grad(k, j) += aik * n.grad(i, j);
        }
        pa->grad(i, k) += ga;
      }
  });
}

Value transpose(const Value& a) {
  const auto& A = a.value();
  Matrix out(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) out(j, i) = A(i, j);
  return make(std::move(out), {a.node()}, [](Node& n) {
    auto& g = n.parents[0]->grad;
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) += n.grad(j, i);
  });
}

Value concat_rows(const Value& a, const Value& b) {
  if (a.cols() != b.cols()) throw InvariantError("concat_rows: column counts differ");
  Matrix out(a.rows() + b.rows(), a.cols());
  std::copy(a.value().data().begin(), a.value().data().end(), out.data().begin());
  std::copy(b.value().data().begin(), b.value().data().end(),
            out.data().begin() + static_cast<std::ptrdiff_t>(a.value().size()));
  return make(std::move(out), {a.node(), b.node()}, [](Node& n) {
    const auto split = n.parents[0]->grad.size();
    for (std::size_t i = 0; i < split; ++i) n.parents[0]->grad[i] += n.grad[i];
    for (std::size_t i = split; i < n.grad.size(); ++i) n.parents[1]->grad[i - split] += n.grad[i];
  });
}

Value row(const Value& a, std::size_t r) {
  if (r >= a.rows()) throw InvariantError("row index out of range");
  const auto src = a.value().row(r);
  return make(Matrix::row_vector(src), {a.node()}, [r](Node& n) {
    auto dst = n.parents[0]->grad.row(r);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += n.grad[j];
  });
}

Value element(const Value& a, std::size_t i) {
  if (i >= a.value().size()) throw InvariantError("element index out of range");
  return make(Matrix(1, 1, a.value()[i]), {a.node()},
              [i](Node& n) { n.parents[0]->grad[i] += n.grad[0]; });
}

Value softmax(const Value& a) {
  if (a.value().empty()) throw InvariantError("softmax of empty tensor");
  Matrix out = a.value();
  const double peak = *std::max_element(out.data().begin(), out.data().end());
  double total = 0.0;
  for (auto& v : out.data()) {
    v = std::exp(v - peak);
    total += v;
  }
  for (auto& v : out.data()) v /= total;
  return make(std::move(out), {a.node()}, [](Node& n) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n.grad.size(); ++i) dot += n.grad[i] * n.value[i];
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      n.parents[0]->grad[i] += n.value[i] * (n.grad[i] - dot);
  });
}

Value mse_loss(const Value& prediction, const Value& target) {
  return mean(square(sub(prediction, target)));
}

Value softmax_cross_entropy(const Value& logits, std::size_t label) {
  return scale(log(element(softmax(logits), label)), -1.0);
}

Value causal_conv1d(const Value& x, const Value& kernel, const Value& bias, int kernel_size,
                    int dilation) {
  const auto& X = x.value();
  const auto& W = kernel.value();
  const auto T = X.rows();
  const auto cin = X.cols();
  const auto K = static_cast<std::size_t>(kernel_size);
  const auto d = static_cast<std::size_t>(dilation);
  if (kernel_size < 1 || dilation < 1) throw InvariantError("conv: kernel size and dilation must be >= 1");
  if (W.rows() != K * cin) throw InvariantError("conv: kernel rows must equal K * C_in");
  const auto cout = W.cols();
  if (bias.value().size() != cout) throw InvariantError("conv: bias length must equal C_out");

  Matrix out(T, cout);
  for (std::size_t t = 0; t < T; ++t) {
    auto y = out.row(t);
    for (std::size_t co = 0; co < cout; ++co) y[co] = bias.value()[co];
    for (std::size_t r = 0; r < K && r * d <= t; ++r) {
      const auto xs = X.row(t - r * d);
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double xv = xs[ci];
        if (xv == 0.0) continue;
        const auto w = W.row(r * cin + ci);
        for (std::size_t co = 0; co < cout; ++co) y[co] += xv * w[co];
      }
    }
  }
  return make(std::move(out), {x.node(), kernel.node(), bias.node()}, [K, d](Node& n) {
    const auto& px = n.parents[0];
    const auto& pw = n.parents[1];
    const auto& pb = n.parents[2];
    const auto& X = px->value;
    const auto& W = pw->value;
    const auto T = X.rows();
    const auto cin = X.cols();
    const auto cout = W.cols();
    const bool want_x = px->requires_grad;
    for (std::size_t t = 0; t < T; ++t) {
      const auto g = n.grad.row(t);
      for (std::size_t co = 0; co < cout; ++co) pb->grad[co] += g[co];
      for (std::size_t r = 0; r < K && r * d <= t; ++r) {
        const auto src = t - r * d;
        const auto xs = X.row(src);
        for (std::size_t ci = 0; ci < cin; ++ci) {
          const auto w = W.row(r * cin + ci);
          auto gw = pw->grad.row(r * cin + ci);
          const double xv = xs[ci];
          double gx = 0.0;
          for (std::size_t co = 0; co < cout; ++co) {
            gw[co] += xv * g[co];
            gx += w[co] * g[co];
          }
          if (want_x) px->grad(src, ci) += gx;
        }
      }
    }
  });
}

namespace detail {

void link(const Value& child, const Value& parent) { child.node()->parents.push_back(parent.node()); }

}  // namespace detail

}  // namespace vegopt::neuralcore
