#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vegopt/neuralcore/autodiff.hpp"
#include "vegopt/random.hpp"

namespace vegopt::neuralcore {

/// Named trainable tensors of one model, in a stable order.
class ParamSet {
 public:
  void add(std::string name, Value v) { items_.emplace_back(std::move(name), std::move(v)); }
  void append(const ParamSet& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;
  const std::pair<std::string, Value>& operator[](std::size_t i) const { return items_[i]; }

  void zero_grad() const;

 private:
  std::vector<std::pair<std::string, Value>> items_;
};

// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) initialised tensor.
Matrix init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

struct ConvLayer {
  int kernel_size = 1;
  int in_channels = 1;
  int out_channels = 1;
  int dilation = 1;
  Value kernel;  // (kernel_size·in_channels) × out_channels
  Value bias;    // 1 × out_channels

  static ConvLayer create(int kernel_size, int in_channels, int out_channels, int dilation, Rng& rng);
  // Builds a layer from explicit weights; kernel taps ordered r = 0..K-1.
  static ConvLayer from_weights(Matrix kernel, Matrix bias, int kernel_size, int dilation);

  ParamSet params(const std::string& prefix) const;
};

// Dilation forced to 1.
Value causal_conv(const Value& x, const ConvLayer& layer);
Value dilated_conv(const Value& x, const ConvLayer& layer);

struct DenseLayer {
  Value weights;  // F × H
  Value bias;     // 1 × H

  static DenseLayer create(std::size_t in_features, std::size_t out_features, Rng& rng);
  ParamSet params(const std::string& prefix) const;
};

// x: 1×F → 1×H, x·W + b
Value dense(const Value& x, const DenseLayer& layer);

struct AttentionOutput {
  Value fused;    // 1×F
  Value weights;  // 1×(T1+T2), softmax over query–key similarities
};

// Keys and values are the rows of concat(x1, x2); the query is the last row of
// x1. Similarity is the raw dot product.
AttentionOutput attention_fuse(const Value& x1, const Value& x2);

/// Residual block: two dilated causal convolutions with ReLU, plus an identity
/// skip (or a 1×1 projection when channel widths differ), followed by ReLU.
struct TcnBlock {
  ConvLayer conv1;
  ConvLayer conv2;
  std::optional<ConvLayer> projection;

  static TcnBlock create(int in_channels, int channels, int kernel_size, int dilation, Rng& rng);
  Value forward(const Value& x) const;
  ParamSet params(const std::string& prefix) const;
};

struct TcnStack {
  std::vector<TcnBlock> blocks;

  static TcnStack create(int in_channels, int channels, int kernel_size,
                         const std::vector<int>& dilations, Rng& rng);
  Value forward(const Value& x) const;
  ParamSet params(const std::string& prefix) const;
};

}  // namespace vegopt::neuralcore
