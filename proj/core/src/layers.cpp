#include "vegopt/neuralcore/layers.hpp"

#include <cmath>
#include <random>

#include "vegopt/error.hpp"

namespace vegopt::neuralcore {

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, v] : items_) n += v.value().size();
  return n;
}

void ParamSet::zero_grad() const {
  for (const auto& [name, v] : items_) {
    auto copy = v;
    copy.zero_grad();
  }
}

Matrix init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in == 0 ? 1 : fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

ConvLayer ConvLayer::create(int kernel_size, int in_channels, int out_channels, int dilation, Rng& rng) {
  if (kernel_size < 1 || in_channels < 1 || out_channels < 1 || dilation < 1)
    throw InputError("convolution sizes must be >= 1");
  const auto fan_in = static_cast<std::size_t>(kernel_size * in_channels);
  ConvLayer layer;
  layer.kernel_size = kernel_size;
  layer.in_channels = in_channels;
  layer.out_channels = out_channels;
  layer.dilation = dilation;
  layer.kernel = Value::parameter(init_uniform(fan_in, static_cast<std::size_t>(out_channels), fan_in, rng));
  layer.bias = Value::parameter(init_uniform(1, static_cast<std::size_t>(out_channels), fan_in, rng));
  return layer;
}

ConvLayer ConvLayer::from_weights(Matrix kernel, Matrix bias, int kernel_size, int dilation) {
  if (kernel_size < 1 || dilation < 1 || kernel.rows() % static_cast<std::size_t>(kernel_size) != 0)
    throw InputError("kernel rows must be a multiple of kernel_size");
  if (bias.size() != kernel.cols()) throw InputError("bias length must equal output channels");
  ConvLayer layer;
  layer.kernel_size = kernel_size;
  layer.in_channels = static_cast<int>(kernel.rows() / static_cast<std::size_t>(kernel_size));
  layer.out_channels = static_cast<int>(kernel.cols());
  layer.dilation = dilation;
  layer.kernel = Value::parameter(std::move(kernel));
  layer.bias = Value::parameter(std::move(bias));
  return layer;
}

ParamSet ConvLayer::params(const std::string& prefix) const {
  ParamSet p;
  p.add(prefix + ".kernel", kernel);
  p.add(prefix + ".bias", bias);
  return p;
}

Value causal_conv(const Value& x, const ConvLayer& layer) {
  return causal_conv1d(x, layer.kernel, layer.bias, layer.kernel_size, 1);
}

Value dilated_conv(const Value& x, const ConvLayer& layer) {
  return causal_conv1d(x, layer.kernel, layer.bias, layer.kernel_size, layer.dilation);
}

DenseLayer DenseLayer::create(std::size_t in_features, std::size_t out_features, Rng& rng) {
  DenseLayer layer;
  layer.weights = Value::parameter(init_uniform(in_features, out_features, in_features, rng));
  layer.bias = Value::parameter(init_uniform(1, out_features, in_features, rng));
  return layer;
}

ParamSet DenseLayer::params(const std::string& prefix) const {
  ParamSet p;
  p.add(prefix + ".weights", weights);
  p.add(prefix + ".bias", bias);
  return p;
}

Value dense(const Value& x, const DenseLayer& layer) {
  if (x.rows() != 1 || x.cols() != layer.weights.rows())
    throw InvariantError("dense: input must be 1×F matching the weight rows");
  return add(matmul(x, layer.weights), layer.bias);
}

AttentionOutput attention_fuse(const Value& x1, const Value& x2) {
  if (x1.rows() < 1 || x2.rows() < 1) throw InvariantError("attention: both inputs need >= 1 row");
  if (x1.cols() != x2.cols()) throw InvariantError("attention: feature widths differ");
  const Value keys = concat_rows(x1, x2);      // L×F, also the values
  const Value query = row(x1, x1.rows() - 1);  // 1×F
  const Value alpha = softmax(matmul(query, transpose(keys)));  // 1×L
  return {matmul(alpha, keys), alpha};
}

TcnBlock TcnBlock::create(int in_channels, int channels, int kernel_size, int dilation, Rng& rng) {
  TcnBlock b;
  b.conv1 = ConvLayer::create(kernel_size, in_channels, channels, dilation, rng);
  b.conv2 = ConvLayer::create(kernel_size, channels, channels, dilation, rng);
  if (in_channels != channels) b.projection = ConvLayer::create(1, in_channels, channels, 1, rng);
  return b;
}

Value TcnBlock::forward(const Value& x) const {
  const Value h = relu(dilated_conv(relu(dilated_conv(x, conv1)), conv2));
  const Value skip = projection ? dilated_conv(x, *projection) : x;
  return relu(add(h, skip));
}

ParamSet TcnBlock::params(const std::string& prefix) const {
  ParamSet p;
  p.append(conv1.params(prefix + ".conv1"));
  p.append(conv2.params(prefix + ".conv2"));
  if (projection) p.append(projection->params(prefix + ".proj"));
  return p;
}

TcnStack TcnStack::create(int in_channels, int channels, int kernel_size,
                          const std::vector<int>& dilations, Rng& rng) {
  if (dilations.empty()) throw InputError("a TCN stack needs at least one block");
  TcnStack s;
  int width = in_channels;
  for (int d : dilations) {
    s.blocks.push_back(TcnBlock::create(width, channels, kernel_size, d, rng));
    width = channels;
  }
  return s;
}

Value TcnStack::forward(const Value& x) const {
  Value h = x;
  for (const auto& b : blocks) h = b.forward(h);
  return h;
}

ParamSet TcnStack::params(const std::string& prefix) const {
  ParamSet p;
  for (std::size_t i = 0; i < blocks.size(); ++i) p.append(blocks[i].params(prefix + ".block" + std::to_string(i)));
  return p;
}

}  // namespace vegopt::neuralcore
