#include <cstring>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vegopt/error.hpp"
#include "vegopt/neuralcore/autodiff.hpp"
#include "vegopt/neuralcore/layers.hpp"
#include "vegopt/neuralcore/optim.hpp"
#include "vegopt/neuralcore/params_io.hpp"

using namespace vegopt;
using namespace vegopt::neuralcore;

namespace {

// Single-channel layer with the given taps.
ConvLayer taps(std::vector<double> w, int dilation = 1) {
  const auto k = w.size();
  return ConvLayer::from_weights(Matrix(k, 1, std::move(w)), Matrix(1, 1), static_cast<int>(k), dilation);
}

Value series(const std::vector<double>& x) { return Value::constant(Matrix::column_vector(x)); }

std::vector<double> column(const Value& v) { return v.value().data(); }

}  // namespace

TEST_CASE("causal_conv examples") {
  CHECK(column(causal_conv(series({1, 2, 3}), taps({1, 0}))) == std::vector<double>{1, 2, 3});
  CHECK(column(causal_conv(series({2, 4, 6}), taps({0.5, 0.5}))) == std::vector<double>{1, 3, 5});
  CHECK(column(causal_conv(series({1, 0, 0}), taps({0, 1}))) == std::vector<double>{0, 1, 0});
}

TEST_CASE("dilated_conv examples") {
  CHECK(column(dilated_conv(series({1, 2, 3, 4}), taps({1, 1}, 2))) == std::vector<double>{1, 2, 4, 6});
  CHECK(column(dilated_conv(series({5}), taps({1, 1, 1}, 3))) == std::vector<double>{5});
}

TEST_CASE("convolutions match the brute-force oracle, are causal, and agree at d=1") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> pick(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = pick(rng) * 3, cin = pick(rng), cout = pick(rng), K = pick(rng), d = pick(rng);
    Matrix x(static_cast<std::size_t>(T), static_cast<std::size_t>(cin));
    for (auto& v : x.data()) v = u(rng);
    Rng init(static_cast<std::uint64_t>(trial));
    auto layer = ConvLayer::create(K, cin, cout, d, init);

    oracle::Grid gx(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) gx[static_cast<std::size_t>(t)].assign(x.row(static_cast<std::size_t>(t)).begin(), x.row(static_cast<std::size_t>(t)).end());
    std::vector<oracle::Grid> gw(static_cast<std::size_t>(K), oracle::Grid(static_cast<std::size_t>(cin), std::vector<double>(static_cast<std::size_t>(cout))));
    for (int r = 0; r < K; ++r)
      for (int ci = 0; ci < cin; ++ci)
        for (int co = 0; co < cout; ++co)
          gw[static_cast<std::size_t>(r)][static_cast<std::size_t>(ci)][static_cast<std::size_t>(co)] =
              layer.kernel.value()(static_cast<std::size_t>(r * cin + ci), static_cast<std::size_t>(co));
    const auto& b = layer.bias.value().data();

    const auto y = dilated_conv(Value::constant(x), layer).value();
    const auto expect = oracle::conv(gx, gw, b, d);
    for (int t = 0; t < T; ++t)
      for (int co = 0; co < cout; ++co)
        CHECK(std::abs(y(static_cast<std::size_t>(t), static_cast<std::size_t>(co)) - expect[static_cast<std::size_t>(t)][static_cast<std::size_t>(co)]) <= 1e-12);

    // Causality: perturbing x[t+k] leaves y[0..t] untouched.
    const auto cut = static_cast<std::size_t>(T / 2);
    Matrix xp = x;
    for (std::size_t t = cut + 1; t < xp.rows(); ++t)
      for (auto& v : xp.row(t)) v += 10.0 * u(rng);
    const auto yp = dilated_conv(Value::constant(xp), layer).value();
    for (std::size_t t = 0; t <= cut; ++t)
      for (std::size_t co = 0; co < y.cols(); ++co) CHECK(yp(t, co) == y(t, co));

    auto d1 = layer;
    d1.dilation = 1;
    const auto a = dilated_conv(Value::constant(x), d1).value();
    const auto c = causal_conv(Value::constant(x), layer).value();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - c[i]) <= 1e-12);
  }
}

TEST_CASE("attention: identical rows fuse to that row") {
  const auto x1 = Value::constant(Matrix::from_rows({{1, 2, 3}, {1, 2, 3}}));
  const auto x2 = Value::constant(Matrix::from_rows({{1, 2, 3}}));
  const auto out = attention_fuse(x1, x2);
  for (int j = 0; j < 3; ++j) CHECK(out.fused.value()[j] == doctest::Approx(j + 1).epsilon(1e-15));
  for (double a : out.weights.value().data()) CHECK(a == doctest::Approx(1.0 / 3));
}

TEST_CASE("attention: a dominant similarity selects its row") {
  // Query is the last x1 row; scaling x2's row up drives its similarity to +inf.
  const auto x1 = Value::constant(Matrix::from_rows({{0.2, 0.1}, {1.0, 1.0}}));
  const auto x2 = Value::constant(Matrix::from_rows({{1e6 * 0.5, 1e6 * 0.7}}));
  const auto out = attention_fuse(x1, x2);
  CHECK(out.weights.value()[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(out.fused.value()[0] - 0.5e6) / 0.5e6 < 1e-6);
  CHECK(std::abs(out.fused.value()[1] - 0.7e6) / 0.7e6 < 1e-6);
}

TEST_CASE("attention: orthogonal second branch defers to the query row") {
  // K = [q; x2], Q·q = |q|² = 2, Q·x2 = 0 → α = (e², 1)/(e² + 1).
  const auto x1 = Value::constant(Matrix::from_rows({{1, 1}}));
  const auto x2 = Value::constant(Matrix::from_rows({{1, -1}}));
  const auto out = attention_fuse(x1, x2);
  const double a0 = std::exp(2.0) / (std::exp(2.0) + 1.0);
  CHECK(out.weights.value()[0] == doctest::Approx(a0).epsilon(1e-14));
  CHECK(out.weights.value()[0] > out.weights.value()[1]);
  CHECK(out.fused.value()[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out.fused.value()[1] == doctest::Approx(a0 - (1 - a0)).epsilon(1e-14));
}

TEST_CASE("attention: weights form a distribution and the output stays in the value hull") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> pick(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t1 = static_cast<std::size_t>(pick(rng)), t2 = static_cast<std::size_t>(pick(rng)),
               f = static_cast<std::size_t>(pick(rng));
    Matrix a(t1, f), b(t2, f);
    for (auto& v : a.data()) v = u(rng);
    for (auto& v : b.data()) v = u(rng);
    const auto out = attention_fuse(Value::constant(a), Value::constant(b));
    double total = 0.0;
    for (double w : out.weights.value().data()) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    for (std::size_t j = 0; j < f; ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t r = 0; r < t1; ++r) { lo = std::min(lo, a(r, j)); hi = std::max(hi, a(r, j)); }
      for (std::size_t r = 0; r < t2; ++r) { lo = std::min(lo, b(r, j)); hi = std::max(hi, b(r, j)); }
      CHECK(out.fused.value()[j] >= lo - 1e-12);
      CHECK(out.fused.value()[j] <= hi + 1e-12);
    }
  }
}

TEST_CASE("dense layer") {
  Rng rng(1);
  auto layer = DenseLayer::create(4, 7, rng);
  layer.weights.value().fill(0.0);
  layer.bias.value().fill(2.5);
  const auto x = Value::constant(Matrix::from_rows({{1, 2, 3, 4}}));
  const auto flat = dense(x, layer);
  for (double v : flat.value().data()) CHECK(v == 2.5);

  DenseLayer ones{Value::parameter(Matrix(1, 7, 1.0)), Value::parameter(Matrix(1, 7, 0.0))};
  const auto broadcast = dense(Value::constant(Matrix(1, 1, 3.0)), ones);
  for (double v : broadcast.value().data()) CHECK(v == 3.0);

  auto rnd = DenseLayer::create(5, 7, rng);
  Matrix in(1, 5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : in.data()) v = u(rng);
  const auto out = dense(Value::constant(in), rnd).value();
  for (std::size_t h = 0; h < 7; ++h) {
    double acc = rnd.bias.value()[h];
    for (std::size_t f = 0; f < 5; ++f) acc += in[f] * rnd.weights.value()(f, h);
    CHECK(out[h] == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("backward: analytic cases") {
  auto p = Value::parameter(Matrix(1, 1, 3.0));
  backward(square(p));
  CHECK(p.grad()[0] == 6.0);

  auto logits = Value::parameter(Matrix::from_rows({{0.3, -1.2}}));
  backward(softmax_cross_entropy(logits, 0));
  CHECK(std::abs(logits.grad()[0] + logits.grad()[1]) < 1e-15);
  CHECK(logits.grad()[0] < 0.0);
}

TEST_CASE("backward: rejects non-scalar losses and cycles") {
  auto p = Value::parameter(Matrix(1, 2, 1.0));
  CHECK_THROWS_AS(backward(p), InvariantError);

  auto q = Value::parameter(Matrix(1, 1, 1.0));
  auto a = scale(q, 2.0);
  auto b = scale(a, 3.0);
  detail::link(a, b);
  CHECK_THROWS_AS(backward(b), InvariantError);
}

TEST_CASE("backward: every primitive agrees with finite differences") {
  Rng rng(9);
  auto A = Value::parameter(init_uniform(3, 4, 1, rng));
  auto B = Value::parameter(init_uniform(4, 2, 1, rng));
  auto C = Value::parameter(init_uniform(2, 2, 1, rng));
  auto k = Value::parameter(init_uniform(2 * 4, 2, 1, rng));
  auto bias = Value::parameter(init_uniform(1, 2, 1, rng));
  for (auto* v : {&A, &B, &C}) for (auto& x : v->value().data()) x += 1.5;  // keep log() well-defined

  auto loss_fn = [&] {
    auto h = matmul(A, B);                                     // 3×2
    auto conv = causal_conv1d(A, k, bias, 2, 2);               // 3×2
    auto mixed = add(mul(h, conv), sub(exp(scale(h, 0.1)), relu(conv)));
    auto stacked = concat_rows(mixed, log(C));                 // 5×2
    auto att = attention_fuse(stacked, transpose(transpose(C)));
    return add(mean(square(att.fused)), sum(element(softmax(row(stacked, 1)), 1)));
  };
  backward(loss_fn());
  for (auto* v : {&A, &B, &C, &k, &bias}) {
    for (std::size_t i = 0; i < v->value().size(); ++i) {
      const double numeric = oracle::central_difference([&] { return loss_fn().item(); }, v->value()[i], 1e-5);
      CHECK(oracle::relative_error(v->grad()[i], numeric) < 1e-4);
    }
  }
}

TEST_CASE("Adam") {
  SUBCASE("zero gradients leave parameters unchanged") {
    auto p = Value::parameter(Matrix::from_rows({{1.0, -2.0}}));
    ParamSet ps;
    ps.add("p", p);
    Adam adam(ps);
    for (int i = 0; i < 10; ++i) adam.step(0.1);
    CHECK(p.value() == Matrix::from_rows({{1.0, -2.0}}));
  }
  SUBCASE("a constant gradient moves the parameter against its sign") {
    auto p = Value::parameter(Matrix(1, 1, 0.0));
    ParamSet ps;
    ps.add("p", p);
    Adam adam(ps);
    for (int i = 0; i < 100; ++i) {
      p.grad()[0] = 0.7;
      adam.step(1e-2);
    }
    CHECK(p.value()[0] < -0.5);
    CHECK(p.grad()[0] == 0.0);
  }
  SUBCASE("quadratic bowl: loss decreases at every one of 50 steps") {
    auto p = Value::parameter(Matrix::from_rows({{1.0, -0.5, 0.25}}));
    ParamSet ps;
    ps.add("p", p);
    Adam adam(ps);
    double prev = INFINITY;
    for (int i = 0; i < 50; ++i) {
      auto loss = sum(square(p));
      CHECK(loss.item() < prev);
      prev = loss.item();
      backward(loss);
      adam.step(1e-2);
    }
  }
}

TEST_CASE("parameter persistence round-trips bit-exactly") {
  Rng rng(77);
  const auto stack = TcnStack::create(3, 5, 3, {1, 2}, rng);
  auto params = stack.params("tcn");
  Value(params[0].second).value()[0] = -0.0;
  Value(params[1].second).value()[0] = 1e-310;  // subnormal
  const auto text = serialize_params(params);

  Rng other(1);
  const auto copy = TcnStack::create(3, 5, 3, {1, 2}, other);
  const auto cparams = copy.params("tcn");
  deserialize_params(text, cparams);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& a = params[i].second.value().data();
    const auto& b = cparams[i].second.value().data();
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }
  CHECK(serialize_params(cparams) == text);

  Rng r3(2);
  const auto wrong = TcnStack::create(3, 4, 3, {1, 2}, r3);
  CHECK_THROWS_AS(deserialize_params(text, wrong.params("tcn")), InputError);
}
