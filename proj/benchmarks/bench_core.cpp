#include <benchmark/benchmark.h>

#include <numeric>

#include "vegopt/demand.hpp"
#include "vegopt/forecaster.hpp"
#include "vegopt/gaopt.hpp"
#include "vegopt/mcdm.hpp"
#include "vegopt/neuralcore/layers.hpp"
#include "vegopt/neuralcore/optim.hpp"

using namespace vegopt;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(r, c);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

void BM_DilatedConvForward(benchmark::State& state) {
  const auto channels = static_cast<int>(state.range(0));
  Rng rng(1);
  const auto layer = neuralcore::ConvLayer::create(3, channels, channels, 2, rng);
  const auto x = neuralcore::Value::constant(random_matrix(15, static_cast<std::size_t>(channels), 2));
  for (auto _ : state) benchmark::DoNotOptimize(neuralcore::dilated_conv(x, layer).value().data().data());
}
BENCHMARK(BM_DilatedConvForward)->Arg(8)->Arg(16);

void BM_DilatedConvBackward(benchmark::State& state) {
  const auto channels = static_cast<int>(state.range(0));
  Rng rng(1);
  auto layer = neuralcore::ConvLayer::create(3, channels, channels, 2, rng);
  const auto x = neuralcore::Value::constant(random_matrix(15, static_cast<std::size_t>(channels), 2));
  for (auto _ : state) {
    layer.kernel.zero_grad();
    layer.bias.zero_grad();
    neuralcore::backward(neuralcore::sum(neuralcore::dilated_conv(x, layer)));
  }
}
BENCHMARK(BM_DilatedConvBackward)->Arg(8)->Arg(16);

// One per-sample optimizer step of the full forecaster.
void BM_TrainStep(benchmark::State& state) {
  const auto series = pipeline::generate_synthetic(1, 60, 3).costs.front();
  const auto windows = pipeline::make_windows(series);
  forecaster::ModelConfig cfg;
  cfg.channels = static_cast<int>(state.range(0));
  auto model = forecaster::ForecasterModel::create(cfg, "B", pipeline::fit_normalizer(series.values), 5);
  neuralcore::Adam adam(model.params(), {});
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& w = windows[i++ % windows.size()];
    const auto loss = neuralcore::mse_loss(model.forward(w.history, w.future_terms),
                                           neuralcore::Value::constant(Matrix::row_vector(w.target)));
    neuralcore::backward(loss);
    adam.step(1e-3);
  }
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(16);

void BM_Topsis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto raw = random_matrix(n, 2, 7);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("P" + std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(mcdm::rank_products(ids, raw).topsis.scores.data());
}
BENCHMARK(BM_Topsis)->Arg(61)->Arg(1000);

gaopt::Problem instance(int products) {
  const auto data = pipeline::generate_synthetic(products, 120, 9);
  std::vector<gaopt::ProductContext> ctx;
  for (std::size_t i = 0; i < data.costs.size(); ++i) {
    const auto id = data.costs[i].product_id;
    const auto& v = data.sales[i].values;
    const double weekly = 7.0 * std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    ctx.push_back({id, data.costs[i].values.back(), demand::fit_demand(data.prices[i].values, v, id),
                   intervals::interval_from_moments(id, weekly, 0.1 * weekly, 0.95)});
  }
  return gaopt::Problem(std::move(ctx));
}

// Population initialization plus one generation (population 200), 32 products.
void BM_GaGeneration(benchmark::State& state) {
  const auto problem = instance(32);
  gaopt::EvolveConfig cfg;
  cfg.generations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(gaopt::evolve(problem, cfg).best_fitness);
}
BENCHMARK(BM_GaGeneration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
