#include "vegopt/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vegopt/error.hpp"
#include "vegopt/neuralcore/optim.hpp"

namespace vegopt::forecaster {

namespace nc = neuralcore;

ForecasterModel ForecasterModel::create(const ModelConfig& cfg, std::string product_id,
                                        pipeline::Normalizer normalizer, std::uint64_t seed) {
  if (cfg.input_days < 1 || cfg.horizon < 1 || cfg.channels < 1 || cfg.kernel_size < 1)
    throw InputError("model sizes must be >= 1");
  auto rng = make_rng(seed, "forecaster.init");
  ForecasterModel m;
  m.cfg_ = cfg;
  m.product_id_ = std::move(product_id);
  m.normalizer_ = normalizer;
  m.cost_branch_ = nc::TcnStack::create(1, cfg.channels, cfg.kernel_size, cfg.dilations, rng);
  m.term_branch_ = nc::TcnStack::create(calendar::kEncodingWidth, cfg.channels, cfg.kernel_size,
                                        cfg.dilations, rng);
  m.head_ = nc::DenseLayer::create(static_cast<std::size_t>(cfg.channels),
                                   static_cast<std::size_t>(cfg.horizon), rng);
  return m;
}

ForecasterModel ForecasterModel::clone() const {
  auto copy = create(cfg_, product_id_, normalizer_, 0);
  const auto src = params();
  const auto dst = copy.params();
  for (std::size_t i = 0; i < src.size(); ++i) {
    nc::Value target = dst[i].second;
    target.value() = src[i].second.value();
  }
  return copy;
}

nc::Value ForecasterModel::forward(std::span<const double> history, const Matrix& future_terms) const {
  if (history.size() != static_cast<std::size_t>(cfg_.input_days))
    throw InputError("history must hold " + std::to_string(cfg_.input_days) + " values");
  if (future_terms.rows() != static_cast<std::size_t>(cfg_.horizon) ||
      future_terms.cols() != calendar::kEncodingWidth)
    throw InputError("future_terms must be horizon × 10");
  const auto cost_in = nc::Value::constant(Matrix::column_vector(history));
  const auto term_in = nc::Value::constant(future_terms);
  const auto cost_features = cost_branch_.forward(cost_in);
  const auto term_features = term_branch_.forward(term_in);
  const auto fused = nc::attention_fuse(cost_features, term_features).fused;
  return nc::dense(fused, head_);
}

nc::ParamSet ForecasterModel::params() const {
  nc::ParamSet p;
  p.append(cost_branch_.params("cost"));
  p.append(term_branch_.params("term"));
  p.append(head_.params("head"));
  return p;
}

namespace {

nc::Value sample_loss(const ForecasterModel& model, const pipeline::WindowSample& s) {
  const auto pred = model.forward(s.history, s.future_terms);
  return nc::mse_loss(pred, nc::Value::constant(Matrix::row_vector(s.target)));
}

}  // namespace

double mean_loss(const ForecasterModel& model, std::span<const pipeline::WindowSample> samples) {
  if (samples.empty()) throw InputError("no samples");
  double total = 0.0;
  for (const auto& s : samples) total += sample_loss(model, s).item();
  return total / static_cast<double>(samples.size());
}

TrainReport train(ForecasterModel& model, std::span<const pipeline::WindowSample> samples,
                  const TrainConfig& cfg) {
  if (samples.empty()) throw InputError("cannot train on an empty sample set");
  if (cfg.epochs < 0) throw InputError("epochs must be >= 0");
  TrainReport report;
  nc::Adam adam(model.params());
  auto rng = make_rng(cfg.seed, "forecaster.order");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (auto idx : order) {
      const auto loss = sample_loss(model, samples[idx]);
      total += loss.item();
      nc::backward(loss);
      adam.step(cfg.lr);
    }
    const double epoch_loss = total / static_cast<double>(samples.size());
    if (!std::isfinite(epoch_loss)) throw InvariantError("training loss became non-finite");
    report.loss_curve.push_back(epoch_loss);
  }
  report.final_loss = mean_loss(model, samples);
  return report;
}

std::vector<double> predict(const ForecasterModel& model, std::span<const double> history,
                            const Matrix& future_terms) {
  if (history.size() != static_cast<std::size_t>(model.config().input_days))
    throw InputError("history must hold " + std::to_string(model.config().input_days) + " values");
  std::vector<double> scaled(history.size());
  std::transform(history.begin(), history.end(), scaled.begin(),
                 [&](double v) { return model.normalizer().normalize(v); });
  const auto out = model.forward(scaled, future_terms);
  std::vector<double> raw(out.value().size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = model.normalizer().inverse(out.value()[i]);
  return raw;
}

MetricsReport evaluate(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw InputError("evaluate: length mismatch");
  if (y.empty()) throw InputError("evaluate: empty input");
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - y_hat[i];
    se += e * e;
    ae += std::abs(e);
  }
  const auto n = static_cast<double>(y.size());
  MetricsReport r;
  r.mse = se / n;
  r.mae = ae / n;
  r.rmse = std::sqrt(r.mse);
  return r;
}

SplitResult chronological_split(const pipeline::SeriesFrame& series, double holdout_fraction,
                                const calendar::TermBoundaryTable& table, pipeline::WindowShape shape) {
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
    throw InputError("holdout fraction must be in [0, 1)");
  const auto n = pipeline::window_count(series.size(), shape);
  if (n == 0) throw InputError("insufficient history");
  auto held = static_cast<std::size_t>(std::floor(static_cast<double>(n) * holdout_fraction));
  if (held >= n) held = n - 1;
  const auto n_train = n - held;

  SplitResult out;
  out.train_days = n_train + static_cast<std::size_t>(shape.input_days + shape.horizon) - 1;
  out.normalizer = pipeline::fit_normalizer(
      std::span(series.values).first(out.train_days));
  auto all = pipeline::make_windows(series, out.normalizer, table, shape);
  out.train.assign(std::make_move_iterator(all.begin()),
                   std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)));
  out.validation.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)),
                        std::make_move_iterator(all.end()));
  return out;
}

}  // namespace vegopt::forecaster
