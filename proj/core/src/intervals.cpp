#include "vegopt/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <boost/math/distributions/normal.hpp>

#include "vegopt/error.hpp"
#include "vegopt/parallel.hpp"

namespace vegopt::intervals {

double z_value(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must be in (0, 1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + level / 2.0);
}

SalesInterval interval_from_moments(std::string product_id, double mean, double std, double level) {
  if (std < 0.0) throw InvariantError("negative standard deviation");
  const double half = z_value(level) * std;
  SalesInterval out;
  out.product_id = std::move(product_id);
  out.mean = mean;
  out.std = std;
  out.level = level;
  out.lower = std::max(0.0, mean - half);
  out.upper = mean + half;
  return out;
}

SalesInterval interval_from_samples(std::string product_id, std::span<const double> samples,
                                    double level) {
  if (samples.empty()) throw InputError("no ensemble draws");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double std = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return interval_from_moments(std::move(product_id), mean, std, level);
}

Slice draw_slice(std::size_t series_length, double min_fraction, std::uint64_t seed, int replica) {
  if (!(min_fraction > 0.0 && min_fraction <= 1.0)) throw InputError("min_fraction must be in (0, 1]");
  auto rng = make_rng(seed, "bootstrap.slice", static_cast<std::uint64_t>(replica));
  const auto min_len = static_cast<std::size_t>(std::ceil(min_fraction * static_cast<double>(series_length)));
  std::uniform_int_distribution<std::size_t> length(std::min(min_len, series_length), series_length);
  Slice s;
  s.length = length(rng);
  std::uniform_int_distribution<std::size_t> offset(0, series_length - s.length);
  s.offset = offset(rng);
  return s;
}

forecaster::ForecasterModel train_replica(const pipeline::SeriesFrame& series, Slice slice,
                                          const BootstrapConfig& cfg, int replica,
                                          const calendar::TermBoundaryTable& table) {
  const auto part = series.slice(slice.offset, slice.length);
  const auto scaler = pipeline::fit_normalizer(part.values);
  const auto windows = pipeline::make_windows(
      part, scaler, table, {cfg.model.input_days, cfg.model.horizon});
  const auto r = static_cast<std::uint64_t>(replica);
  auto model = forecaster::ForecasterModel::create(cfg.model, series.product_id, scaler,
                                                   derive_seed(cfg.seed, "bootstrap.model", r));
  forecaster::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.lr = cfg.lr;
  tc.seed = derive_seed(cfg.seed, "bootstrap.order", r);
  forecaster::train(model, windows, tc);
  return model;
}

Ensemble bootstrap_train(const pipeline::SeriesFrame& series, const BootstrapConfig& cfg,
                         const calendar::TermBoundaryTable& table) {
  if (cfg.replicas < 1) throw InputError("replicas must be >= 1");
  const auto n = series.size();
  const auto min_len = static_cast<std::size_t>(std::ceil(cfg.min_fraction * static_cast<double>(n)));
  const pipeline::WindowShape shape{cfg.model.input_days, cfg.model.horizon};
  if (pipeline::window_count(std::min(min_len, n), shape) == 0)
    throw InputError("series too short for bootstrap training of product " + series.product_id);

  Ensemble ens;
  ens.product_id = series.product_id;
  ens.slices.resize(static_cast<std::size_t>(cfg.replicas));
  std::vector<std::optional<forecaster::ForecasterModel>> models(ens.slices.size());
  parallel_for(ens.slices.size(), cfg.threads, [&](std::size_t r) {
    ens.slices[r] = draw_slice(n, cfg.min_fraction, cfg.seed, static_cast<int>(r));
    models[r] = train_replica(series, ens.slices[r], cfg, static_cast<int>(r), table);
  });
  for (auto& m : models) ens.models.push_back(std::move(*m));
  return ens;
}

Matrix replica_predictions(const Ensemble& ensemble, std::span<const double> history,
                           const Matrix& future_terms) {
  if (ensemble.models.empty()) throw InputError("empty ensemble");
  const auto horizon = static_cast<std::size_t>(ensemble.models.front().config().horizon);
  Matrix out(ensemble.models.size(), horizon);
  for (std::size_t r = 0; r < ensemble.models.size(); ++r) {
    const auto daily = forecaster::predict(ensemble.models[r], history, future_terms);
    for (std::size_t j = 0; j < horizon; ++j) out(r, j) = std::max(0.0, daily[j]);
  }
  return out;
}

SalesInterval predict_interval(const Ensemble& ensemble, std::span<const double> history,
                               const Matrix& future_terms, double level) {
  const auto draws = replica_predictions(ensemble, history, future_terms);
  std::vector<double> totals(draws.rows(), 0.0);
  for (std::size_t r = 0; r < draws.rows(); ++r)
    for (double v : draws.row(r)) totals[r] += v;
  return interval_from_samples(ensemble.product_id, totals, level);
}

std::vector<SalesInterval> predict_daily_intervals(const Ensemble& ensemble,
                                                   std::span<const double> history,
                                                   const Matrix& future_terms, double level) {
  const auto draws = replica_predictions(ensemble, history, future_terms);
  std::vector<SalesInterval> out;
  std::vector<double> column(draws.rows());
  for (std::size_t j = 0; j < draws.cols(); ++j) {
    for (std::size_t r = 0; r < draws.rows(); ++r) column[r] = draws(r, j);
    out.push_back(interval_from_samples(ensemble.product_id, column, level));
  }
  return out;
}

}  // namespace vegopt::intervals
