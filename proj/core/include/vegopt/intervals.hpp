#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vegopt/forecaster.hpp"

namespace vegopt::intervals {

/// Normal-fit interval on a sales volume (kg).
struct SalesInterval {
  std::string product_id;
  double mean = 0.0;
  double std = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

// Two-sided standard normal quantile: z with P(|Z| <= z) = level.
// Throws InputError unless 0 < level < 1.
double z_value(double level);

// mean ± z·std with the lower bound clamped at 0.
SalesInterval interval_from_moments(std::string product_id, double mean, double std, double level);
// Normal fit (mean, sample std) over ensemble draws.
SalesInterval interval_from_samples(std::string product_id, std::span<const double> samples,
                                    double level);

struct Slice {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct BootstrapConfig {
  int replicas = 100;
  double min_fraction = 0.7;
  std::uint64_t seed = 0;
  // Reduced base learner: one residual block per branch, 8 channels, 30 epochs.
  forecaster::ModelConfig model{15, 7, 3, {1}, 8};
  int epochs = 30;
  double lr = 1e-3;
  unsigned threads = 1;
};

struct Ensemble {
  std::string product_id;
  std::vector<forecaster::ForecasterModel> models;
  std::vector<Slice> slices;  // training slice of each replica
};

// Draws replica r's contiguous slice: length uniform in
// [ceil(min_fraction·n), n], offset uniform over the valid starts.
Slice draw_slice(std::size_t series_length, double min_fraction, std::uint64_t seed, int replica);

// Trains one model on series[slice]; the scaler is fitted on the slice.
forecaster::ForecasterModel train_replica(const pipeline::SeriesFrame& series, Slice slice,
                                          const BootstrapConfig& cfg, int replica,
                                          const calendar::TermBoundaryTable& table);

// Throws InputError when the shortest admissible slice yields no window.
Ensemble bootstrap_train(const pipeline::SeriesFrame& series, const BootstrapConfig& cfg,
                         const calendar::TermBoundaryTable& table =
                             calendar::TermBoundaryTable::default_table());

// replicas × horizon matrix of daily predictions, each clamped at 0.
Matrix replica_predictions(const Ensemble& ensemble, std::span<const double> history,
                           const Matrix& future_terms);

// Interval on the horizon total (sum of the daily predictions of each replica).
// Throws InputError on an empty ensemble.
SalesInterval predict_interval(const Ensemble& ensemble, std::span<const double> history,
                               const Matrix& future_terms, double level = 0.95);

// Auxiliary per-day intervals, one per horizon day.
std::vector<SalesInterval> predict_daily_intervals(const Ensemble& ensemble,
                                                   std::span<const double> history,
                                                   const Matrix& future_terms, double level = 0.95);

}  // namespace vegopt::intervals
