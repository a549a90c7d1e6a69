#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vegopt/neuralcore/layers.hpp"
#include "vegopt/pipeline.hpp"

namespace vegopt::forecaster {

struct ModelConfig {
  int input_days = 15;
  int horizon = 7;
  int kernel_size = 3;
  std::vector<int> dilations{1, 2};  // one residual block per entry
  int channels = 16;
};

/// Two-branch TCN with attention fusion and a dense head. The cost branch reads
/// the scaled cost history (T×1), the term branch reads the solar-term codes of
/// the forecast horizon (H×10).
class ForecasterModel {
 public:
  static ForecasterModel create(const ModelConfig& cfg, std::string product_id,
                                pipeline::Normalizer normalizer, std::uint64_t seed);

  // Independent copy; the parameters are not shared.
  ForecasterModel clone() const;

  // history: input_days scaled values; returns 1×horizon scaled prediction.
  neuralcore::Value forward(std::span<const double> history, const Matrix& future_terms) const;

  neuralcore::ParamSet params() const;

  const ModelConfig& config() const { return cfg_; }
  const std::string& product_id() const { return product_id_; }
  const pipeline::Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(pipeline::Normalizer n) { normalizer_ = n; }
  neuralcore::DenseLayer& head() { return head_; }

 private:
  ModelConfig cfg_;
  std::string product_id_;
  pipeline::Normalizer normalizer_;
  neuralcore::TcnStack cost_branch_;
  neuralcore::TcnStack term_branch_;
  neuralcore::DenseLayer head_;
};

struct TrainConfig {
  int epochs = 100;
  double lr = 1e-3;
  std::uint64_t seed = 0;  // drives the per-epoch sample order
  bool shuffle = true;
};

struct TrainReport {
  double final_loss = 0.0;        // mean loss over all samples after training
  std::vector<double> loss_curve;  // mean per-sample loss seen during each epoch
};

// Per-sample Adam on the MSE between scaled prediction and scaled target.
// Throws InputError when samples is empty.
TrainReport train(ForecasterModel& model, std::span<const pipeline::WindowSample> samples,
                  const TrainConfig& cfg);

// Mean scaled-space MSE of the model over the samples.
double mean_loss(const ForecasterModel& model, std::span<const pipeline::WindowSample> samples);

// Raw-unit prediction for the `horizon` days after `history`.
// Throws InputError when history has the wrong length.
std::vector<double> predict(const ForecasterModel& model, std::span<const double> history,
                            const Matrix& future_terms);

struct MetricsReport {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

// Throws InputError on empty input or length mismatch.
MetricsReport evaluate(std::span<const double> y, std::span<const double> y_hat);

struct SplitResult {
  std::vector<pipeline::WindowSample> train;
  std::vector<pipeline::WindowSample> validation;
  pipeline::Normalizer normalizer;
  std::size_t train_days = 0;  // days of the series covered by training windows
};

// Chronological split: the last `holdout_fraction` of windows are held out and
// the scaler is fitted on the days the training windows cover.
SplitResult chronological_split(const pipeline::SeriesFrame& series, double holdout_fraction,
                                const calendar::TermBoundaryTable& table,
                                pipeline::WindowShape shape = {});

}  // namespace vegopt::forecaster
