#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vegopt::app {

/// Every tunable of a pipeline run. Serialized as flat `key = value` lines.
struct RunConfig {
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = one per hardware thread; outputs do not depend on it

  int data_products = 61;
  int data_days = 730;
  std::string data_start = "2022-01-01";

  int input_days = 15;
  int horizon_days = 7;
  int tcn_kernel = 3;
  std::vector<int> tcn_dilations{1, 2};
  int tcn_channels = 16;
  int train_epochs = 100;
  double train_lr = 1e-3;

  int bootstrap_replicas = 100;
  double bootstrap_min_fraction = 0.7;
  double bootstrap_level = 0.95;
  std::vector<int> bootstrap_dilations{1};
  int bootstrap_channels = 8;
  int bootstrap_epochs = 30;
  double bootstrap_lr = 1e-3;

  int topsis_top_k = 32;

  int ga_pop = 200;
  int ga_gens = 500;
  int ga_tournament = 3;
  int ga_elitism = 1;
  double ga_crossover_rate = 0.9;
  double ga_mutation_prob = 0.1;
  double ga_sigma_fraction = 0.1;
  double ga_sigma_decay = 0.995;
  bool ga_constrain_demand = true;
  bool ga_constrain_allocation = true;
  double ga_flat_price_cap = 3.0;

  // Relative paths resolve against the output directory.
  std::string path_terms;  // empty: built-in solar term table
  std::string path_costs = "costs.csv";
  std::string path_sales = "sales.csv";
  std::string path_forecast = "forecast.csv";
  std::string path_loss_curves = "loss_curves.csv";
  std::string path_intervals = "intervals.csv";
  std::string path_intervals_daily = "intervals_daily.csv";
  std::string path_ranking = "ranking.csv";
  std::string path_demand = "demand.csv";
  std::string path_plan = "plan.csv";
  std::string path_ga_trace = "ga_trace.csv";
  std::string path_baseline_plan = "baseline_plan.csv";
  std::string path_manifest = "manifest.json";
};

// Sets one key from text. Throws InputError for unknown keys or bad values.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);

// All keys in a fixed order with their current values.
std::vector<std::pair<std::string, std::string>> to_pairs(const RunConfig& cfg);

// `key = value` lines; blank lines and lines starting with '#' are ignored.
void apply_text(RunConfig& cfg, std::string_view text, std::string_view source);
RunConfig load_config(const std::filesystem::path& path);
std::string render(const RunConfig& cfg);

// Range checks: counts >= 1, probabilities in [0,1], level in (0,1).
void validate(const RunConfig& cfg);

}  // namespace vegopt::app
