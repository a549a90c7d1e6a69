#include "vegopt/app/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "vegopt/calendar.hpp"
#include "vegopt/csv.hpp"
#include "vegopt/error.hpp"

namespace vegopt::app {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::string what(std::string_view key) { return "config key " + std::string(key); }

int parse_int(std::string_view key, std::string_view v) {
  const auto n = csv::to_int(v, what(key));
  if (n < -2147483647 || n > 2147483647) throw InputError(what(key) + ": out of range");
  return static_cast<int>(n);
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InputError(what(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<int> parse_list(std::string_view key, std::string_view v) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto part = trim(v.substr(pos, comma == std::string_view::npos ? v.size() - pos : comma - pos));
    out.push_back(parse_int(key, part));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string show_list(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

template <class T>
Entry int_entry(const char* key, T RunConfig::*field) {
  return {key, [field](const RunConfig& c) { return std::to_string(c.*field); },
          [key, field](RunConfig& c, std::string_view v) {
            if constexpr (std::is_same_v<T, std::uint64_t>) {
              const auto n = csv::to_int(v, what(key));
              if (n < 0) throw InputError(what(key) + ": must be non-negative");
              c.*field = static_cast<std::uint64_t>(n);
            } else if constexpr (std::is_same_v<T, unsigned>) {
              const auto n = parse_int(key, v);
              if (n < 0) throw InputError(what(key) + ": must be non-negative");
              c.*field = static_cast<unsigned>(n);
            } else {
              c.*field = parse_int(key, v);
            }
          }};
}

Entry real_entry(const char* key, double RunConfig::*field) {
  return {key, [field](const RunConfig& c) { return csv::format_double(c.*field); },
          [key, field](RunConfig& c, std::string_view v) { c.*field = csv::to_double(v, what(key)); }};
}

Entry bool_entry(const char* key, bool RunConfig::*field) {
  return {key, [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); },
          [key, field](RunConfig& c, std::string_view v) { c.*field = parse_bool(key, v); }};
}

Entry text_entry(const char* key, std::string RunConfig::*field) {
  return {key, [field](const RunConfig& c) { return c.*field; },
          [field](RunConfig& c, std::string_view v) { c.*field = std::string(v); }};
}

Entry list_entry(const char* key, std::vector<int> RunConfig::*field) {
  return {key, [field](const RunConfig& c) { return show_list(c.*field); },
          [key, field](RunConfig& c, std::string_view v) { c.*field = parse_list(key, v); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      int_entry("seed", &RunConfig::seed),
      int_entry("threads", &RunConfig::threads),
      int_entry("data.products", &RunConfig::data_products),
      int_entry("data.days", &RunConfig::data_days),
      text_entry("data.start", &RunConfig::data_start),
      int_entry("window.input_days", &RunConfig::input_days),
      int_entry("window.horizon_days", &RunConfig::horizon_days),
      int_entry("tcn.kernel", &RunConfig::tcn_kernel),
      list_entry("tcn.dilations", &RunConfig::tcn_dilations),
      int_entry("tcn.channels", &RunConfig::tcn_channels),
      int_entry("train.epochs", &RunConfig::train_epochs),
      real_entry("train.lr", &RunConfig::train_lr),
      int_entry("bootstrap.replicas", &RunConfig::bootstrap_replicas),
      real_entry("bootstrap.min_fraction", &RunConfig::bootstrap_min_fraction),
      real_entry("bootstrap.level", &RunConfig::bootstrap_level),
      list_entry("bootstrap.dilations", &RunConfig::bootstrap_dilations),
      int_entry("bootstrap.channels", &RunConfig::bootstrap_channels),
      int_entry("bootstrap.epochs", &RunConfig::bootstrap_epochs),
      real_entry("bootstrap.lr", &RunConfig::bootstrap_lr),
      int_entry("topsis.top_k", &RunConfig::topsis_top_k),
      int_entry("ga.pop", &RunConfig::ga_pop),
      int_entry("ga.gens", &RunConfig::ga_gens),
      int_entry("ga.tournament", &RunConfig::ga_tournament),
      int_entry("ga.elitism", &RunConfig::ga_elitism),
      real_entry("ga.crossover_rate", &RunConfig::ga_crossover_rate),
      real_entry("ga.mutation_prob", &RunConfig::ga_mutation_prob),
      real_entry("ga.sigma_fraction", &RunConfig::ga_sigma_fraction),
      real_entry("ga.sigma_decay", &RunConfig::ga_sigma_decay),
      bool_entry("ga.constrain_demand", &RunConfig::ga_constrain_demand),
      bool_entry("ga.constrain_allocation", &RunConfig::ga_constrain_allocation),
      real_entry("ga.flat_price_cap", &RunConfig::ga_flat_price_cap),
      text_entry("paths.terms", &RunConfig::path_terms),
      text_entry("paths.costs", &RunConfig::path_costs),
      text_entry("paths.sales", &RunConfig::path_sales),
      text_entry("paths.forecast", &RunConfig::path_forecast),
      text_entry("paths.loss_curves", &RunConfig::path_loss_curves),
      text_entry("paths.intervals", &RunConfig::path_intervals),
      text_entry("paths.intervals_daily", &RunConfig::path_intervals_daily),
      text_entry("paths.ranking", &RunConfig::path_ranking),
      text_entry("paths.demand", &RunConfig::path_demand),
      text_entry("paths.plan", &RunConfig::path_plan),
      text_entry("paths.ga_trace", &RunConfig::path_ga_trace),
      text_entry("paths.baseline_plan", &RunConfig::path_baseline_plan),
      text_entry("paths.manifest", &RunConfig::path_manifest),
  };
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError("invalid config: " + message);
}

}  // namespace

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& e : entries())
    if (key == e.key) {
      e.set(cfg, trim(value));
      return;
    }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> to_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries()) out.emplace_back(e.key, e.get(cfg));
  return out;
}

void apply_text(RunConfig& cfg, std::string_view text, std::string_view source) {
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    set_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg;
  apply_text(cfg, buf.str(), path.string());
  return cfg;
}

std::string render(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : to_pairs(cfg)) out += k + " = " + v + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  require(cfg.data_products >= 1, "data.products must be >= 1");
  require(cfg.data_days >= 30, "data.days must be >= 30");
  calendar::parse_date(cfg.data_start);
  require(cfg.input_days >= 1 && cfg.horizon_days >= 1, "window sizes must be >= 1");
  require(cfg.tcn_kernel >= 1 && cfg.tcn_channels >= 1, "tcn.kernel and tcn.channels must be >= 1");
  require(cfg.bootstrap_channels >= 1, "bootstrap.channels must be >= 1");
  require(!cfg.tcn_dilations.empty() && !cfg.bootstrap_dilations.empty(), "dilation lists must not be empty");
  for (int d : cfg.tcn_dilations) require(d >= 1, "dilations must be >= 1");
  for (int d : cfg.bootstrap_dilations) require(d >= 1, "dilations must be >= 1");
  require(cfg.train_epochs >= 1 && cfg.bootstrap_epochs >= 1, "epochs must be >= 1");
  require(cfg.train_lr > 0.0 && cfg.bootstrap_lr > 0.0, "learning rates must be > 0");
  require(cfg.bootstrap_replicas >= 1, "bootstrap.replicas must be >= 1");
  require(cfg.bootstrap_min_fraction > 0.0 && cfg.bootstrap_min_fraction <= 1.0,
          "bootstrap.min_fraction must be in (0, 1]");
  require(cfg.bootstrap_level > 0.0 && cfg.bootstrap_level < 1.0, "bootstrap.level must be in (0, 1)");
  require(cfg.topsis_top_k >= 1, "topsis.top_k must be >= 1");
  require(cfg.ga_pop >= 2 && cfg.ga_gens >= 1, "ga.pop must be >= 2 and ga.gens >= 1");
  require(cfg.ga_tournament >= 1, "ga.tournament must be >= 1");
  require(cfg.ga_elitism >= 1 && cfg.ga_elitism < cfg.ga_pop, "ga.elitism must be in [1, ga.pop)");
  for (double p : {cfg.ga_crossover_rate, cfg.ga_mutation_prob})
    require(p >= 0.0 && p <= 1.0, "probabilities must be in [0, 1]");
  require(cfg.ga_sigma_fraction >= 0.0, "ga.sigma_fraction must be >= 0");
  require(cfg.ga_sigma_decay > 0.0 && cfg.ga_sigma_decay <= 1.0, "ga.sigma_decay must be in (0, 1]");
  require(cfg.ga_flat_price_cap > 0.0, "ga.flat_price_cap must be > 0");
}

}  // namespace vegopt::app
