#include "stages.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "vegopt/csv.hpp"
#include "vegopt/demand.hpp"
#include "vegopt/error.hpp"
#include "vegopt/forecaster.hpp"
#include "vegopt/gaopt.hpp"
#include "vegopt/intervals.hpp"
#include "vegopt/mcdm.hpp"
#include "vegopt/parallel.hpp"
#include "vegopt/pipeline.hpp"
#include "vegopt/random.hpp"

#ifndef VEGOPT_VERSION
#define VEGOPT_VERSION "unknown"
#endif

namespace vegopt::app {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

unsigned worker_count(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

pipeline::WindowShape shape_of(const RunConfig& cfg) { return {cfg.input_days, cfg.horizon_days}; }

std::vector<double> tail(const std::vector<double>& v, std::size_t n) {
  return {v.end() - static_cast<std::ptrdiff_t>(n), v.end()};
}

void write_interval(csv::Writer& w, const intervals::SalesInterval& iv) {
  w.cell(iv.level).cell(iv.mean).cell(iv.std).cell(iv.lower).cell(iv.upper);
}

}  // namespace

fs::path Context::resolve(const std::string& p) const {
  const fs::path path(p);
  return path.is_absolute() ? path : out_dir / path;
}

calendar::TermBoundaryTable Context::term_table() {
  if (cfg.path_terms.empty()) return calendar::TermBoundaryTable::default_table();
  const auto path = resolve(cfg.path_terms);
  note_input(path);
  return calendar::TermBoundaryTable::load_csv(path);
}

void Context::note_input(const fs::path& path) { inputs[path.string()] = "fnv1a64:" + file_digest(path); }

void Context::warning(StageReport& stage, const std::string& message) {
  stage.warnings.push_back(message);
  warn << "warning: " << message << "\n";
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

StageReport stage_synth(Context& ctx) {
  StageReport rep;
  rep.name = "synth";
  const auto& cfg = ctx.cfg;
  const auto data = pipeline::generate_synthetic(cfg.data_products, cfg.data_days, cfg.seed, ctx.term_table(),
                                                 calendar::parse_date(cfg.data_start));
  const auto costs = ctx.resolve(cfg.path_costs);
  const auto sales = ctx.resolve(cfg.path_sales);
  pipeline::write_costs_csv(costs, data.cost_records());
  pipeline::write_sales_csv(sales, data.sales_records());
  rep.outputs = {costs.string(), sales.string()};
  rep.details["products"] = cfg.data_products;
  rep.details["days"] = cfg.data_days;
  ctx.log << "synth: " << cfg.data_products << " products x " << cfg.data_days << " days\n";
  return rep;
}

StageReport stage_forecast(Context& ctx) {
  StageReport rep;
  rep.name = "forecast";
  const auto& cfg = ctx.cfg;
  const auto table = ctx.term_table();
  const auto costs_path = ctx.resolve(cfg.path_costs);
  ctx.note_input(costs_path);
  const auto all = pipeline::cost_series(pipeline::read_costs_csv(costs_path));
  const auto shape = shape_of(cfg);
  const auto needed = static_cast<std::size_t>(cfg.input_days + cfg.horizon_days);

  std::vector<const pipeline::SeriesFrame*> usable;
  for (const auto& s : all) {
    if (s.size() < needed)
      ctx.warning(rep, "product " + s.product_id + " has " + std::to_string(s.size()) +
                           " days of cost history, needs " + std::to_string(needed) + "; skipped");
    else
      usable.push_back(&s);
  }

  struct Result {
    std::vector<double> prediction;
    std::vector<double> loss_curve;
    double final_loss = 0.0;
  };
  std::vector<Result> results(usable.size());
  const forecaster::ModelConfig model_cfg{cfg.input_days, cfg.horizon_days, cfg.tcn_kernel, cfg.tcn_dilations,
                                          cfg.tcn_channels};
  parallel_for(usable.size(), worker_count(cfg), [&](std::size_t i) {
    const auto& s = *usable[i];
    const auto scaler = pipeline::fit_normalizer(s.values);
    const auto windows = pipeline::make_windows(s, scaler, table, shape);
    auto model = forecaster::ForecasterModel::create(model_cfg, s.product_id, scaler,
                                                     derive_seed(cfg.seed, "forecast.model/" + s.product_id));
    const auto report = forecaster::train(
        model, windows, {cfg.train_epochs, cfg.train_lr, derive_seed(cfg.seed, "forecast.order/" + s.product_id), true});
    const auto history = tail(s.values, static_cast<std::size_t>(cfg.input_days));
    results[i] = {forecaster::predict(model, history, calendar::encode_date_range(s.end(), cfg.horizon_days, table)),
                  report.loss_curve, report.final_loss};
  });

  csv::Writer forecast({"product_id", "date", "predicted_cost"});
  csv::Writer curves({"product_id", "epoch", "loss"});
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const auto& s = *usable[i];
    for (std::size_t j = 0; j < results[i].prediction.size(); ++j)
      forecast.cell(s.product_id).cell(calendar::format_date(s.end() + std::chrono::days(static_cast<long>(j))))
          .cell(results[i].prediction[j]).end_row();
    for (std::size_t e = 0; e < results[i].loss_curve.size(); ++e)
      curves.cell(s.product_id).cell(e + 1).cell(results[i].loss_curve[e]).end_row();
    loss_sum += results[i].final_loss;
  }
  const auto forecast_path = ctx.resolve(cfg.path_forecast);
  const auto curves_path = ctx.resolve(cfg.path_loss_curves);
  forecast.save(forecast_path);
  curves.save(curves_path);
  rep.outputs = {forecast_path.string(), curves_path.string()};
  rep.details["products"] = usable.size();
  rep.details["skipped"] = all.size() - usable.size();
  if (!usable.empty()) rep.details["mean_final_loss"] = loss_sum / static_cast<double>(usable.size());
  ctx.log << "forecast: " << usable.size() << " products, " << all.size() - usable.size() << " skipped\n";
  return rep;
}

StageReport stage_intervals(Context& ctx) {
  StageReport rep;
  rep.name = "intervals";
  const auto& cfg = ctx.cfg;
  const auto table = ctx.term_table();
  const auto sales_path = ctx.resolve(cfg.path_sales);
  ctx.note_input(sales_path);
  const auto volumes = pipeline::sales_volume_series(pipeline::read_sales_csv(sales_path));

  csv::Writer weekly({"product_id", "level", "mean", "std", "lower", "upper"});
  csv::Writer daily({"product_id", "date", "level", "mean", "std", "lower", "upper"});
  std::size_t done = 0;
  for (const auto& s : volumes) {
    const auto shortest = static_cast<std::size_t>(std::ceil(cfg.bootstrap_min_fraction * static_cast<double>(s.size())));
    if (pipeline::window_count(shortest, shape_of(cfg)) == 0) {
      ctx.warning(rep, "product " + s.product_id + " has too little sales history for bootstrap slices; skipped");
      continue;
    }
    intervals::BootstrapConfig bc;
    bc.replicas = cfg.bootstrap_replicas;
    bc.min_fraction = cfg.bootstrap_min_fraction;
    bc.seed = derive_seed(cfg.seed, "intervals/" + s.product_id);
    bc.model = {cfg.input_days, cfg.horizon_days, cfg.tcn_kernel, cfg.bootstrap_dilations, cfg.bootstrap_channels};
    bc.epochs = cfg.bootstrap_epochs;
    bc.lr = cfg.bootstrap_lr;
    bc.threads = worker_count(cfg);
    const auto ensemble = intervals::bootstrap_train(s, bc, table);
    const auto history = tail(s.values, static_cast<std::size_t>(cfg.input_days));
    const auto terms = calendar::encode_date_range(s.end(), cfg.horizon_days, table);

    const auto iv = intervals::predict_interval(ensemble, history, terms, cfg.bootstrap_level);
    weekly.cell(s.product_id);
    write_interval(weekly, iv);
    weekly.end_row();
    const auto days = intervals::predict_daily_intervals(ensemble, history, terms, cfg.bootstrap_level);
    for (std::size_t j = 0; j < days.size(); ++j) {
      daily.cell(s.product_id).cell(calendar::format_date(s.end() + std::chrono::days(static_cast<long>(j))));
      write_interval(daily, days[j]);
      daily.end_row();
    }
    ++done;
  }
  const auto weekly_path = ctx.resolve(cfg.path_intervals);
  const auto daily_path = ctx.resolve(cfg.path_intervals_daily);
  weekly.save(weekly_path);
  daily.save(daily_path);
  rep.outputs = {weekly_path.string(), daily_path.string()};
  rep.details["products"] = done;
  rep.details["skipped"] = volumes.size() - done;
  rep.details["replicas"] = cfg.bootstrap_replicas;
  ctx.log << "intervals: " << done << " products, " << cfg.bootstrap_replicas << " replicas each\n";
  return rep;
}

StageReport stage_rank(Context& ctx) {
  StageReport rep;
  rep.name = "rank";
  const auto& cfg = ctx.cfg;
  const auto costs_path = ctx.resolve(cfg.path_costs);
  const auto sales_path = ctx.resolve(cfg.path_sales);
  ctx.note_input(costs_path);
  ctx.note_input(sales_path);
  std::map<std::string, pipeline::SeriesFrame> costs;
  for (auto& s : pipeline::cost_series(pipeline::read_costs_csv(costs_path))) costs.emplace(s.product_id, std::move(s));

  // Criteria: total profit against the wholesale cost of the sale day (dates
  // outside the cost history use its nearest end), and total volume.
  std::map<std::string, std::pair<double, double>> totals;
  for (const auto& r : pipeline::read_sales_csv(sales_path)) {
    const auto c = costs.find(r.product_id);
    if (c == costs.end()) continue;
    const auto& cs = c->second;
    const long offset = (r.date - cs.start).count();
    const auto idx = static_cast<std::size_t>(std::clamp<long>(offset, 0, static_cast<long>(cs.size()) - 1));
    auto& t = totals[r.product_id];
    t.first += r.quantity_kg * (r.unit_price - cs.values[idx]);
    t.second += r.quantity_kg;
  }
  std::vector<std::string> ids;
  for (const auto& [id, _] : costs)
    if (!totals.count(id)) ctx.warning(rep, "product " + id + " has costs but no sales; not ranked");
  Matrix raw(totals.size(), 2);
  std::size_t row = 0;
  for (const auto& [id, t] : totals) {
    ids.push_back(id);
    raw(row, 0) = t.first;
    raw(row, 1) = t.second;
    ++row;
  }
  if (ids.size() < 2) throw InputError("ranking needs at least two products with both costs and sales");

  const auto ranking = mcdm::rank_products(ids, raw);
  csv::Writer out({"rank", "product_id", "score", "d_plus", "d_minus"});
  for (std::size_t k = 0; k < ranking.topsis.ranking.size(); ++k) {
    const auto i = ranking.topsis.ranking[k];
    out.cell(k + 1).cell(ids[i]).cell(ranking.topsis.scores[i]).cell(ranking.topsis.d_plus[i])
        .cell(ranking.topsis.d_minus[i]).end_row();
  }
  const auto path = ctx.resolve(cfg.path_ranking);
  out.save(path);

  auto k = static_cast<std::size_t>(cfg.topsis_top_k);
  if (k > ids.size()) {
    ctx.warning(rep, "topsis.top_k = " + std::to_string(k) + " exceeds the " + std::to_string(ids.size()) +
                         " ranked products; all are selected");
    k = ids.size();
  }
  rep.outputs = {path.string()};
  rep.details["products"] = ids.size();
  rep.details["weights"] = {{"total_profit", ranking.weights.w[0]}, {"total_sales_volume", ranking.weights.w[1]}};
  rep.details["selected"] = mcdm::select_top(ranking.topsis, ids, k);
  ctx.log << "rank: " << ids.size() << " products, top " << k << " selected\n";
  return rep;
}

namespace {

std::map<std::string, double> mean_forecast_costs(const fs::path& path) {
  const auto table = csv::read(path);
  csv::expect_header(table, {"product_id", "date", "predicted_cost"}, path.string());
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : table.rows) {
    auto& a = acc[r[0]];
    a.first += csv::to_double(r[2], "predicted_cost");
    ++a.second;
  }
  std::map<std::string, double> out;
  for (const auto& [id, a] : acc) out[id] = a.first / a.second;
  return out;
}

std::map<std::string, intervals::SalesInterval> read_intervals(const fs::path& path) {
  const auto table = csv::read(path);
  csv::expect_header(table, {"product_id", "level", "mean", "std", "lower", "upper"}, path.string());
  std::map<std::string, intervals::SalesInterval> out;
  for (const auto& r : table.rows)
    out[r[0]] = {r[0], csv::to_double(r[2], "mean"), csv::to_double(r[3], "std"), csv::to_double(r[4], "lower"),
                 csv::to_double(r[5], "upper"), csv::to_double(r[1], "level")};
  return out;
}

std::vector<std::string> read_ranking(const fs::path& path) {
  const auto table = csv::read(path);
  csv::expect_header(table, {"rank", "product_id", "score", "d_plus", "d_minus"}, path.string());
  std::vector<std::pair<long long, std::string>> rows;
  for (const auto& r : table.rows) rows.emplace_back(csv::to_int(r[0], "rank"), r[1]);
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  for (auto& [_, id] : rows) out.push_back(std::move(id));
  return out;
}

void save_plan(const std::vector<gaopt::PlanRow>& plan, const fs::path& path) {
  csv::Writer w({"product_id", "price", "allocation", "expected_sales", "expected_profit"});
  for (const auto& r : plan) w.cell(r.product_id).cell(r.price).cell(r.allocation).cell(r.expected_sales)
                                 .cell(r.expected_profit).end_row();
  w.save(path);
}

}  // namespace

StageReport stage_optimize(Context& ctx, bool random_baseline) {
  StageReport rep;
  rep.name = "optimize";
  const auto& cfg = ctx.cfg;
  const auto ranking_path = ctx.resolve(cfg.path_ranking);
  const auto forecast_path = ctx.resolve(cfg.path_forecast);
  const auto intervals_path = ctx.resolve(cfg.path_intervals);
  const auto sales_path = ctx.resolve(cfg.path_sales);
  for (const auto& p : {ranking_path, forecast_path, intervals_path, sales_path}) ctx.note_input(p);

  const auto ranked = read_ranking(ranking_path);
  const auto unit_costs = mean_forecast_costs(forecast_path);
  const auto weekly = read_intervals(intervals_path);

  const auto records = pipeline::read_sales_csv(sales_path);
  const auto volumes = pipeline::sales_volume_series(records);
  const auto prices = pipeline::sales_price_series(records);
  std::map<std::string, demand::DemandCurve> curves;
  csv::Writer demand_out({"product_id", "intercept", "slope", "r_squared", "anomalous_slope"});
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    try {
      const auto c = demand::fit_demand(prices[i].values, volumes[i].values, volumes[i].product_id);
      demand_out.cell(c.product_id).cell(c.intercept).cell(c.slope).cell(c.r_squared).cell(c.anomalous_slope())
          .end_row();
      curves.emplace(c.product_id, c);
    } catch (const InputError& e) {
      ctx.warning(rep, "demand fit for " + volumes[i].product_id + " failed: " + e.what());
    }
  }
  const auto demand_path = ctx.resolve(cfg.path_demand);
  demand_out.save(demand_path);

  const auto k = std::min(ranked.size(), static_cast<std::size_t>(cfg.topsis_top_k));
  std::vector<gaopt::ProductContext> products;
  for (std::size_t r = 0; r < k; ++r) {
    const auto& id = ranked[r];
    const auto cost = unit_costs.find(id);
    const auto iv = weekly.find(id);
    const auto curve = curves.find(id);
    if (cost == unit_costs.end() || iv == weekly.end() || curve == curves.end()) {
      ctx.warning(rep, "product " + id + " lacks a forecast, interval or demand curve; left out of the plan");
      continue;
    }
    if (!(cost->second > 0.0)) {
      ctx.warning(rep, "product " + id + " has a non-positive forecast cost; left out of the plan");
      continue;
    }
    products.push_back({id, cost->second, curve->second, iv->second});
  }
  if (products.empty()) throw InputError("no selected product has forecast, interval and demand inputs");

  const gaopt::Problem problem(std::move(products), {cfg.ga_constrain_demand, cfg.ga_constrain_allocation,
                                                     cfg.ga_flat_price_cap});
  gaopt::EvolveConfig ec;
  ec.population = cfg.ga_pop;
  ec.generations = cfg.ga_gens;
  ec.tournament = cfg.ga_tournament;
  ec.elitism = cfg.ga_elitism;
  ec.crossover_rate = cfg.ga_crossover_rate;
  ec.mutation = {cfg.ga_mutation_prob, cfg.ga_sigma_fraction, cfg.ga_sigma_decay};
  ec.seed = derive_seed(cfg.seed, "optimize.ga");
  const auto result = gaopt::evolve(problem, ec);

  const auto plan_path = ctx.resolve(cfg.path_plan);
  const auto trace_path = ctx.resolve(cfg.path_ga_trace);
  save_plan(gaopt::decode_plan(result.best, problem), plan_path);
  csv::Writer trace({"generation", "max", "min", "avg"});
  for (const auto& g : result.trace)
    trace.cell(g.generation).cell(g.max_fitness).cell(g.min_fitness).cell(g.avg_fitness).end_row();
  trace.save(trace_path);
  rep.outputs = {demand_path.string(), plan_path.string(), trace_path.string()};
  rep.details["products"] = problem.size();
  rep.details["profit"] = result.best_fitness;
  rep.details["evaluations"] = result.evaluations;
  ctx.log << "optimize: " << problem.size() << " products, weekly profit " << csv::format_double(result.best_fitness)
          << "\n";

  if (random_baseline) {
    const auto rs = gaopt::random_search(problem, result.evaluations, derive_seed(cfg.seed, "optimize.random"));
    const auto baseline_path = ctx.resolve(cfg.path_baseline_plan);
    save_plan(gaopt::decode_plan(rs.best, problem), baseline_path);
    rep.outputs.push_back(baseline_path.string());
    rep.details["random_search_profit"] = rs.best_fitness;
    ctx.log << "baseline: random search with " << rs.evaluations << " evaluations, weekly profit "
            << csv::format_double(rs.best_fitness) << (result.best_fitness >= rs.best_fitness ? " (GA ahead)" : " (GA behind)")
            << "\n";
  }
  return rep;
}

StageReport stage_evaluate(Context& ctx, const fs::path& predictions, const fs::path& truth) {
  StageReport rep;
  rep.name = "evaluate";
  ctx.note_input(predictions);
  ctx.note_input(truth);
  std::map<std::pair<std::string, std::string>, double> actual;
  for (const auto& r : pipeline::read_costs_csv(truth))
    actual[{r.product_id, calendar::format_date(r.date)}] = r.wholesale_cost;

  const auto table = csv::read(predictions);
  csv::expect_header(table, {"product_id", "date", "predicted_cost"}, predictions.string());
  std::vector<double> y, y_hat;
  for (const auto& r : table.rows) {
    const auto it = actual.find({r[0], calendar::format_date(calendar::parse_date(r[1]))});
    if (it == actual.end()) continue;
    y.push_back(it->second);
    y_hat.push_back(csv::to_double(r[2], "predicted_cost"));
  }
  if (y.empty()) throw InputError("no prediction has a matching truth row");
  if (y.size() < table.rows.size())
    ctx.warning(rep, std::to_string(table.rows.size() - y.size()) + " predictions have no truth row");
  const auto m = forecaster::evaluate(y, y_hat);
  ctx.log << "pairs " << y.size() << "\n"
          << "mse " << csv::format_double(m.mse) << "\n"
          << "mae " << csv::format_double(m.mae) << "\n"
          << "rmse " << csv::format_double(m.rmse) << "\n";
  rep.details["pairs"] = y.size();
  rep.details["mse"] = m.mse;
  rep.details["mae"] = m.mae;
  rep.details["rmse"] = m.rmse;
  return rep;
}

void write_manifest(const Context& ctx, const std::string& command) {
  ordered_json m;
  m["tool"] = "vegopt";
  m["version"] = VEGOPT_VERSION;
  m["command"] = command;
  auto& config = m["config"] = ordered_json::object();
  for (const auto& [k, v] : to_pairs(ctx.cfg)) config[k] = v;
  m["inputs"] = ctx.inputs;
  auto& stages = m["stages"] = ordered_json::array();
  for (const auto& s : ctx.stages)
    stages.push_back({{"name", s.name}, {"seconds", s.seconds}, {"outputs", s.outputs}, {"warnings", s.warnings},
                      {"details", s.details}});
  const auto path = ctx.resolve(ctx.cfg.path_manifest);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << m.dump(2) << "\n";
}

}  // namespace vegopt::app
