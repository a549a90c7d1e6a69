#include "vegopt/app/app.hpp"

#include <chrono>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "stages.hpp"
#include "vegopt/error.hpp"

namespace vegopt::app {
namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::vector<std::string> sets;
  std::string baseline;
  std::string predictions;
  std::string truth;
};

RunConfig build_config(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
    set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.seed = *f.seed;
  validate(cfg);
  return cfg;
}

void timed(Context& ctx, const std::function<StageReport()>& stage) {
  const auto t0 = std::chrono::steady_clock::now();
  auto rep = stage();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ctx.stages.push_back(std::move(rep));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Vegetable cost forecasting, ranking and price/allocation optimization", "vegopt"};
  Flags f;
  cli.add_option("--config", f.config, "Key = value configuration file")->check(CLI::ExistingFile);
  cli.add_option("--seed", f.seed, "Top-level seed (overrides the config)");
  cli.add_option("--out", f.out, "Output directory; relative paths in the config resolve here");
  cli.add_option("--set", f.sets, "Override one config key, key=value (repeatable)");
  cli.require_subcommand(1, 1);

  cli.add_subcommand("synth", "Generate a synthetic costs.csv and sales.csv");
  cli.add_subcommand("forecast", "Train one forecaster per product and write forecast.csv");
  cli.add_subcommand("intervals", "Bootstrap weekly sales intervals and write intervals.csv");
  cli.add_subcommand("rank", "Entropy-weighted TOPSIS ranking, writes ranking.csv");
  auto* optimize = cli.add_subcommand("optimize", "GA price/allocation plan, writes plan.csv and ga_trace.csv");
  optimize->add_option("--baseline", f.baseline, "Also run an equal-budget baseline")->check(CLI::IsMember({"random"}));
  auto* evaluate = cli.add_subcommand("evaluate", "MSE, MAE and RMSE of predictions against true costs");
  evaluate->add_option("--predictions", f.predictions, "Forecast CSV (default: the configured forecast path)");
  evaluate->add_option("--truth", f.truth, "Costs CSV with the realized values")->required();
  auto* run_all = cli.add_subcommand("run-all", "synth, forecast, intervals, rank and optimize in sequence");
  run_all->add_option("--baseline", f.baseline, "Also run an equal-budget baseline")->check(CLI::IsMember({"random"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const auto command = cli.get_subcommands().front()->get_name();
  try {
    Context ctx{build_config(f), f.out, out, err, {}, nlohmann::ordered_json::object()};
    std::filesystem::create_directories(ctx.out_dir);
    const bool baseline = f.baseline == "random";
    if (command == "synth" || command == "run-all") timed(ctx, [&] { return stage_synth(ctx); });
    if (command == "forecast" || command == "run-all") timed(ctx, [&] { return stage_forecast(ctx); });
    if (command == "intervals" || command == "run-all") timed(ctx, [&] { return stage_intervals(ctx); });
    if (command == "rank" || command == "run-all") timed(ctx, [&] { return stage_rank(ctx); });
    if (command == "optimize" || command == "run-all") timed(ctx, [&] { return stage_optimize(ctx, baseline); });
    if (command == "evaluate") {
      const auto predictions = f.predictions.empty() ? ctx.resolve(ctx.cfg.path_forecast)
                                                     : std::filesystem::path(f.predictions);
      timed(ctx, [&] { return stage_evaluate(ctx, predictions, f.truth); });
    }
    write_manifest(ctx, command);
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace vegopt::app
