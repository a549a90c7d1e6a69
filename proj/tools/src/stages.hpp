#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "vegopt/app/config.hpp"
#include "vegopt/calendar.hpp"

namespace vegopt::app {

struct StageReport {
  std::string name;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  double seconds = 0.0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct Context {
  RunConfig cfg;
  std::filesystem::path out_dir;
  std::ostream& log;
  std::ostream& warn;
  std::vector<StageReport> stages;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();

  std::filesystem::path resolve(const std::string& p) const;
  calendar::TermBoundaryTable term_table();
  // Records the digest of an input file in the manifest.
  void note_input(const std::filesystem::path& path);
  void warning(StageReport& stage, const std::string& message);
};

StageReport stage_synth(Context& ctx);
StageReport stage_forecast(Context& ctx);
StageReport stage_intervals(Context& ctx);
StageReport stage_rank(Context& ctx);
StageReport stage_optimize(Context& ctx, bool random_baseline);
StageReport stage_evaluate(Context& ctx, const std::filesystem::path& predictions,
                           const std::filesystem::path& truth);

void write_manifest(const Context& ctx, const std::string& command);

// FNV-1a 64 of the file contents as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace vegopt::app
