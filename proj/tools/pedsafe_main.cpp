// pedsafe: run V2I pedestrian-safety experiments and post-process results.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pedsafe/config.hpp"
#include "pedsafe/error.hpp"
#include "pedsafe/experiment.hpp"
#include "pedsafe/plot_data.hpp"
#include "pedsafe/records.hpp"

namespace fs = std::filesystem;
using namespace pedsafe;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

struct RunArgs {
  std::string config;
  std::string scenario;
  std::vector<std::string> modes;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  unsigned workers = 0;
  bool quiet = false;
};

harness::ExperimentConfig config_from_run_dir(const fs::path& dir) {
  const auto text = harness::read_text(dir / harness::kManifestName);
  const auto first = text.substr(0, text.find('\n'));
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(first);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  if (!header.contains("config")) throw IoError("manifest in " + dir.string() + " has no config");
  return harness::parse_config(header["config"].dump());
}

int cmd_run(const RunArgs& a) {
  harness::ExperimentConfig c;
  if (!a.config.empty()) {
    c = harness::load_config(a.config);
    if (!a.scenario.empty() && a.scenario != c.scenario_name) {
      throw ConfigError("scenario", "--scenario conflicts with the config file");
    }
  } else {
    if (a.scenario.empty()) throw ConfigError("scenario", "give --config or --scenario");
    c = harness::default_config(a.scenario);
  }
  if (!a.modes.empty()) {
    c.modes.clear();
    for (const auto& m : a.modes) {
      auto mode = mode_from_string(m);
      if (!mode) throw ConfigError("mode", "expected single_vehicle or v2i, got '" + m + "'");
      c.modes.push_back(*mode);
    }
  }
  if (a.episodes > 0) c.episodes = a.episodes;
  if (a.seed_set) c.master_seed = a.seed;
  if (!a.out.empty()) c.output_dir = a.out;
  if (a.workers > 0) c.workers = a.workers;
  harness::validate(c);

  const auto result = harness::run_experiment(c);
  if (!a.quiet) {
    std::cout << harness::kReportCsvHeader << '\n';
    for (const auto& r : result.reports) {
      const auto csv = harness::report_to_csv(r);
      std::cout << csv.substr(csv.find('\n') + 1);
    }
    std::cerr << "outputs in " << result.manifest.path.parent_path().string() << '\n';
  }
  return kOk;
}

int cmd_report(const std::string& run_dir, bool write) {
  const auto c = config_from_run_dir(run_dir);
  std::cout << harness::kReportCsvHeader << '\n';
  for (auto mode : c.modes) {
    const auto files = harness::mode_outputs(run_dir, mode);
    const auto r = harness::report_from_records(files.records, c.scenario.name, mode, c.safety);
    const auto csv = harness::report_to_csv(r);
    std::cout << csv.substr(csv.find('\n') + 1);
    if (write) {
      harness::write_text(files.report_csv, csv);
      harness::write_text(files.report_json, harness::report_to_json(r));
    }
  }
  return kOk;
}

int cmd_validate(const std::string& path, bool print) {
  const auto c = harness::load_config(path);
  if (print) {
    std::cout << harness::serialize_config(c) << '\n';
  } else {
    std::cout << "ok: " << c.scenario_name << ", " << c.episodes << " episodes\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic V2I pedestrian-safety simulator"};
  app.set_version_flag("--version", harness::tool_version());
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment");
  run_cmd->add_option("--config", run.config, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("--scenario", run.scenario, "crossing | jaywalking | background_blending");
  run_cmd->add_option("--mode", run.modes, "single_vehicle | v2i (repeatable)");
  run_cmd->add_option("--episodes", run.episodes, "Episodes per mode")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--workers", run.workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", run.quiet, "Print nothing on success");

  std::string report_dir;
  bool report_write = false;
  auto* report_cmd = app.add_subcommand("report", "Recompute reports from a run's records");
  report_cmd->add_option("run_dir", report_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_flag("--write", report_write, "Overwrite the run's report files");

  std::string plot_dir;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plot-data", "Write injury-surface and detection-histogram CSVs");
  plot_cmd->add_option("run_dir", plot_dir, "Run output directory holding both modes")
      ->required()
      ->check(CLI::ExistingDirectory);
  plot_cmd->add_option("--out", plot_out, "Directory for the CSVs (default: run_dir)");

  std::string validate_path;
  bool validate_print = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file");
  validate_cmd->add_option("config", validate_path, "JSON experiment config")->required();
  validate_cmd->add_flag("--print", validate_print, "Print the config with all defaults filled in");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) {
      run.seed_set = run_cmd->count("--seed") > 0;
      return cmd_run(run);
    }
    if (*report_cmd) return cmd_report(report_dir, report_write);
    if (*plot_cmd) {
      harness::emit_plot_data(plot_dir, plot_out.empty() ? plot_dir : plot_out);
      return kOk;
    }
    if (*validate_cmd) return cmd_validate(validate_path, validate_print);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
