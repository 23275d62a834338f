#include "pedsafe/experiment.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "pedsafe/error.hpp"
#include "pedsafe/initial_scene.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/records.hpp"

#ifndef PEDSAFE_VERSION
#define PEDSAFE_VERSION "0.0.0"
#endif

namespace pedsafe::harness {

using json = nlohmann::ordered_json;

namespace {

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot create manifest " + path.string());
  }

  void line(const json& j) {
    out_ << j.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("cannot write manifest " + path_.string());
  }

  void abort(const std::string& why) noexcept {
    try {
      out_.clear();
      out_ << json{{"complete", false}, {"error", why}}.dump() << '\n';
      out_.flush();
    } catch (...) {
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct Finished {
  std::string line;
  safety::EpisodeSummary summary;
};

Finished finish(const ExperimentConfig& c, Mode mode, std::uint64_t i) {
  auto rec = run_one(c, mode, i);
  return {record_to_json(rec, c.write_trajectories), safety::summarize(rec)};
}

// Runs all episodes of one mode and hands them to `sink` in index order.
void run_mode(const ExperimentConfig& c, Mode mode,
              const std::function<void(std::uint64_t, Finished&&)>& sink) {
  const std::uint64_t n = c.episodes;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(c.workers, n));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) sink(i, finish(c, mode, i));
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::uint64_t, Finished> done;
  std::exception_ptr failure;

  auto work = [&] {
    while (!stop.load()) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        auto f = finish(c, mode, i);
        std::lock_guard lock(mu);
        done.emplace(i, std::move(f));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop.store(true);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);

  std::exception_ptr sink_failure;
  for (std::uint64_t i = 0; i < n; ++i) {
    Finished f;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return done.count(i) > 0 || failure != nullptr; });
      if (failure) break;
      f = std::move(done.at(i));
      done.erase(i);
    }
    try {
      sink(i, std::move(f));
    } catch (...) {
      sink_failure = std::current_exception();
      stop.store(true);
      break;
    }
  }
  for (auto& t : pool) t.join();
  if (sink_failure) std::rethrow_exception(sink_failure);
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string tool_version() { return PEDSAFE_VERSION; }

ModeOutputs mode_outputs(const std::filesystem::path& dir, Mode mode) {
  const std::string m(to_string(mode));
  return {mode, dir / ("records_" + m + ".jsonl"), dir / ("report_" + m + ".csv"),
          dir / ("report_" + m + ".json")};
}

world::EpisodeRecord run_one(const ExperimentConfig& config, Mode mode, std::uint64_t index) {
  const RandomStream episode(episode_seed(config.master_seed, mode_id(mode), index));
  const auto theta = stochastic::sample_initial_scene(config.scenario, episode);
  auto rec = world::run_episode(config.scenario, theta, mode, episode, config.safety);
  rec.episode_index = index;
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::function<void(Mode, std::uint64_t)>& progress) {
  validate(config);
  const auto dir = resolve_output_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  ExperimentResult result;
  auto& m = result.manifest;
  m.tool_version = tool_version();
  m.timestamp = utc_now();
  m.master_seed = config.master_seed;
  m.config_snapshot = serialize_config(config);
  m.path = dir / kManifestName;
  for (auto mode : config.modes) m.outputs.push_back(mode_outputs(dir, mode));

  ManifestWriter manifest(m.path);
  json header;
  header["tool"] = "pedsafe";
  header["version"] = m.tool_version;
  header["timestamp"] = m.timestamp;
  header["master_seed"] = m.master_seed;
  json outputs = json::object();
  for (const auto& o : m.outputs) {
    outputs[std::string(to_string(o.mode))] = {{"records", o.records.filename().string()},
                                               {"report_csv", o.report_csv.filename().string()},
                                               {"report_json", o.report_json.filename().string()}};
  }
  header["outputs"] = outputs;
  header["config"] = json::parse(m.config_snapshot);
  manifest.line(header);

  try {
    for (const auto& o : m.outputs) {
      std::ofstream records(o.records, std::ios::binary | std::ios::trunc);
      if (!records) throw IoError("cannot create " + o.records.string());
      std::vector<safety::EpisodeSummary> summaries;
      summaries.reserve(config.episodes);
      run_mode(config, o.mode, [&](std::uint64_t i, Finished&& f) {
        records << f.line << '\n';
        if (!records) throw IoError("cannot write " + o.records.string());
        summaries.push_back(f.summary);
        if (progress) progress(o.mode, i);
      });
      records.close();
      if (!records) throw IoError("cannot close " + o.records.string());

      auto report = safety::aggregate(summaries, config.scenario.name, o.mode, config.safety);
      write_text(o.report_csv, report_to_csv(report));
      write_text(o.report_json, report_to_json(report));
      result.reports.push_back(std::move(report));
    }
    manifest.line(json{{"complete", true}});
  } catch (const IoError& e) {
    manifest.abort(e.what());
    throw;
  } catch (const std::exception& e) {
    manifest.abort(e.what());
    throw;
  }
  m.complete = true;
  return result;
}

safety::SafetyReport report_from_records(const std::filesystem::path& records,
                                         const std::string& scenario, Mode mode,
                                         const safety::SafetyParams& params) {
  const auto summaries = read_summaries(records);
  return safety::aggregate(summaries, scenario, mode, params);
}

}  // namespace pedsafe::harness
