#include "pedsafe/plot_data.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "pedsafe/error.hpp"
#include "pedsafe/experiment.hpp"
#include "pedsafe/records.hpp"

namespace pedsafe::harness {

std::string injury_surface_csv(const safety::SafetyReport& sv, const safety::SafetyReport& v2i) {
  if (sv.injury_surface.size() != v2i.injury_surface.size()) {
    throw AggregationError("injury surfaces use different grids");
  }
  std::string out = "V,A,P_I_single_vehicle,P_I_v2i\n";
  for (std::size_t i = 0; i < sv.injury_surface.size(); ++i) {
    const auto& a = sv.injury_surface[i];
    const auto& b = v2i.injury_surface[i];
    if (a.v != b.v || a.age != b.age) throw AggregationError("injury surfaces use different grids");
    out += fmt::format("{},{},{},{}\n", a.v, a.age, a.p_injury, b.p_injury);
  }
  return out;
}

std::string detection_histogram_csv(std::span<const double> fdd_sv, std::span<const double> fdd_v2i) {
  double top = 0.0;
  for (double d : fdd_sv) top = std::max(top, d);
  for (double d : fdd_v2i) top = std::max(top, d);
  const auto bins = static_cast<std::size_t>(std::floor(top)) + 1;
  std::vector<std::size_t> sv(bins, 0);
  std::vector<std::size_t> v2i(bins, 0);
  for (double d : fdd_sv) ++sv[static_cast<std::size_t>(std::floor(d))];
  for (double d : fdd_v2i) ++v2i[static_cast<std::size_t>(std::floor(d))];
  std::string out = "bin_left_m,bin_right_m,count_sv,count_v2i\n";
  for (std::size_t b = 0; b < bins; ++b) out += fmt::format("{},{},{},{}\n", b, b + 1, sv[b], v2i[b]);
  return out;
}

void emit_plot_data(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir) {
  const auto sv_files = mode_outputs(run_dir, Mode::single_vehicle);
  const auto v2i_files = mode_outputs(run_dir, Mode::v2i);
  const auto sv_report = report_from_json(read_text(sv_files.report_json));
  const auto v2i_report = report_from_json(read_text(v2i_files.report_json));

  auto distances = [&](const std::filesystem::path& records) {
    std::vector<double> d;
    for (const auto& s : read_summaries(records)) {
      if (s.first_detection_distance) d.push_back(*s.first_detection_distance);
    }
    return d;
  };
  const auto sv = distances(sv_files.records);
  const auto v2i = distances(v2i_files.records);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "injury_surface.csv", injury_surface_csv(sv_report, v2i_report));
  write_text(out_dir / "detection_histogram.csv", detection_histogram_csv(sv, v2i));
}

}  // namespace pedsafe::harness
