#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "pedsafe/safety.hpp"

namespace pedsafe::harness {

/// Columns V, A, P_I_single_vehicle, P_I_v2i over the report grid.
std::string injury_surface_csv(const safety::SafetyReport& sv, const safety::SafetyReport& v2i);

/// Columns bin_left_m, bin_right_m, count_sv, count_v2i; 1 m bins from 0
/// up to the largest distance.
std::string detection_histogram_csv(std::span<const double> fdd_sv, std::span<const double> fdd_v2i);

/// Writes injury_surface.csv and detection_histogram.csv for a finished
/// run directory holding both modes.
void emit_plot_data(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

}  // namespace pedsafe::harness
