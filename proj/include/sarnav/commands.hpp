#pragma once

// Implementations behind the `sarnav` subcommands. Each validates its inputs
// completely before writing anything.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarnav/config.hpp"
#include "sarnav/dataset.hpp"
#include "sarnav/distortion.hpp"

namespace sarnav {

/// Sweep geometry: config trajectory and radar, sensitivity_scene at the
/// standoff, config grid.
SweepSetup make_sweep_setup(const RunConfig& cfg, int workers);

struct RenderResult {
  DistortionMeasurement measurement;
  Classification classification;
  std::vector<std::filesystem::path> files;
};

/// Writes truth.traj, estimated.traj, reference.sarimg, distorted.sarimg and
/// the two magnitude CSVs. `target` selects make_target(cfg, target); a
/// negative value renders the sensitivity scene instead.
RenderResult cmd_render(const RunConfig& cfg, const NavError& err0, int target,
                        const std::filesystem::path& out_dir, int workers);

struct AxisSweep {
  ErrorAxis axis = ErrorAxis::kAtPosition;
  std::vector<SweepRow> rows;
  bool matches_table = false;
  std::filesystem::path csv;
};

/// One sweep per axis, each written to sweep_<axis>.csv. Empty `magnitudes`
/// means default_sweep_magnitudes for each axis.
std::vector<AxisSweep> cmd_sweep(const RunConfig& cfg, const std::vector<ErrorAxis>& axes,
                                 const std::vector<double>& magnitudes,
                                 const std::filesystem::path& out_dir, int workers);

BuildResult cmd_build(const RunConfig& cfg, const std::filesystem::path& out_dir, int workers);

/// Position magnitudes used to calibrate shift against error.
std::vector<double> baseline_calibration_magnitudes();

/// Runs the shift-inversion estimator over the test split of a scenario-1
/// dataset and returns the metrics document:
///   {"estimator", "dataset", "scenario", "split", "n", "label_names",
///    "per_component_mse", "average_mse", "reference": {"predict_zero_mse"}}
nlohmann::json cmd_baseline(const std::filesystem::path& dataset_dir, int workers);

}  // namespace sarnav
