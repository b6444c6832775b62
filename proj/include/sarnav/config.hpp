#pragma once

// Run configuration shared by the dataset builder and the command-line tool.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarnav/distortion.hpp"
#include "sarnav/nav_dynamics.hpp"
#include "sarnav/sar_sim.hpp"

namespace sarnav {

struct GeometryConfig {
  double speed = 50.0;        // m/s
  double altitude = 1000.0;   // m
  double standoff = 4700.0;   // cross-track distance to the scene, m
  double aperture_s = 5.0;
  double pulse_rate = 200.0;  // Hz
};

struct RadarConfig {
  double carrier_wavelength = 0.03125;
  double range_resolution = 0.3;
  double range_bin_spacing = 0.15;
  double window_margin = 50.0;
  double noise_std = 0.0;
};

struct GridConfig {
  std::size_t n_at = 80;
  std::size_t n_ct = 80;
  double at_spacing = 0.15;
  double ct_spacing = 0.15;
};

/// Per-target scene generation: each target location gets `scatterers`
/// point reflectors within +-extent of its centre; centres are spread
/// +-at_spread along track and +-ct_spread around the standoff.
struct SceneConfig {
  int scatterers = 5;
  double extent = 2.5;
  double at_spread = 20.0;
  double ct_spread = 30.0;
};

struct SamplingConfig {
  double position_std = 1.5;
  double velocity_std = 0.2;
};

struct CountsConfig {
  int targets = 10;
  int pairs_per_target = 20;
};

struct RunConfig {
  GeometryConfig geometry;
  RadarConfig radar;
  GridConfig grid;
  SceneConfig scene;
  int scenario = 1;
  SamplingConfig sampling;
  CountsConfig counts;
  std::array<double, 3> split = {0.7, 0.1, 0.2};
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ClassificationThresholds thresholds;
  int workers = 1;
  /// Label standardization constants to use instead of dataset statistics.
  std::optional<std::vector<double>> label_mean;
  std::optional<std::vector<double>> label_std;

  /// Checks every field against the preconditions of the modules it feeds.
  void validate() const;

  Trajectory trajectory() const;
  RadarParams base_radar() const;
  ImageGrid grid_at(const Vec3& center) const;
};

/// Parses a config object. "scenario" and "seed" are required; every other
/// field falls back to its default. Unknown keys, wrong types and missing
/// required fields throw ValidationError naming the field.
RunConfig parse_config(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace sarnav
