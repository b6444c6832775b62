#pragma once

// Scenario-constrained error sampling, image preprocessing, label
// standardization, target-wise splits and the on-disk dataset contract.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarnav/config.hpp"
#include "sarnav/distortion.hpp"
#include "sarnav/nav_dynamics.hpp"
#include "sarnav/sar_sim.hpp"

namespace sarnav {

inline constexpr int kDatasetFormatVersion = 1;

/// Floor on the standard deviation used when re-standardizing the difference
/// channel. An identity pair has a constant (zero) difference image.
inline constexpr double kDifferenceMinStd = 1e-6;

struct Scenario {
  int id = 1;
  /// Active components in label order: AT, CT, D position then AT, CT, D velocity.
  std::vector<ErrorAxis> active;

  /// Throws ValidationError for ids outside 1..6.
  static Scenario from_id(int id);

  std::size_t label_width() const { return active.size(); }
  std::vector<std::string> label_names() const;
  /// Active components of `err`, in label order.
  std::vector<double> labels_of(const NavError& err) const;
};

struct ErrorScales {
  double position_std = 1.5;  // m
  double velocity_std = 0.2;  // m/s

  double std_for(ErrorAxis axis) const;
};

/// Active components drawn i.i.d. zero-mean Gaussian, everything else exactly
/// zero. Deterministic in `seed`.
NavError sample_errors(const Scenario& scenario, std::uint64_t seed, const ErrorScales& scales);

/// Z = (L - mean(L)) / std(L) with L = log10(pixel + floor), population std.
/// Throws ValidationError for non-finite pixels or pixel + floor <= 0, and
/// DegenerateImageError when L is constant.
std::vector<double> preprocess_image(std::span<const double> magnitude,
                                     double floor = kMagnitudeFloor);

/// (z_dist - z_ref) re-standardized with std floored at kDifferenceMinStd.
std::vector<double> difference_channel(std::span<const double> z_dist,
                                       std::span<const double> z_ref);

/// Network input for one pair: channels (distorted, reference, difference),
/// each n_at x n_ct, concatenated.
std::vector<double> make_input_channels(std::span<const double> z_dist,
                                        std::span<const double> z_ref);

struct LabelSet {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;  // n x m, row-major
  std::vector<double> mean;
  std::vector<double> std_dev;
};

/// Per-component standardization over the whole set, population std.
/// Throws ValidationError for fewer than two samples or a constant component.
LabelSet standardize_labels(std::span<const NavError> errors, const Scenario& scenario);

/// Standardizes with externally supplied constants (e.g. a filter covariance).
LabelSet standardize_labels(std::span<const NavError> errors, const Scenario& scenario,
                            std::span<const double> mean, std::span<const double> std_dev);

/// Split sizes for n targets: round(r0 n), round(r1 n), remainder.
std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios);

struct TargetSplit {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

/// Seeded shuffle of the ids, cut by split_sizes. Each part is returned sorted.
/// Throws ValidationError for fewer than three targets, duplicate ids, or
/// ratios that are negative or do not sum to one.
TargetSplit split_by_target(std::span<const int> target_ids, const std::array<double, 3>& ratios,
                            std::uint64_t seed);

struct MseResult {
  std::vector<double> per_component;
  double average = 0.0;
};

/// Mean squared error of n x m row-major arrays.
MseResult mse_metric(std::span<const double> s_true, std::span<const double> s_hat,
                     std::size_t m);

struct TargetSpec {
  int id = 0;
  TargetScene scene;
  ImageGrid grid;
};

/// Scene and image grid for one target location, deterministic in
/// (cfg.seed, id).
TargetSpec make_target(const RunConfig& cfg, int id);

struct SplitInfo {
  std::string name;
  std::vector<int> targets;
  std::size_t count = 0;
  std::string inputs_file;
  std::string labels_file;
};

struct DatasetManifest {
  int format_version = kDatasetFormatVersion;
  int scenario = 1;
  std::vector<std::string> label_names;
  double aperture_s = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_at = 0;
  std::size_t n_ct = 0;
  std::vector<double> label_mean;
  std::vector<double> label_std;
  std::array<SplitInfo, 3> splits;  // train, val, test
  nlohmann::json config;

  std::size_t label_width() const { return label_names.size(); }
  const SplitInfo& split(const std::string& name) const;

  nlohmann::json to_json() const;
  /// Throws ValidationError on a malformed manifest or unsupported version.
  static DatasetManifest from_json(const nlohmann::json& j);
  static DatasetManifest load(const std::filesystem::path& dir);
};

struct SampleRecord {
  int target_id = 0;
  int pair_index = 0;
  std::string split;
  NavError raw_error;
};

struct BuildResult {
  DatasetManifest manifest;
  std::vector<SampleRecord> samples;  // in storage order: train, val, test
  LabelSet labels;                    // same order as samples
  std::vector<std::filesystem::path> files;
};

/// Renders every (target, pair) sample and writes manifest.json plus
/// {train,val,test}_{inputs,labels}.f32 into out_dir. Output bytes do not
/// depend on `workers`. Any failure names the offending sample and leaves no
/// partial tensor files behind.
BuildResult build_dataset(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          int workers = 1);

struct SplitTensors {
  std::size_t n = 0;
  std::vector<float> inputs;  // n x 3 x n_at x n_ct
  std::vector<float> labels;  // n x m
};

/// Reads one split back, checking file sizes against the manifest counts.
SplitTensors load_split(const std::filesystem::path& dir, const DatasetManifest& manifest,
                        const std::string& split);

}  // namespace sarnav
