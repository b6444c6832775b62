#pragma once

// On-disk formats: trajectories, complex images, magnitude CSVs and raw
// little-endian float32 tensors.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sarnav/nav_dynamics.hpp"
#include "sarnav/sar_sim.hpp"

namespace sarnav {

/// One JSON header line {"count", "dt", "nu_n"}, then `count` rows of
/// (t, p_n[3], v_n[3], q_bn[4] scalar-first) as little-endian float64.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// Short hash identifying the radar parameters an image was formed with.
std::string radar_params_hash(const RadarParams& params);

/// One JSON header line {"n_at", "n_ct", "center", "at_spacing",
/// "ct_spacing", "params_hash"}, then n_at*n_ct row-major (re, im) pairs as
/// little-endian float32.
void write_sar_image(const std::filesystem::path& path, const SarImage& img,
                     const RadarParams& params);

struct StoredImage {
  SarImage image;
  std::string params_hash;
};
StoredImage read_sar_image(const std::filesystem::path& path);

/// Magnitude image as CSV, one along-track row per line.
void write_magnitude_csv(const std::filesystem::path& path, const SarImage& img);

void write_f32_le(std::ostream& out, std::span<const float> values);
std::vector<float> read_f32_le(const std::filesystem::path& path);

}  // namespace sarnav
