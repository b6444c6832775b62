#pragma once

// Point-target radar simulation and back-projection image formation.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sarnav/nav_dynamics.hpp"

namespace sarnav {

using Complex = std::complex<double>;

/// Range-compressed X-band radar description.
struct RadarParams {
  double carrier_wavelength = 0.03125;  // 9.6 GHz
  double range_resolution = 0.3;
  double range_bin_spacing = 0.15;
  std::size_t n_range_bins = 0;
  double range_window_start = 0.0;

  double bin_range(std::size_t bin) const {
    return range_window_start + static_cast<double>(bin) * range_bin_spacing;
  }
  double range_window_end() const { return bin_range(n_range_bins - 1); }

  void validate() const;
};

struct PointTarget {
  Vec3 position = Vec3::Zero();
  double reflectivity = 1.0;
};

struct TargetScene {
  std::vector<PointTarget> targets;

  void validate() const;
};

/// Image grid on the ground plane. Row index runs along-track, column index
/// cross-track; pixel (i, j) sits at
/// center + ((i - (n_at-1)/2) * at_spacing, (j - (n_ct-1)/2) * ct_spacing, 0).
struct ImageGrid {
  Vec3 center = Vec3::Zero();
  double at_spacing = 0.15;
  double ct_spacing = 0.15;
  std::size_t n_at = 80;
  std::size_t n_ct = 80;

  std::size_t size() const { return n_at * n_ct; }
  Vec3 pixel_position(std::size_t i, std::size_t j) const;
  void validate() const;
};

/// P x R range-compressed pulses, row-major by pulse.
struct PhaseHistory {
  std::size_t n_pulses = 0;
  std::size_t n_bins = 0;
  std::vector<Complex> pulses;
  std::vector<double> epochs;

  Complex& at(std::size_t p, std::size_t r) { return pulses[p * n_bins + r]; }
  const Complex& at(std::size_t p, std::size_t r) const { return pulses[p * n_bins + r]; }
  std::span<const Complex> row(std::size_t p) const {
    return {pulses.data() + p * n_bins, n_bins};
  }
};

struct SarImage {
  ImageGrid grid;
  std::vector<Complex> pixels;  // n_at x n_ct, row-major

  const Complex& at(std::size_t i, std::size_t j) const { return pixels[i * grid.n_ct + j]; }
  std::vector<double> magnitude() const;
};

struct SimulationOptions {
  /// Standard deviation of additive complex Gaussian noise per range bin
  /// (per real/imaginary part). Zero disables noise.
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
  int workers = 1;
};

/// Normalized sinc, sin(pi x) / (pi x), with sinc(0) = 1.
double sinc(double x);

/// Chooses range_window_start / n_range_bins so that every pixel of `grid`
/// is inside the window for every pulse of `traj`, padded by `margin` metres
/// on both ends.
RadarParams fit_range_window(RadarParams base, const Trajectory& traj, const ImageGrid& grid,
                             double margin = 50.0);

/// Bin r of pulse p holds
///   sum_k sigma_k * sinc((r_range - R_pk) / range_resolution) * exp(-j 4 pi R_pk / lambda).
/// Throws RangeWindowError if a target leaves the range window.
PhaseHistory simulate_phase_history(const Trajectory& traj, const TargetScene& scene,
                                    const RadarParams& params,
                                    const SimulationOptions& options = {});

/// Back-projects `ph` onto `grid` using antenna positions from `traj`.
/// Range samples are linearly interpolated; samples falling outside the
/// window contribute zero. Each pixel sums pulses in ascending order, so the
/// result does not depend on `workers`.
SarImage backproject(const PhaseHistory& ph, const Trajectory& traj, const ImageGrid& grid,
                     const RadarParams& params, int workers = 1);

struct ImagePair {
  SarImage reference;
  SarImage distorted;
};

/// Renders reference (true trajectory) and distorted (corrupted trajectory)
/// images from a single phase history simulated along the true trajectory.
/// err0 is referenced at `reference_time`.
ImagePair form_image_pair(const Trajectory& truth, const NavError& err0, double reference_time,
                          const TargetScene& scene, const ImageGrid& grid,
                          const RadarParams& params, const SimulationOptions& options = {});

/// As above with err0 referenced at the aperture midpoint.
ImagePair form_image_pair(const Trajectory& truth, const NavError& err0, const TargetScene& scene,
                          const ImageGrid& grid, const RadarParams& params,
                          const SimulationOptions& options = {});

}  // namespace sarnav
