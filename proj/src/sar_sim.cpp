#include "sarnav/sar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sarnav/errors.hpp"
#include "sarnav/parallel.hpp"

namespace sarnav {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> antenna_positions(const Trajectory& traj) {
  std::vector<Vec3> out;
  out.reserve(traj.size());
  for (const NavState& s : traj.samples) out.push_back(s.p_n);
  return out;
}

}  // namespace

void RadarParams::validate() const {
  if (!(carrier_wavelength > 0.0) || !(range_resolution > 0.0) || !(range_bin_spacing > 0.0) ||
      !(range_window_start > 0.0) || n_range_bins == 0) {
    throw ValidationError("radar parameters must all be positive");
  }
  if (range_bin_spacing > range_resolution / 2.0 + 1e-15) {
    throw ValidationError("range_bin_spacing must not exceed range_resolution / 2");
  }
}

void TargetScene::validate() const {
  if (targets.empty()) throw ValidationError("target scene has no targets");
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const PointTarget& tgt = targets[k];
    if (!tgt.position.allFinite() || !std::isfinite(tgt.reflectivity)) {
      throw ValidationError("target " + std::to_string(k) + " is not finite");
    }
    if (tgt.position.z() != 0.0) {
      throw ValidationError("target " + std::to_string(k) + " is not on the ground plane");
    }
    if (tgt.reflectivity < 0.0) {
      throw ValidationError("target " + std::to_string(k) + " has negative reflectivity");
    }
  }
}

Vec3 ImageGrid::pixel_position(std::size_t i, std::size_t j) const {
  const double di = static_cast<double>(i) - 0.5 * static_cast<double>(n_at - 1);
  const double dj = static_cast<double>(j) - 0.5 * static_cast<double>(n_ct - 1);
  return Vec3(center.x() + di * at_spacing, center.y() + dj * ct_spacing, center.z());
}

void ImageGrid::validate() const {
  if (n_at == 0 || n_ct == 0) throw ValidationError("image grid must have at least one pixel");
  if (!(at_spacing > 0.0) || !(ct_spacing > 0.0)) {
    throw ValidationError("image grid spacings must be positive");
  }
  if (!center.allFinite()) throw ValidationError("image grid center is not finite");
}

std::vector<double> SarImage::magnitude() const {
  std::vector<double> out(pixels.size());
  std::transform(pixels.begin(), pixels.end(), out.begin(),
                 [](const Complex& c) { return std::abs(c); });
  return out;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

RadarParams fit_range_window(RadarParams base, const Trajectory& traj, const ImageGrid& grid,
                             double margin) {
  traj.validate();
  grid.validate();
  const Vec3 lo = grid.pixel_position(0, 0);
  const Vec3 hi = grid.pixel_position(grid.n_at - 1, grid.n_ct - 1);
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  for (const NavState& s : traj.samples) {
    const Vec3& a = s.p_n;
    const Vec3 nearest(std::clamp(a.x(), lo.x(), hi.x()), std::clamp(a.y(), lo.y(), hi.y()),
                       grid.center.z());
    r_min = std::min(r_min, (a - nearest).norm());
    for (const double x : {lo.x(), hi.x()}) {
      for (const double y : {lo.y(), hi.y()}) {
        r_max = std::max(r_max, (a - Vec3(x, y, grid.center.z())).norm());
      }
    }
  }
  base.range_window_start = std::max(r_min - margin, base.range_bin_spacing);
  const double span = (r_max + margin) - base.range_window_start;
  base.n_range_bins = static_cast<std::size_t>(std::ceil(span / base.range_bin_spacing)) + 1;
  return base;
}

PhaseHistory simulate_phase_history(const Trajectory& traj, const TargetScene& scene,
                                    const RadarParams& params, const SimulationOptions& options) {
  traj.validate();
  scene.validate();
  params.validate();

  PhaseHistory ph;
  ph.n_pulses = traj.size();
  ph.n_bins = params.n_range_bins;
  ph.pulses.assign(ph.n_pulses * ph.n_bins, Complex(0.0, 0.0));
  ph.epochs.reserve(traj.size());
  for (const NavState& s : traj.samples) ph.epochs.push_back(s.t);

  const double k4pi = 4.0 * kPi / params.carrier_wavelength;
  const double window_end = params.range_window_end();

  // Window check up front so the error names the first offending pulse.
  for (std::size_t p = 0; p < ph.n_pulses; ++p) {
    for (std::size_t k = 0; k < scene.targets.size(); ++k) {
      const double r = (scene.targets[k].position - traj.samples[p].p_n).norm();
      if (r < params.range_window_start || r > window_end) {
        std::ostringstream msg;
        msg << "target " << k << " at range " << r << " m is outside the range window ["
            << params.range_window_start << ", " << window_end << "] m at pulse " << p;
        throw RangeWindowError(msg.str());
      }
    }
  }

  parallel_for(ph.n_pulses, options.workers, [&](std::size_t p) {
    const Vec3& antenna = traj.samples[p].p_n;
    Complex* row = ph.pulses.data() + p * ph.n_bins;
    for (const PointTarget& tgt : scene.targets) {
      if (tgt.reflectivity == 0.0) continue;
      const double r = (tgt.position - antenna).norm();
      const Complex carrier = std::polar(tgt.reflectivity, -k4pi * r);
      for (std::size_t b = 0; b < ph.n_bins; ++b) {
        row[b] += carrier * sinc((params.bin_range(b) - r) / params.range_resolution);
      }
    }
    if (options.noise_std > 0.0) {
      std::seed_seq seq{options.noise_seed, static_cast<std::uint64_t>(p)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> noise(0.0, options.noise_std);
      for (std::size_t b = 0; b < ph.n_bins; ++b) {
        const double re = noise(rng);
        const double im = noise(rng);
        row[b] += Complex(re, im);
      }
    }
  });
  return ph;
}

SarImage backproject(const PhaseHistory& ph, const Trajectory& traj, const ImageGrid& grid,
                     const RadarParams& params, int workers) {
  grid.validate();
  params.validate();
  if (traj.size() != ph.n_pulses) {
    std::ostringstream msg;
    msg << "backproject: trajectory has " << traj.size() << " samples but phase history has "
        << ph.n_pulses << " pulses";
    throw ValidationError(msg.str());
  }
  if (ph.n_bins != params.n_range_bins) {
    throw ValidationError("backproject: phase history bin count does not match radar params");
  }

  const std::vector<Vec3> antennas = antenna_positions(traj);
  const double k4pi = 4.0 * kPi / params.carrier_wavelength;
  const double inv_spacing = 1.0 / params.range_bin_spacing;
  const double last_bin = static_cast<double>(ph.n_bins - 1);

  SarImage img;
  img.grid = grid;
  img.pixels.assign(grid.size(), Complex(0.0, 0.0));

  // One work item per along-track row; within a row every pixel accumulates
  // pulses in ascending order.
  parallel_for(grid.n_at, workers, [&](std::size_t i) {
    std::vector<Vec3> positions(grid.n_ct);
    for (std::size_t j = 0; j < grid.n_ct; ++j) positions[j] = grid.pixel_position(i, j);
    Complex* out = img.pixels.data() + i * grid.n_ct;
    for (std::size_t p = 0; p < ph.n_pulses; ++p) {
      const Vec3& a = antennas[p];
      const Complex* pulse = ph.pulses.data() + p * ph.n_bins;
      for (std::size_t j = 0; j < grid.n_ct; ++j) {
        const double r = (positions[j] - a).norm();
        const double bin = (r - params.range_window_start) * inv_spacing;
        if (!(bin >= 0.0) || bin > last_bin) continue;
        const auto b0 = static_cast<std::size_t>(bin);
        const double w = bin - static_cast<double>(b0);
        Complex sample = pulse[b0];
        if (w > 0.0) sample = (1.0 - w) * sample + w * pulse[b0 + 1];
        const double phase = k4pi * r;
        out[j] += sample * Complex(std::cos(phase), std::sin(phase));
      }
    }
  });
  return img;
}

ImagePair form_image_pair(const Trajectory& truth, const NavError& err0, double reference_time,
                          const TargetScene& scene, const ImageGrid& grid,
                          const RadarParams& params, const SimulationOptions& options) {
  err0.validate();
  const PhaseHistory ph = simulate_phase_history(truth, scene, params, options);
  ImagePair pair;
  pair.reference = backproject(ph, truth, grid, params, options.workers);
  const Trajectory est = corrupt_trajectory(truth, err0, reference_time);
  pair.distorted = backproject(ph, est, grid, params, options.workers);
  return pair;
}

ImagePair form_image_pair(const Trajectory& truth, const NavError& err0, const TargetScene& scene,
                          const ImageGrid& grid, const RadarParams& params,
                          const SimulationOptions& options) {
  truth.validate();
  return form_image_pair(truth, err0, truth.mid_time(), scene, grid, params, options);
}

}  // namespace sarnav
