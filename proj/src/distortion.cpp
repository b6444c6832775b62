#include "sarnav/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sarnav/errors.hpp"

namespace sarnav {

namespace {

std::vector<double> zero_mean(std::span<const double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [mean](double v) { return v - mean; });
  return out;
}

double sum_squares(const std::vector<double>& x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

int signed_lag(std::size_t lag, std::size_t n) {
  const auto l = static_cast<int>(lag);
  const auto half = static_cast<int>(n / 2);
  return l < half ? l : l - static_cast<int>(n);
}

// Vertex offset of the parabola through (-1, lo), (0, mid), (+1, hi).
double quadratic_offset(double lo, double mid, double hi) {
  const double denom = lo - 2.0 * mid + hi;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
}

bool is_attitude(ErrorAxis axis) { return static_cast<int>(axis) >= 6; }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double& intercept) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (!(sxx > 0.0)) throw ValidationError("calibration needs at least two distinct magnitudes");
  const double slope = sxy / sxx;
  intercept = my - slope * mx;
  return slope;
}

}  // namespace

std::vector<double> log_magnitude(const SarImage& img, double floor) {
  std::vector<double> out(img.pixels.size());
  std::transform(img.pixels.begin(), img.pixels.end(), out.begin(),
                 [floor](const Complex& c) { return std::log10(std::abs(c) + floor); });
  return out;
}

std::vector<double> smooth_circular(std::span<const double> image, std::size_t n_at,
                                    std::size_t n_ct, double sigma_px) {
  if (image.size() != n_at * n_ct) {
    throw ValidationError("smooth_circular: image does not match the stated grid");
  }
  std::vector<double> out(image.begin(), image.end());
  if (!(sigma_px > 0.0)) return out;
  const auto radius = static_cast<int>(std::ceil(3.0 * sigma_px));
  std::vector<double> kernel(2 * radius + 1);
  for (int d = -radius; d <= radius; ++d) {
    kernel[d + radius] = std::exp(-0.5 * d * d / (sigma_px * sigma_px));
  }
  const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel) k /= total;

  const auto wrap = [](int i, std::size_t n) {
    const auto m = static_cast<int>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
  };
  std::vector<double> tmp(out.size());
  for (std::size_t i = 0; i < n_at; ++i) {
    for (std::size_t j = 0; j < n_ct; ++j) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        acc += kernel[d + radius] * out[i * n_ct + wrap(static_cast<int>(j) + d, n_ct)];
      }
      tmp[i * n_ct + j] = acc;
    }
  }
  for (std::size_t i = 0; i < n_at; ++i) {
    for (std::size_t j = 0; j < n_ct; ++j) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        acc += kernel[d + radius] * tmp[wrap(static_cast<int>(i) + d, n_at) * n_ct + j];
      }
      out[i * n_ct + j] = acc;
    }
  }
  return out;
}

ShiftEstimate register_images(std::span<const double> ref, std::span<const double> img,
                              std::size_t n_at, std::size_t n_ct, double smoothing_px) {
  if (ref.size() != n_at * n_ct || img.size() != n_at * n_ct) {
    throw ValidationError("register_images: images do not match the stated grid");
  }
  const std::vector<double> a = zero_mean(smooth_circular(ref, n_at, n_ct, smoothing_px));
  const std::vector<double> b = zero_mean(smooth_circular(img, n_at, n_ct, smoothing_px));
  const double norm = std::sqrt(sum_squares(a) * sum_squares(b));
  if (!(norm > 0.0)) throw DegenerateImageError("register_images: constant image");

  // b with every row repeated twice so circular column lags are contiguous.
  std::vector<double> b2(n_at * 2 * n_ct);
  for (std::size_t i = 0; i < n_at; ++i) {
    std::copy_n(b.data() + i * n_ct, n_ct, b2.data() + i * 2 * n_ct);
    std::copy_n(b.data() + i * n_ct, n_ct, b2.data() + i * 2 * n_ct + n_ct);
  }

  // corr[u][v] = sum_ij a(i, j) * b(i + u, j + v), indices modulo the grid.
  std::vector<double> corr(n_at * n_ct, 0.0);
  for (std::size_t u = 0; u < n_at; ++u) {
    double* out = corr.data() + u * n_ct;
    for (std::size_t i = 0; i < n_at; ++i) {
      const double* arow = a.data() + i * n_ct;
      const double* brow = b2.data() + ((i + u) % n_at) * 2 * n_ct;
      for (std::size_t v = 0; v < n_ct; ++v) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_ct; ++j) s += arow[j] * brow[j + v];
        out[v] += s;
      }
    }
  }

  const auto best = static_cast<std::size_t>(
      std::distance(corr.begin(), std::max_element(corr.begin(), corr.end())));
  const std::size_t pu = best / n_ct;
  const std::size_t pv = best % n_ct;
  auto c = [&](std::size_t u, std::size_t v) { return corr[(u % n_at) * n_ct + (v % n_ct)]; };

  ShiftEstimate est;
  est.at_integer = signed_lag(pu, n_at);
  est.ct_integer = signed_lag(pv, n_ct);
  est.peak_correlation = corr[best] / norm;
  const double mid = c(pu, pv);
  const double du = n_at >= 3 ? quadratic_offset(c(pu + n_at - 1, pv), mid, c(pu + 1, pv)) : 0.0;
  const double dv = n_ct >= 3 ? quadratic_offset(c(pu, pv + n_ct - 1), mid, c(pu, pv + 1)) : 0.0;
  est.at_shift = est.at_integer + du;
  est.ct_shift = est.ct_integer + dv;
  return est;
}

ShiftEstimate measure_shift(const SarImage& ref, const SarImage& img) {
  if (ref.grid.n_at != img.grid.n_at || ref.grid.n_ct != img.grid.n_ct) {
    throw ValidationError("measure_shift: images do not share a grid");
  }
  const ShiftEstimate est = register_images(ref.magnitude(), img.magnitude(), ref.grid.n_at,
                                           ref.grid.n_ct, kRegistrationSmoothingPx);
  if (est.peak_correlation < kMinPeakCorrelation) {
    std::ostringstream msg;
    msg << "no reliable registration: peak correlation " << est.peak_correlation << " < "
        << kMinPeakCorrelation;
    throw RegistrationError(msg.str());
  }
  return est;
}

double sharpness(std::span<const double> magnitude) {
  double s2 = 0.0;
  double s4 = 0.0;
  for (const double m : magnitude) {
    const double m2 = m * m;
    s2 += m2;
    s4 += m2 * m2;
  }
  if (!(s2 > 0.0)) throw DegenerateImageError("sharpness: zero-energy image");
  return s4 / (s2 * s2);
}

double measure_blur(const SarImage& ref, const SarImage& img) {
  return sharpness(img.magnitude()) / sharpness(ref.magnitude());
}

DistortionMeasurement measure_distortion(const SarImage& ref, const SarImage& img) {
  const ShiftEstimate shift = measure_shift(ref, img);
  DistortionMeasurement m;
  m.at_shift = shift.at_shift;
  m.ct_shift = shift.ct_shift;
  m.peak_correlation = shift.peak_correlation;
  m.sharpness_ratio = measure_blur(ref, img);
  return m;
}

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::kAlongTrack:
      return "AT";
    case Direction::kCrossTrack:
      return "CT";
    case Direction::kNone:
      break;
  }
  return "NONE";
}

std::string Classification::label() const {
  std::string out;
  if (shift != Direction::kNone) out = "SHIFT_" + direction_name(shift);
  if (blur != Direction::kNone) {
    if (!out.empty()) out += "+";
    out += "BLUR_" + direction_name(blur);
  }
  return out.empty() ? "NONE" : out;
}

Classification classify(const DistortionMeasurement& m, const ClassificationThresholds& th) {
  Classification c;
  const double at = std::abs(m.at_shift);
  const double ct = std::abs(m.ct_shift);
  if (std::max(at, ct) > th.shift_px) {
    c.shift = at >= ct ? Direction::kAlongTrack : Direction::kCrossTrack;
  }
  if (m.sharpness_ratio < th.blur_ratio) c.blur = Direction::kAlongTrack;
  return c;
}

Classification expected_classification(ErrorAxis axis) {
  using enum Direction;
  switch (axis) {
    case ErrorAxis::kAtPosition:
      return {kAlongTrack, kNone};
    case ErrorAxis::kCtPosition:
    case ErrorAxis::kDownPosition:
      return {kCrossTrack, kNone};
    case ErrorAxis::kAtVelocity:
      return {kNone, kAlongTrack};
    case ErrorAxis::kCtVelocity:
    case ErrorAxis::kDownVelocity:
      return {kAlongTrack, kNone};
    case ErrorAxis::kAtAttitude:
    case ErrorAxis::kCtAttitude:
    case ErrorAxis::kDownAttitude:
      return {kNone, kAlongTrack};
  }
  return {};
}

TargetScene sensitivity_scene(const Vec3& center) {
  static constexpr double kLayout[5][3] = {
      {0.0, 0.0, 1.0}, {1.5, -1.0, 0.7}, {-2.0, 0.8, 0.8}, {0.6, 2.0, 0.5}, {-1.0, -2.0, 0.9}};
  TargetScene scene;
  for (const auto& p : kLayout) {
    scene.targets.push_back({Vec3(center.x() + p[0], center.y() + p[1], 0.0), p[2]});
  }
  return scene;
}

std::vector<SweepRow> sensitivity_sweep(const SweepSetup& setup, ErrorAxis axis,
                                        std::span<const double> magnitudes) {
  SimulationOptions sim;
  sim.workers = setup.workers;
  const PhaseHistory ph = simulate_phase_history(setup.truth, setup.scene, setup.params, sim);
  const SarImage reference = backproject(ph, setup.truth, setup.grid, setup.params, setup.workers);
  const double t_ref = setup.truth.mid_time();

  std::vector<SweepRow> rows(magnitudes.size());
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    NavError err;
    err.set_component(axis, magnitudes[k]);
    err.validate();
    const Trajectory est = corrupt_trajectory(setup.truth, err, t_ref);
    const SarImage distorted = backproject(ph, est, setup.grid, setup.params, setup.workers);
    SweepRow& row = rows[k];
    row.axis = axis;
    row.magnitude = magnitudes[k];
    row.measurement = measure_distortion(reference, distorted);
    row.classification = classify(row.measurement, setup.thresholds);
  }
  return rows;
}

std::vector<double> default_sweep_magnitudes(ErrorAxis axis) {
  switch (axis) {
    case ErrorAxis::kAtPosition:
    case ErrorAxis::kCtPosition:
    case ErrorAxis::kDownPosition:
      return {-3.0, -1.5, 0.0, 1.5, 3.0};
    case ErrorAxis::kAtVelocity:
      return {-0.4, -0.2, 0.0, 0.2, 0.4};
    case ErrorAxis::kCtVelocity:
      return {-0.04, -0.02, 0.0, 0.02, 0.04};
    case ErrorAxis::kDownVelocity:
      return {-0.1, -0.05, 0.0, 0.05, 0.1};
    case ErrorAxis::kAtAttitude:
    case ErrorAxis::kCtAttitude:
    case ErrorAxis::kDownAttitude:
      // Navigation-grade (~10 arcsec). Roll errors of even 1e-3 rad put enough
      // gravity into the cross-track error to defocus the image completely.
      return {-5e-5, 0.0, 5e-5};
  }
  return {};
}

bool matches_sensitivity_table(ErrorAxis axis, std::span<const SweepRow> rows) {
  const Classification expected = expected_classification(axis);
  for (const SweepRow& row : rows) {
    if (row.magnitude == 0.0) {
      if (row.classification != Classification{}) return false;
      continue;
    }
    if (is_attitude(axis)) {
      const double r = row.measurement.sharpness_ratio;
      if (row.classification.shift != Direction::kNone) return false;
      if (r < kSmallBlurBand.lower || r > kSmallBlurBand.upper) return false;
      continue;
    }
    if (row.classification != expected) return false;
  }
  return true;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out.precision(9);
  out << "error_axis,magnitude,at_shift_px,ct_shift_px,sharpness_ratio,classification\n";
  for (const SweepRow& row : rows) {
    out << axis_name(row.axis) << ',' << row.magnitude << ',' << row.measurement.at_shift << ','
        << row.measurement.ct_shift << ',' << row.measurement.sharpness_ratio << ','
        << row.classification.label() << '\n';
  }
  return out.str();
}

ShiftCalibration calibrate_position_shift(const SweepSetup& setup,
                                          std::span<const double> magnitudes) {
  const std::vector<double> mags(magnitudes.begin(), magnitudes.end());
  const std::vector<SweepRow> at_rows = sensitivity_sweep(setup, ErrorAxis::kAtPosition, mags);
  const std::vector<SweepRow> ct_rows = sensitivity_sweep(setup, ErrorAxis::kCtPosition, mags);
  std::vector<double> at_shift;
  std::vector<double> ct_shift;
  for (const SweepRow& r : at_rows) at_shift.push_back(r.measurement.at_shift);
  for (const SweepRow& r : ct_rows) ct_shift.push_back(r.measurement.ct_shift);
  ShiftCalibration calib;
  calib.at_slope = fit_slope(mags, at_shift, calib.at_intercept);
  calib.ct_slope = fit_slope(mags, ct_shift, calib.ct_intercept);
  return calib;
}

PositionEstimate invert_shift(const ShiftEstimate& shift, const ShiftCalibration& calib) {
  if (calib.at_slope == 0.0 || calib.ct_slope == 0.0) {
    throw ValidationError("shift calibration has a zero slope");
  }
  return {(shift.at_shift - calib.at_intercept) / calib.at_slope,
          (shift.ct_shift - calib.ct_intercept) / calib.ct_slope};
}

PositionEstimate baseline_estimate_scenario1(const SarImage& ref, const SarImage& img,
                                             const ShiftCalibration& calib) {
  return invert_shift(measure_shift(ref, img), calib);
}

PositionEstimate baseline_estimate_from_channels(std::span<const double> z_ref,
                                                 std::span<const double> z_dist, std::size_t n_at,
                                                 std::size_t n_ct, const ShiftCalibration& calib) {
  return invert_shift(register_images(z_ref, z_dist, n_at, n_ct), calib);
}

}  // namespace sarnav
