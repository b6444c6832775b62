#pragma once

// Shift and blur measurement between reference and distorted SAR images,
// the empirical sensitivity sweep, and a shift-inversion baseline estimator.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sarnav/nav_dynamics.hpp"
#include "sarnav/sar_sim.hpp"

namespace sarnav {

/// Noise floor added to magnitudes before log10.
inline constexpr double kMagnitudeFloor = 1e-12;

/// Registrations whose correlation peak falls below this are rejected.
inline constexpr double kMinPeakCorrelation = 0.2;

/// Gaussian smoothing (pixels) applied to magnitude images before
/// measure_shift correlates them. Wide enough to merge the split response of
/// a strongly defocused target, so blur alone does not register as a shift.
inline constexpr double kRegistrationSmoothingPx = 4.0;

struct ShiftEstimate {
  double at_shift = 0.0;  // pixels, img content displaced by +at_shift rows
  double ct_shift = 0.0;  // pixels, img content displaced by +ct_shift columns
  int at_integer = 0;
  int ct_integer = 0;
  double peak_correlation = 0.0;
};

struct DistortionMeasurement {
  double at_shift = 0.0;
  double ct_shift = 0.0;
  double sharpness_ratio = 1.0;
  double peak_correlation = 1.0;
};

/// log10(|pixel| + floor) for every pixel.
std::vector<double> log_magnitude(const SarImage& img, double floor = kMagnitudeFloor);

/// Circular Gaussian smoothing of an n_at x n_ct image; sigma in pixels.
std::vector<double> smooth_circular(std::span<const double> image, std::size_t n_at,
                                    std::size_t n_ct, double sigma_px);

/// Circular normalized cross-correlation of two n_at x n_ct images (each
/// optionally smoothed, then made zero-mean), peak refined by a separable
/// quadratic fit on the 3x3 neighbourhood. Does not reject weak peaks.
/// The result is invariant to per-image affine intensity changes, so
/// standardized images register the same way as their raw counterparts.
ShiftEstimate register_images(std::span<const double> ref, std::span<const double> img,
                              std::size_t n_at, std::size_t n_ct, double smoothing_px = 0.0);

/// Registers the smoothed magnitude images. Throws RegistrationError when the
/// correlation peak is below kMinPeakCorrelation.
ShiftEstimate measure_shift(const SarImage& ref, const SarImage& img);

/// Normalized fourth-power sharpness sum |I|^4 / (sum |I|^2)^2 of a magnitude
/// image. Throws DegenerateImageError for a zero-energy image.
double sharpness(std::span<const double> magnitude);

/// sharpness(img) / sharpness(ref).
double measure_blur(const SarImage& ref, const SarImage& img);

DistortionMeasurement measure_distortion(const SarImage& ref, const SarImage& img);

struct ClassificationThresholds {
  double shift_px = 0.5;
  double blur_ratio = 0.95;
};

enum class Direction { kNone, kAlongTrack, kCrossTrack };

std::string direction_name(Direction d);

/// Shift and blur directions attributed to one measurement. A shift is
/// attributed to the dominant axis once it exceeds the threshold there.
struct Classification {
  Direction shift = Direction::kNone;
  Direction blur = Direction::kNone;

  /// "NONE", "SHIFT_AT", "SHIFT_CT", "BLUR_AT", or "SHIFT_xx+BLUR_AT".
  std::string label() const;
  bool operator==(const Classification&) const = default;
};

Classification classify(const DistortionMeasurement& m, const ClassificationThresholds& th);

/// Shift / blur directions listed for each error axis in the classical
/// sensitivity table. Attitude axes are listed as (None, AT) with a small
/// blur; see kSmallBlurBand.
Classification expected_classification(ErrorAxis axis);

/// Accepted sharpness-ratio band for the attitude rows' small along-track
/// blur, inclusive at both ends.
struct SmallBlurBand {
  double lower;
  double upper;
};
inline constexpr SmallBlurBand kSmallBlurBand{0.9, 1.0};

/// Five point reflectors within about 2.5 m of `center`, used by the
/// sensitivity sweeps and the shift calibration.
TargetScene sensitivity_scene(const Vec3& center);

struct SweepRow {
  ErrorAxis axis = ErrorAxis::kAtPosition;
  double magnitude = 0.0;
  DistortionMeasurement measurement;
  Classification classification;
};

struct SweepSetup {
  Trajectory truth;
  TargetScene scene;
  ImageGrid grid;
  RadarParams params;
  ClassificationThresholds thresholds;
  int workers = 1;
};

/// One row per magnitude: inject `magnitude` on `axis` (error referenced at
/// the aperture midpoint), render the image pair and measure it. The phase
/// history and reference image are shared across rows.
std::vector<SweepRow> sensitivity_sweep(const SweepSetup& setup, ErrorAxis axis,
                                        std::span<const double> magnitudes);

/// Default sweep magnitudes for an axis (metres, m/s or radians).
std::vector<double> default_sweep_magnitudes(ErrorAxis axis);

/// True when every non-zero row matches expected_classification(axis) (for
/// attitude axes: no shift and a sharpness ratio within kSmallBlurBand) and
/// every zero row classifies as NONE.
bool matches_sensitivity_table(ErrorAxis axis, std::span<const SweepRow> rows);

/// CSV with header
/// error_axis,magnitude,at_shift_px,ct_shift_px,sharpness_ratio,classification
std::string sweep_csv(std::span<const SweepRow> rows);

/// Affine map from injected horizontal position error (m) to measured pixel
/// shift: shift = slope * error + intercept, per axis.
struct ShiftCalibration {
  double at_slope = 0.0;
  double at_intercept = 0.0;
  double ct_slope = 0.0;
  double ct_intercept = 0.0;
};

/// Least-squares fit of the affine maps from sweeps over the AT and CT
/// position axes.
ShiftCalibration calibrate_position_shift(const SweepSetup& setup,
                                          std::span<const double> magnitudes);

struct PositionEstimate {
  double dp_at = 0.0;
  double dp_ct = 0.0;
};

/// Inverts a measured shift through the calibration.
PositionEstimate invert_shift(const ShiftEstimate& shift, const ShiftCalibration& calib);

/// Registers `img` against `ref` and inverts the shift into horizontal
/// position errors. Registration failures propagate as RegistrationError.
PositionEstimate baseline_estimate_scenario1(const SarImage& ref, const SarImage& img,
                                             const ShiftCalibration& calib);

/// Same estimate from stored, preprocessed channels (log magnitude, per-image
/// standardized). Registration is unsmoothed: the position errors a
/// scenario-1 pair carries only translate the scene.
PositionEstimate baseline_estimate_from_channels(std::span<const double> z_ref,
                                                 std::span<const double> z_dist, std::size_t n_at,
                                                 std::size_t n_ct, const ShiftCalibration& calib);

}  // namespace sarnav
