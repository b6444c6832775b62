#include "sarnav/distortion.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "sarnav/errors.hpp"

namespace sarnav {
namespace {

constexpr std::size_t kN = 48;

// Circularly wrapped Gaussian blob centred at (ci, cj).
std::vector<double> blob(double ci, double cj, double sigma = 2.0) {
  std::vector<double> img(kN * kN);
  for (std::size_t i = 0; i < kN; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      double di = std::remainder(static_cast<double>(i) - ci, static_cast<double>(kN));
      double dj = std::remainder(static_cast<double>(j) - cj, static_cast<double>(kN));
      img[i * kN + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    }
  }
  return img;
}

SarImage as_image(const std::vector<double>& mag) {
  SarImage img;
  img.grid.n_at = kN;
  img.grid.n_ct = kN;
  for (double m : mag) img.pixels.emplace_back(m, 0.0);
  return img;
}

SweepSetup desk_setup(double aperture_s) {
  SweepSetup s;
  s.truth = generate_level_trajectory(50.0, 1000.0, aperture_s, 200.0);
  s.grid.center = Vec3(0.0, 4700.0, 0.0);
  s.scene = sensitivity_scene(s.grid.center);
  s.params = fit_range_window(RadarParams{}, s.truth, s.grid);
  return s;
}

TEST(Registration, IdentityHasUnitCorrelation) {
  const auto a = blob(20.0, 11.0);
  const ShiftEstimate e = register_images(a, a, kN, kN);
  EXPECT_EQ(e.at_integer, 0);
  EXPECT_EQ(e.ct_integer, 0);
  EXPECT_NEAR(e.at_shift, 0.0, 1e-12);
  EXPECT_NEAR(e.peak_correlation, 1.0, 1e-12);
}

TEST(Registration, IntegerShiftSigns) {
  const auto a = blob(20.0, 11.0);
  const auto b = blob(23.0, 6.0);
  const ShiftEstimate e = register_images(a, b, kN, kN);
  EXPECT_EQ(e.at_integer, 3);
  EXPECT_EQ(e.ct_integer, -5);
  EXPECT_NEAR(e.at_shift, 3.0, 1e-9);
  EXPECT_NEAR(e.ct_shift, -5.0, 1e-9);
}

TEST(Registration, WrapsAcrossTheBorder) {
  const auto a = blob(2.0, 45.0);
  const auto b = blob(44.0, 3.0);
  const ShiftEstimate e = register_images(a, b, kN, kN);
  EXPECT_EQ(e.at_integer, -6);
  EXPECT_EQ(e.ct_integer, 6);
}

TEST(Registration, SubpixelAccuracy) {
  const auto a = blob(20.0, 20.0);
  for (double d : {-0.4, -0.25, 0.1, 0.3, 0.45}) {
    const ShiftEstimate e = register_images(a, blob(20.0 + d, 20.0 - d), kN, kN);
    EXPECT_NEAR(e.at_shift, d, 0.1) << d;
    EXPECT_NEAR(e.ct_shift, -d, 0.1) << d;
  }
}

TEST(Registration, InvariantToAffineIntensity) {
  const auto a = blob(20.0, 11.0);
  auto b = blob(25.0, 13.0);
  const ShiftEstimate raw = register_images(a, b, kN, kN);
  for (double& v : b) v = 3.0 * v - 7.0;
  const ShiftEstimate scaled = register_images(a, b, kN, kN);
  EXPECT_NEAR(raw.at_shift, scaled.at_shift, 1e-9);
  EXPECT_NEAR(raw.ct_shift, scaled.ct_shift, 1e-9);
}

TEST(Registration, RejectsBadInput) {
  const auto a = blob(20.0, 11.0);
  EXPECT_THROW(register_images(a, std::vector<double>(kN * kN, 1.0), kN, kN),
               DegenerateImageError);
  EXPECT_THROW(register_images(a, std::vector<double>(10, 1.0), kN, kN), ValidationError);
}

TEST(Registration, WeakPeakIsRejected) {
  const auto a = blob(20.0, 11.0);
  std::vector<double> inverted(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) inverted[k] = 1.0 - 0.9 * a[k];
  EXPECT_THROW(measure_shift(as_image(a), as_image(inverted)), RegistrationError);
}

TEST(SmoothCircular, PreservesSumAndZeroSigmaIsIdentity) {
  const auto a = blob(3.0, 40.0, 1.0);
  const auto s = smooth_circular(a, kN, kN, 3.0);
  double sa = 0.0, ss = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    ss += s[k];
  }
  EXPECT_NEAR(sa, ss, 1e-9);
  EXPECT_EQ(smooth_circular(a, kN, kN, 0.0), a);
}

TEST(Sharpness, Oracles) {
  std::vector<double> delta(100, 0.0);
  delta[17] = 3.0;
  EXPECT_DOUBLE_EQ(sharpness(delta), 1.0);
  EXPECT_DOUBLE_EQ(sharpness(std::vector<double>(100, 2.5)), 0.01);
  // Two equal pixels: 2 m^4 / (2 m^2)^2 = 1/2.
  std::vector<double> two(10, 0.0);
  two[0] = two[5] = 1.0;
  EXPECT_DOUBLE_EQ(sharpness(two), 0.5);
  EXPECT_THROW(sharpness(std::vector<double>(10, 0.0)), DegenerateImageError);
}

TEST(Sharpness, SpreadingEnergyLowersIt) {
  EXPECT_GT(sharpness(blob(20.0, 20.0, 1.0)), sharpness(blob(20.0, 20.0, 2.0)));
}

TEST(Classification, ThresholdsAndLabels) {
  const ClassificationThresholds th;
  auto cls = [&](double at, double ct, double ratio) {
    return classify({at, ct, ratio, 1.0}, th).label();
  };
  EXPECT_EQ(cls(0.0, 0.0, 1.0), "NONE");
  EXPECT_EQ(cls(0.6, 0.1, 1.0), "SHIFT_AT");
  EXPECT_EQ(cls(-0.1, -3.0, 1.01), "SHIFT_CT");
  EXPECT_EQ(cls(0.3, 0.4, 0.9), "BLUR_AT");
  EXPECT_EQ(cls(0.2, 2.0, 0.5), "SHIFT_CT+BLUR_AT");
  // Both thresholds are strict.
  EXPECT_EQ(cls(0.5, 0.0, 0.95), "NONE");
  EXPECT_EQ(cls(1.2, 1.1, 1.0), "SHIFT_AT");
}

TEST(Classification, ExpectedTableRows) {
  using enum ErrorAxis;
  using D = Direction;
  EXPECT_EQ(expected_classification(kAtPosition), (Classification{D::kAlongTrack, D::kNone}));
  EXPECT_EQ(expected_classification(kCtPosition), (Classification{D::kCrossTrack, D::kNone}));
  EXPECT_EQ(expected_classification(kDownPosition), (Classification{D::kCrossTrack, D::kNone}));
  EXPECT_EQ(expected_classification(kAtVelocity), (Classification{D::kNone, D::kAlongTrack}));
  EXPECT_EQ(expected_classification(kCtVelocity), (Classification{D::kAlongTrack, D::kNone}));
  EXPECT_EQ(expected_classification(kDownVelocity), (Classification{D::kAlongTrack, D::kNone}));
  for (ErrorAxis a : {kAtAttitude, kCtAttitude, kDownAttitude}) {
    EXPECT_EQ(expected_classification(a), (Classification{D::kNone, D::kAlongTrack}));
  }
}

TEST(Classification, TableMatching) {
  auto row = [](ErrorAxis axis, double mag, double at, double ct, double ratio) {
    SweepRow r;
    r.axis = axis;
    r.magnitude = mag;
    r.measurement = {at, ct, ratio, 1.0};
    r.classification = classify(r.measurement, ClassificationThresholds{});
    return r;
  };
  using enum ErrorAxis;
  std::vector<SweepRow> good = {row(kCtPosition, 0.0, 0, 0, 1), row(kCtPosition, 1.5, 0, 10, 1)};
  EXPECT_TRUE(matches_sensitivity_table(kCtPosition, good));
  std::vector<SweepRow> wrong_axis = {row(kCtPosition, 1.5, 10, 0, 1)};
  EXPECT_FALSE(matches_sensitivity_table(kCtPosition, wrong_axis));
  std::vector<SweepRow> zero_shifted = {row(kCtPosition, 0.0, 0, 1, 1)};
  EXPECT_FALSE(matches_sensitivity_table(kCtPosition, zero_shifted));
  // Attitude rows: the small-blur band is inclusive at both ends.
  std::vector<SweepRow> att = {row(kDownAttitude, 1e-4, 0, 0, 1.0),
                               row(kDownAttitude, -1e-4, 0, 0, 0.9)};
  EXPECT_TRUE(matches_sensitivity_table(kDownAttitude, att));
  std::vector<SweepRow> att_heavy = {row(kAtAttitude, 1e-2, 0, 0, 0.3)};
  EXPECT_FALSE(matches_sensitivity_table(kAtAttitude, att_heavy));
}

TEST(SweepCsv, HeaderAndRow) {
  SweepRow r;
  r.axis = ErrorAxis::kAtVelocity;
  r.magnitude = 0.2;
  r.measurement = {0.1, -0.05, 0.25, 0.9};
  r.classification = classify(r.measurement, ClassificationThresholds{});
  const std::vector<SweepRow> rows{r};
  EXPECT_EQ(sweep_csv(rows),
            "error_axis,magnitude,at_shift_px,ct_shift_px,sharpness_ratio,classification\n"
            "at_vel,0.2,0.1,-0.05,0.25,BLUR_AT\n");
}

TEST(DefaultMagnitudes, IncludeZeroAndAreSymmetric) {
  for (ErrorAxis a : kAllErrorAxes) {
    const auto m = default_sweep_magnitudes(a);
    ASSERT_FALSE(m.empty());
    EXPECT_NE(std::find(m.begin(), m.end(), 0.0), m.end());
    for (double v : m) EXPECT_NE(std::find(m.begin(), m.end(), -v), m.end());
  }
  EXPECT_EQ(default_sweep_magnitudes(ErrorAxis::kCtPosition),
            (std::vector<double>{-3.0, -1.5, 0.0, 1.5, 3.0}));
  EXPECT_EQ(default_sweep_magnitudes(ErrorAxis::kAtVelocity),
            (std::vector<double>{-0.4, -0.2, 0.0, 0.2, 0.4}));
}

TEST(Sweep, CrossTrackPositionShiftsLinearly) {
  const SweepSetup setup = desk_setup(2.0);
  const std::vector<double> mags = {-3.0, -1.5, 0.0, 1.5, 3.0};
  const auto rows = sensitivity_sweep(setup, ErrorAxis::kCtPosition, mags);
  EXPECT_TRUE(matches_sensitivity_table(ErrorAxis::kCtPosition, rows));
  for (const SweepRow& r : rows) {
    // 0.15 m pixels: 1 m of error is 6.67 px, against the error's sign.
    EXPECT_NEAR(r.measurement.ct_shift, -r.magnitude / 0.15, 0.25) << r.magnitude;
    EXPECT_NEAR(r.measurement.at_shift, 0.0, 0.1);
    EXPECT_GE(r.measurement.sharpness_ratio, 0.95);
  }
}

TEST(Sweep, AlongTrackVelocityBlursWithoutShift) {
  const SweepSetup setup = desk_setup(5.0);
  const std::vector<double> mags = {0.0, 0.2, 0.4};
  const auto rows = sensitivity_sweep(setup, ErrorAxis::kAtVelocity, mags);
  EXPECT_TRUE(matches_sensitivity_table(ErrorAxis::kAtVelocity, rows));
  EXPECT_GT(rows[0].measurement.sharpness_ratio, rows[1].measurement.sharpness_ratio);
  EXPECT_GT(rows[1].measurement.sharpness_ratio, rows[2].measurement.sharpness_ratio);
  for (const SweepRow& r : rows) EXPECT_LT(std::abs(r.measurement.at_shift), 1.0);
}

// A 0.01 rad attitude error is far outside navigation grade. The roll and
// pitch components tilt gravity into the horizontal error, which over a 5 s
// aperture smears the image well past the small-blur band; heading errors do
// not couple at all in straight, level flight.
TEST(Sweep, CoarseAttitudeErrorsDefocusHeavily) {
  const SweepSetup setup = desk_setup(5.0);
  const std::vector<double> mags = {0.01};
  const auto at = sensitivity_sweep(setup, ErrorAxis::kAtAttitude, mags);
  EXPECT_LT(at[0].measurement.sharpness_ratio, 0.2);
  const auto d = sensitivity_sweep(setup, ErrorAxis::kDownAttitude, mags);
  EXPECT_EQ(d[0].measurement.sharpness_ratio, 1.0);
  EXPECT_EQ(d[0].classification.label(), "NONE");
}

TEST(Sweep, RejectsAttitudeOutsideSmallAngleRegime) {
  const SweepSetup setup = desk_setup(1.0);
  const std::vector<double> mags = {0.2};
  EXPECT_THROW(sensitivity_sweep(setup, ErrorAxis::kCtAttitude, mags), ValidationError);
}

TEST(Calibration, SlopeMatchesPixelSpacing) {
  const SweepSetup setup = desk_setup(2.0);
  const std::vector<double> mags = {-1.5, 0.0, 1.5};
  const ShiftCalibration c = calibrate_position_shift(setup, mags);
  EXPECT_NEAR(c.at_slope, -1.0 / 0.15, 0.1);
  EXPECT_NEAR(c.ct_slope, -1.0 / 0.15, 0.1);
  EXPECT_NEAR(c.at_intercept, 0.0, 0.1);

  ShiftEstimate s;
  s.at_shift = 2.0 * c.at_slope + c.at_intercept;
  s.ct_shift = -1.0 * c.ct_slope + c.ct_intercept;
  const PositionEstimate pe = invert_shift(s, c);
  EXPECT_NEAR(pe.dp_at, 2.0, 1e-12);
  EXPECT_NEAR(pe.dp_ct, -1.0, 1e-12);
  EXPECT_THROW(invert_shift(s, ShiftCalibration{}), ValidationError);
}

TEST(Baseline, RecoversHorizontalPositionError) {
  const SweepSetup setup = desk_setup(2.0);
  const std::vector<double> mags = {-1.5, 0.0, 1.5};
  const ShiftCalibration c = calibrate_position_shift(setup, mags);
  NavError e;
  e.dp_n = Vec3(0.8, -1.1, 0.0);
  const ImagePair pair = form_image_pair(setup.truth, e, setup.scene, setup.grid, setup.params);
  const PositionEstimate pe = baseline_estimate_scenario1(pair.reference, pair.distorted, c);
  EXPECT_NEAR(pe.dp_at, 0.8, 0.05);
  EXPECT_NEAR(pe.dp_ct, -1.1, 0.05);
}

TEST(Baseline, WorksOnStandardizedLogChannels) {
  const SweepSetup setup = desk_setup(2.0);
  const ShiftCalibration c{-1.0 / 0.15, 0.0, -1.0 / 0.15, 0.0};
  NavError e;
  e.dp_n = Vec3(-2.0, 0.5, 0.0);
  const ImagePair pair = form_image_pair(setup.truth, e, setup.scene, setup.grid, setup.params);
  const PositionEstimate pe = baseline_estimate_from_channels(
      log_magnitude(pair.reference), log_magnitude(pair.distorted), 80, 80, c);
  EXPECT_NEAR(pe.dp_at, -2.0, 0.1);
  EXPECT_NEAR(pe.dp_ct, 0.5, 0.1);
}

}  // namespace
}  // namespace sarnav
