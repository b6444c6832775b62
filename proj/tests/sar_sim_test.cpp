#include "sarnav/sar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sarnav/errors.hpp"

namespace sarnav {
namespace {

struct Scene {
  Trajectory truth = generate_level_trajectory(50.0, 1000.0, 1.0, 200.0);
  ImageGrid grid;
  RadarParams params;
  TargetScene scene;

  Scene() {
    grid.center = Vec3(0.0, 4700.0, 0.0);
    grid.n_at = 40;
    grid.n_ct = 40;
    params = fit_range_window(RadarParams{}, truth, grid);
    scene.targets = {{grid.center, 1.0}};
  }
};

double max_rel_diff(const SarImage& a, const SarImage& b) {
  double peak = 0.0;
  double diff = 0.0;
  for (std::size_t k = 0; k < a.pixels.size(); ++k) {
    peak = std::max(peak, std::abs(a.pixels[k]));
    diff = std::max(diff, std::abs(a.pixels[k] - b.pixels[k]));
  }
  return diff / peak;
}

TEST(Sinc, Values) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(1.0), 0.0, 1e-15);
  EXPECT_NEAR(sinc(0.5), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(sinc(-0.5), sinc(0.5), 1e-15);
}

TEST(RadarParamsTest, Validation) {
  RadarParams p;
  p.n_range_bins = 10;
  p.range_window_start = 100.0;
  EXPECT_NO_THROW(p.validate());
  p.range_bin_spacing = 0.2;
  EXPECT_THROW(p.validate(), ValidationError);
  p.range_bin_spacing = 0.15;
  p.carrier_wavelength = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(TargetSceneTest, Validation) {
  TargetScene s;
  EXPECT_THROW(s.validate(), ValidationError);
  s.targets = {{Vec3(0.0, 1.0, 0.5), 1.0}};
  EXPECT_THROW(s.validate(), ValidationError);
  s.targets = {{Vec3(0.0, 1.0, 0.0), -1.0}};
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(ImageGridTest, PixelLayout) {
  ImageGrid g;
  g.center = Vec3(1.0, 2.0, 0.0);
  g.n_at = 3;
  g.n_ct = 5;
  g.at_spacing = 0.5;
  g.ct_spacing = 0.25;
  EXPECT_EQ(g.pixel_position(1, 2), g.center);
  EXPECT_EQ(g.pixel_position(0, 0), Vec3(0.5, 1.5, 0.0));
  EXPECT_EQ(g.pixel_position(2, 4), Vec3(1.5, 2.5, 0.0));
}

TEST(PhaseHistoryTest, MatchesDirectEvaluation) {
  Scene s;
  s.scene.targets = {{s.grid.center + Vec3(0.7, -1.2, 0.0), 0.8}};
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  ASSERT_EQ(ph.n_pulses, s.truth.size());
  ASSERT_EQ(ph.n_bins, s.params.n_range_bins);
  for (std::size_t p : {std::size_t{0}, ph.n_pulses / 3, ph.n_pulses - 1}) {
    const double r = (s.scene.targets[0].position - s.truth.samples[p].p_n).norm();
    for (std::size_t b = 0; b < ph.n_bins; b += 97) {
      const double x = (s.params.range_window_start + b * s.params.range_bin_spacing - r) / 0.3;
      const double sincx = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const Complex expected =
          0.8 * sincx * std::exp(Complex(0.0, -4.0 * std::numbers::pi * r / 0.03125));
      ASSERT_NEAR(std::abs(ph.at(p, b) - expected), 0.0, 1e-12);
    }
  }
}

TEST(PhaseHistoryTest, PeakBinNearTargetRange) {
  Scene s;
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  const std::size_t p = ph.n_pulses / 2;
  std::size_t best = 0;
  for (std::size_t b = 1; b < ph.n_bins; ++b) {
    if (std::abs(ph.at(p, b)) > std::abs(ph.at(p, best))) best = b;
  }
  const double r = (s.scene.targets[0].position - s.truth.samples[p].p_n).norm();
  EXPECT_LE(std::abs(s.params.bin_range(best) - r), s.params.range_bin_spacing / 2 + 1e-9);
  EXPECT_GT(std::abs(ph.at(p, best)), 0.85);
  EXPECT_LE(std::abs(ph.at(p, best)), 1.0 + 1e-12);
}

TEST(PhaseHistoryTest, ZeroReflectivityContributesNothing) {
  Scene s;
  s.scene.targets = {{s.grid.center, 0.0}};
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  for (const Complex& c : ph.pulses) ASSERT_EQ(c, Complex(0.0, 0.0));
}

TEST(PhaseHistoryTest, Superposition) {
  Scene s;
  TargetScene a{{{s.grid.center + Vec3(1.0, 0.5, 0.0), 1.0}}};
  TargetScene b{{{s.grid.center + Vec3(-2.0, 1.5, 0.0), 0.6}}};
  TargetScene both{{a.targets[0], b.targets[0]}};
  const PhaseHistory pa = simulate_phase_history(s.truth, a, s.params);
  const PhaseHistory pb = simulate_phase_history(s.truth, b, s.params);
  const PhaseHistory pab = simulate_phase_history(s.truth, both, s.params);
  for (std::size_t k = 0; k < pab.pulses.size(); ++k) {
    ASSERT_LT(std::abs(pab.pulses[k] - (pa.pulses[k] + pb.pulses[k])), 1e-14);
  }
}

TEST(PhaseHistoryTest, TargetOutsideWindowNamesPulseAndTarget) {
  Scene s;
  s.scene.targets.push_back({s.grid.center + Vec3(0.0, 500.0, 0.0), 1.0});
  try {
    simulate_phase_history(s.truth, s.scene, s.params);
    FAIL() << "expected RangeWindowError";
  } catch (const RangeWindowError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("target 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("pulse 0"), std::string::npos) << msg;
  }
}

TEST(PhaseHistoryTest, NoiseIsSeededAndWorkerIndependent) {
  Scene s;
  SimulationOptions o1{0.1, 42, 1};
  SimulationOptions o3{0.1, 42, 3};
  SimulationOptions other{0.1, 43, 1};
  const PhaseHistory a = simulate_phase_history(s.truth, s.scene, s.params, o1);
  const PhaseHistory b = simulate_phase_history(s.truth, s.scene, s.params, o3);
  const PhaseHistory c = simulate_phase_history(s.truth, s.scene, s.params, other);
  EXPECT_EQ(a.pulses, b.pulses);
  EXPECT_NE(a.pulses, c.pulses);
}

TEST(Backprojection, PointTargetFocusesAtItsPixel) {
  Scene s;
  s.scene.targets = {{s.grid.pixel_position(13, 27), 1.0}};
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  const SarImage img = backproject(ph, s.truth, s.grid, s.params);
  std::vector<double> mag = img.magnitude();
  const auto peak = std::max_element(mag.begin(), mag.end()) - mag.begin();
  EXPECT_EQ(peak, 13 * 40 + 27);
  const double peak_value = mag[static_cast<std::size_t>(peak)];
  std::nth_element(mag.begin(), mag.begin() + mag.size() / 2, mag.end());
  EXPECT_GE(peak_value, 10.0 * mag[mag.size() / 2]);
}

TEST(Backprojection, ZeroHistoryGivesZeroImage) {
  Scene s;
  PhaseHistory ph;
  ph.n_pulses = s.truth.size();
  ph.n_bins = s.params.n_range_bins;
  ph.pulses.assign(ph.n_pulses * ph.n_bins, Complex(0.0, 0.0));
  const SarImage img = backproject(ph, s.truth, s.grid, s.params);
  for (const Complex& c : img.pixels) ASSERT_EQ(c, Complex(0.0, 0.0));
}

TEST(Backprojection, RejectsMismatchedTrajectory) {
  Scene s;
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  const Trajectory shorter = generate_level_trajectory(50.0, 1000.0, 0.5, 200.0);
  EXPECT_THROW(backproject(ph, shorter, s.grid, s.params), ValidationError);
}

TEST(Backprojection, OutOfWindowPixelsContributeZero) {
  Scene s;
  RadarParams narrow = s.params;
  narrow.n_range_bins = 10;
  PhaseHistory ph;
  ph.n_pulses = s.truth.size();
  ph.n_bins = narrow.n_range_bins;
  ph.pulses.assign(ph.n_pulses * ph.n_bins, Complex(1.0, 0.0));
  const SarImage img = backproject(ph, s.truth, s.grid, narrow);
  for (const Complex& c : img.pixels) ASSERT_EQ(c, Complex(0.0, 0.0));
}

TEST(Backprojection, Superposition) {
  Scene s;
  TargetScene a{{{s.grid.center + Vec3(1.0, 0.5, 0.0), 1.0}}};
  TargetScene b{{{s.grid.center + Vec3(-2.0, 1.5, 0.0), 0.6}}};
  TargetScene both{{a.targets[0], b.targets[0]}};
  auto image = [&](const TargetScene& sc) {
    return backproject(simulate_phase_history(s.truth, sc, s.params), s.truth, s.grid, s.params);
  };
  const SarImage ia = image(a);
  const SarImage ib = image(b);
  SarImage sum = ia;
  for (std::size_t k = 0; k < sum.pixels.size(); ++k) sum.pixels[k] += ib.pixels[k];
  EXPECT_LT(max_rel_diff(image(both), sum), 1e-6);
}

TEST(Backprojection, TranslationEquivariance) {
  Scene s;
  s.scene.targets = {{s.grid.center + Vec3(0.5, 0.3, 0.0), 1.0},
                     {s.grid.center + Vec3(-1.0, -1.6, 0.0), 0.7}};
  const SarImage base = backproject(simulate_phase_history(s.truth, s.scene, s.params), s.truth,
                                    s.grid, s.params);

  // Move targets, grid and flight line together by the same ground vector.
  const Vec3 shift(12.0, 0.0, 0.0);
  Scene moved;
  moved.grid.center += shift;
  for (NavState& st : moved.truth.samples) st.p_n += shift;
  moved.params = s.params;
  moved.scene = s.scene;
  for (PointTarget& t : moved.scene.targets) t.position += shift;
  const SarImage img = backproject(simulate_phase_history(moved.truth, moved.scene, moved.params),
                                   moved.truth, moved.grid, moved.params);
  EXPECT_LT(max_rel_diff(base, img), 1e-6);
}

TEST(Backprojection, WorkerCountDoesNotChangeBits) {
  Scene s;
  const PhaseHistory ph = simulate_phase_history(s.truth, s.scene, s.params);
  const SarImage one = backproject(ph, s.truth, s.grid, s.params, 1);
  for (int w : {2, 3, 8}) {
    EXPECT_EQ(backproject(ph, s.truth, s.grid, s.params, w).pixels, one.pixels) << w;
  }
}

TEST(ImagePairTest, ZeroErrorIsBitIdentical) {
  Scene s;
  const ImagePair pair = form_image_pair(s.truth, NavError{}, s.scene, s.grid, s.params);
  EXPECT_EQ(pair.reference.pixels, pair.distorted.pixels);
}

TEST(ImagePairTest, CrossTrackErrorMovesThePeak) {
  Scene s;
  NavError e;
  e.dp_n = Vec3(0.0, 1.5, 0.0);
  const ImagePair pair = form_image_pair(s.truth, e, s.scene, s.grid, s.params);
  auto argmax = [](const SarImage& img) {
    const auto m = img.magnitude();
    return static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  };
  const std::size_t ref = argmax(pair.reference);
  const std::size_t dis = argmax(pair.distorted);
  EXPECT_EQ(ref / 40, dis / 40);
  // 1.5 m at 0.15 m per pixel.
  EXPECT_EQ(std::abs(static_cast<int>(dis % 40) - static_cast<int>(ref % 40)), 10);
}

}  // namespace
}  // namespace sarnav
