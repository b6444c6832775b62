#include "sarnav/commands.hpp"

#include <fstream>

#include "sarnav/errors.hpp"
#include "sarnav/io.hpp"

namespace sarnav {

SweepSetup make_sweep_setup(const RunConfig& cfg, int workers) {
  cfg.validate();
  SweepSetup setup;
  setup.truth = cfg.trajectory();
  setup.grid = cfg.grid_at(Vec3(0.0, cfg.geometry.standoff, 0.0));
  setup.scene = sensitivity_scene(setup.grid.center);
  setup.params = fit_range_window(cfg.base_radar(), setup.truth, setup.grid,
                                  cfg.radar.window_margin);
  setup.thresholds = cfg.thresholds;
  setup.workers = workers;
  return setup;
}

RenderResult cmd_render(const RunConfig& cfg, const NavError& err0, int target,
                        const std::filesystem::path& out_dir, int workers) {
  cfg.validate();
  err0.validate();
  if (target >= cfg.counts.targets) {
    throw ValidationError("target " + std::to_string(target) + " is outside counts.targets = " +
                          std::to_string(cfg.counts.targets));
  }
  const Trajectory truth = cfg.trajectory();
  TargetScene scene;
  ImageGrid grid;
  if (target < 0) {
    grid = cfg.grid_at(Vec3(0.0, cfg.geometry.standoff, 0.0));
    scene = sensitivity_scene(grid.center);
  } else {
    TargetSpec spec = make_target(cfg, target);
    scene = std::move(spec.scene);
    grid = spec.grid;
  }
  const RadarParams params =
      fit_range_window(cfg.base_radar(), truth, grid, cfg.radar.window_margin);
  SimulationOptions opts;
  opts.noise_std = cfg.radar.noise_std;
  opts.noise_seed = cfg.seed;
  opts.workers = workers;
  const double t_ref = truth.mid_time();
  const ImagePair pair = form_image_pair(truth, err0, t_ref, scene, grid, params, opts);

  RenderResult result;
  result.measurement = measure_distortion(pair.reference, pair.distorted);
  result.classification = classify(result.measurement, cfg.thresholds);

  std::filesystem::create_directories(out_dir);
  const auto add = [&](const std::string& name) {
    result.files.push_back(out_dir / name);
    return result.files.back();
  };
  write_trajectory(add("truth.traj"), truth);
  write_trajectory(add("estimated.traj"), corrupt_trajectory(truth, err0, t_ref));
  write_sar_image(add("reference.sarimg"), pair.reference, params);
  write_sar_image(add("distorted.sarimg"), pair.distorted, params);
  write_magnitude_csv(add("reference_magnitude.csv"), pair.reference);
  write_magnitude_csv(add("distorted_magnitude.csv"), pair.distorted);
  return result;
}

std::vector<AxisSweep> cmd_sweep(const RunConfig& cfg, const std::vector<ErrorAxis>& axes,
                                 const std::vector<double>& magnitudes,
                                 const std::filesystem::path& out_dir, int workers) {
  if (axes.empty()) throw ValidationError("no sweep axis given");
  for (ErrorAxis axis : axes) {
    for (double m : magnitudes) {
      NavError probe;
      probe.set_component(axis, m);
      probe.validate();
    }
  }
  const SweepSetup setup = make_sweep_setup(cfg, workers);
  std::filesystem::create_directories(out_dir);

  std::vector<AxisSweep> out;
  for (ErrorAxis axis : axes) {
    const std::vector<double> mags =
        magnitudes.empty() ? default_sweep_magnitudes(axis) : magnitudes;
    AxisSweep sweep;
    sweep.axis = axis;
    sweep.rows = sensitivity_sweep(setup, axis, mags);
    sweep.matches_table = matches_sensitivity_table(axis, sweep.rows);
    sweep.csv = out_dir / ("sweep_" + std::string(axis_name(axis)) + ".csv");
    std::ofstream f(sweep.csv, std::ios::trunc);
    f << sweep_csv(sweep.rows);
    if (!f) throw RuntimeError("failed writing " + sweep.csv.string());
    out.push_back(std::move(sweep));
  }
  return out;
}

BuildResult cmd_build(const RunConfig& cfg, const std::filesystem::path& out_dir, int workers) {
  return build_dataset(cfg, out_dir, workers);
}

std::vector<double> baseline_calibration_magnitudes() { return {-3.0, -1.5, 0.0, 1.5, 3.0}; }

nlohmann::json cmd_baseline(const std::filesystem::path& dataset_dir, int workers) {
  const DatasetManifest man = DatasetManifest::load(dataset_dir);
  if (man.scenario != 1) {
    throw ValidationError("baseline needs a scenario-1 dataset, " + dataset_dir.string() +
                          " holds scenario " + std::to_string(man.scenario));
  }
  if (man.split("test").count == 0) throw ValidationError("dataset has an empty test split");
  const RunConfig cfg = parse_config(man.config);
  const SplitTensors test = load_split(dataset_dir, man, "test");

  const ShiftCalibration calib =
      calibrate_position_shift(make_sweep_setup(cfg, workers), baseline_calibration_magnitudes());

  const std::size_t pixels = man.n_at * man.n_ct;
  const std::size_t m = man.label_width();
  std::vector<double> truth(test.labels.begin(), test.labels.end());
  std::vector<double> estimate(test.n * m);
  for (std::size_t k = 0; k < test.n; ++k) {
    const float* base = test.inputs.data() + k * 3 * pixels;
    const std::vector<double> z_dist(base, base + pixels);
    const std::vector<double> z_ref(base + pixels, base + 2 * pixels);
    const PositionEstimate pe =
        baseline_estimate_from_channels(z_ref, z_dist, man.n_at, man.n_ct, calib);
    estimate[k * m + 0] = (pe.dp_at - man.label_mean[0]) / man.label_std[0];
    estimate[k * m + 1] = (pe.dp_ct - man.label_mean[1]) / man.label_std[1];
  }
  const MseResult mse = mse_metric(truth, estimate, m);

  nlohmann::json out;
  out["estimator"] = "baseline_shift_inversion";
  out["dataset"] = dataset_dir.string();
  out["scenario"] = man.scenario;
  out["split"] = "test";
  out["n"] = test.n;
  out["label_names"] = man.label_names;
  out["per_component_mse"] = mse.per_component;
  out["average_mse"] = mse.average;
  out["reference"] = {{"predict_zero_mse", 1.0}};
  return out;
}

}  // namespace sarnav
