#include "sarnav/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "sarnav/errors.hpp"
#include "sarnav/io.hpp"
#include "sarnav/parallel.hpp"

namespace sarnav {

namespace {

using nlohmann::json;

// Stream tags keep the per-purpose random streams independent.
constexpr std::uint64_t kErrorStream = 0x6572726f72;  // "error"
constexpr std::uint64_t kSceneStream = 0x7363656e65;  // "scene"
constexpr std::uint64_t kNoiseStream = 0x6e6f697365;  // "noise"

constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> v;
  for (std::uint64_t w : words) {
    v.push_back(static_cast<std::uint32_t>(w));
    v.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(v.begin(), v.end());
  return std::mt19937_64(seq);
}

struct MeanStd {
  double mean;
  double std_dev;
};

MeanStd population_stats(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<double> standardized(std::span<const double> x, MeanStd s) {
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - s.mean) / s.std_dev;
  return out;
}

std::string sample_tag(int target, int pair) {
  return "sample (target " + std::to_string(target) + ", pair " + std::to_string(pair) + ")";
}

}  // namespace

Scenario Scenario::from_id(int id) {
  using enum ErrorAxis;
  Scenario s;
  s.id = id;
  switch (id) {
    case 1: s.active = {kAtPosition, kCtPosition}; break;
    case 2: s.active = {kAtVelocity, kCtVelocity}; break;
    case 3: s.active = {kAtPosition, kCtPosition, kAtVelocity, kCtVelocity}; break;
    case 4: s.active = {kAtPosition, kCtPosition, kDownPosition}; break;
    case 5: s.active = {kAtVelocity, kCtVelocity, kDownVelocity}; break;
    case 6:
      s.active = {kAtPosition, kCtPosition, kDownPosition, kAtVelocity, kCtVelocity, kDownVelocity};
      break;
    default:
      throw ValidationError("scenario must be in 1..6, got " + std::to_string(id));
  }
  return s;
}

std::vector<std::string> Scenario::label_names() const {
  std::vector<std::string> out;
  for (ErrorAxis a : active) out.emplace_back(axis_name(a));
  return out;
}

std::vector<double> Scenario::labels_of(const NavError& err) const {
  std::vector<double> out;
  out.reserve(active.size());
  for (ErrorAxis a : active) out.push_back(err.component(a));
  return out;
}

double ErrorScales::std_for(ErrorAxis axis) const {
  switch (axis) {
    case ErrorAxis::kAtPosition:
    case ErrorAxis::kCtPosition:
    case ErrorAxis::kDownPosition:
      return position_std;
    case ErrorAxis::kAtVelocity:
    case ErrorAxis::kCtVelocity:
    case ErrorAxis::kDownVelocity:
      return velocity_std;
    default:
      throw ValidationError("no sampling scale for attitude axis " +
                            std::string(axis_name(axis)));
  }
}

NavError sample_errors(const Scenario& scenario, std::uint64_t seed, const ErrorScales& scales) {
  for (ErrorAxis a : scenario.active) {
    if (!(scales.std_for(a) > 0.0)) {
      throw ValidationError("sampling scale for " + std::string(axis_name(a)) +
                            " must be positive");
    }
  }
  std::mt19937_64 rng = make_rng({seed, kErrorStream});
  std::normal_distribution<double> unit(0.0, 1.0);
  NavError err;
  for (ErrorAxis a : scenario.active) err.set_component(a, scales.std_for(a) * unit(rng));
  return err;
}

std::vector<double> preprocess_image(std::span<const double> magnitude, double floor) {
  if (magnitude.empty()) throw ValidationError("preprocess_image: empty image");
  std::vector<double> logs(magnitude.size());
  for (std::size_t k = 0; k < magnitude.size(); ++k) {
    const double v = magnitude[k] + floor;
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ValidationError("preprocess_image: pixel " + std::to_string(k) +
                            " is not positive after the noise floor");
    }
    logs[k] = std::log10(v);
  }
  const MeanStd s = population_stats(logs);
  if (!(s.std_dev > 0.0)) {
    throw DegenerateImageError("preprocess_image: constant image has zero variance");
  }
  return standardized(logs, s);
}

std::vector<double> difference_channel(std::span<const double> z_dist,
                                       std::span<const double> z_ref) {
  if (z_dist.size() != z_ref.size() || z_dist.empty()) {
    throw ValidationError("difference_channel: image sizes differ");
  }
  std::vector<double> d(z_dist.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = z_dist[k] - z_ref[k];
  MeanStd s = population_stats(d);
  s.std_dev = std::max(s.std_dev, kDifferenceMinStd);
  return standardized(d, s);
}

std::vector<double> make_input_channels(std::span<const double> z_dist,
                                        std::span<const double> z_ref) {
  const std::vector<double> diff = difference_channel(z_dist, z_ref);
  std::vector<double> out;
  out.reserve(3 * diff.size());
  out.insert(out.end(), z_dist.begin(), z_dist.end());
  out.insert(out.end(), z_ref.begin(), z_ref.end());
  out.insert(out.end(), diff.begin(), diff.end());
  return out;
}

LabelSet standardize_labels(std::span<const NavError> errors, const Scenario& scenario) {
  if (errors.size() < 2) throw ValidationError("standardize_labels needs at least two samples");
  const std::size_t m = scenario.label_width();
  std::vector<double> mean(m), std_dev(m);
  std::vector<double> column(errors.size());
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t k = 0; k < errors.size(); ++k) {
      column[k] = errors[k].component(scenario.active[c]);
    }
    const MeanStd s = population_stats(column);
    if (!(s.std_dev > 0.0)) {
      throw ValidationError("standardize_labels: component " +
                            std::string(axis_name(scenario.active[c])) + " has zero variance");
    }
    mean[c] = s.mean;
    std_dev[c] = s.std_dev;
  }
  return standardize_labels(errors, scenario, mean, std_dev);
}

LabelSet standardize_labels(std::span<const NavError> errors, const Scenario& scenario,
                            std::span<const double> mean, std::span<const double> std_dev) {
  const std::size_t m = scenario.label_width();
  if (mean.size() != m || std_dev.size() != m) {
    throw ValidationError("label standardization constants must have " + std::to_string(m) +
                          " entries for scenario " + std::to_string(scenario.id));
  }
  for (double s : std_dev) {
    if (!(s > 0.0)) throw ValidationError("label standardization std must be positive");
  }
  LabelSet out;
  out.n = errors.size();
  out.m = m;
  out.mean.assign(mean.begin(), mean.end());
  out.std_dev.assign(std_dev.begin(), std_dev.end());
  out.values.resize(out.n * m);
  for (std::size_t k = 0; k < out.n; ++k) {
    for (std::size_t c = 0; c < m; ++c) {
      out.values[k * m + c] = (errors[k].component(scenario.active[c]) - mean[c]) / std_dev[c];
    }
  }
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  const double dn = static_cast<double>(n);
  const auto train = static_cast<std::size_t>(std::llround(ratios[0] * dn));
  const auto val = static_cast<std::size_t>(std::llround(ratios[1] * dn));
  if (train + val > n) throw ValidationError("split ratios leave no room for the test split");
  return {train, val, n - train - val};
}

TargetSplit split_by_target(std::span<const int> target_ids, const std::array<double, 3>& ratios,
                            std::uint64_t seed) {
  if (target_ids.size() < 3) throw ValidationError("split_by_target needs at least three targets");
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ValidationError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
  if (std::set<int>(target_ids.begin(), target_ids.end()).size() != target_ids.size()) {
    throw ValidationError("split_by_target: duplicate target ids");
  }

  std::vector<int> ids(target_ids.begin(), target_ids.end());
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng = make_rng({seed});
  // Fisher-Yates with an explicit index draw; std::shuffle's algorithm is
  // implementation-defined and would make splits library-dependent.
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(ids[i], ids[j]);
  }
  const auto sizes = split_sizes(ids.size(), ratios);
  TargetSplit out;
  auto first = ids.begin();
  out.train.assign(first, first + static_cast<std::ptrdiff_t>(sizes[0]));
  first += static_cast<std::ptrdiff_t>(sizes[0]);
  out.val.assign(first, first + static_cast<std::ptrdiff_t>(sizes[1]));
  first += static_cast<std::ptrdiff_t>(sizes[1]);
  out.test.assign(first, ids.end());
  for (auto* part : {&out.train, &out.val, &out.test}) std::sort(part->begin(), part->end());
  return out;
}

MseResult mse_metric(std::span<const double> s_true, std::span<const double> s_hat,
                     std::size_t m) {
  if (m == 0) throw ValidationError("mse_metric: label width must be positive");
  if (s_true.size() != s_hat.size()) {
    throw ValidationError("mse_metric: shape mismatch (" + std::to_string(s_true.size()) +
                          " vs " + std::to_string(s_hat.size()) + " values)");
  }
  if (s_true.empty() || s_true.size() % m != 0) {
    throw ValidationError("mse_metric: value count is not a positive multiple of the width");
  }
  const std::size_t n = s_true.size() / m;
  MseResult out;
  out.per_component.assign(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < m; ++c) {
      const double e = s_true[k * m + c] - s_hat[k * m + c];
      out.per_component[c] += e * e;
    }
  }
  double total = 0.0;
  for (double& v : out.per_component) {
    total += v;
    v /= static_cast<double>(n);
  }
  out.average = total / static_cast<double>(n * m);
  return out;
}

TargetSpec make_target(const RunConfig& cfg, int id) {
  std::mt19937_64 rng = make_rng({cfg.seed, kSceneStream, static_cast<std::uint64_t>(id)});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> gain(0.5, 1.0);
  TargetSpec spec;
  spec.id = id;
  const double cx = cfg.scene.at_spread * unit(rng);
  const double cy = cfg.geometry.standoff + cfg.scene.ct_spread * unit(rng);
  spec.grid = cfg.grid_at(Vec3(cx, cy, 0.0));
  for (int k = 0; k < cfg.scene.scatterers; ++k) {
    PointTarget t;
    const double dx = cfg.scene.extent * unit(rng);
    const double dy = cfg.scene.extent * unit(rng);
    t.position = Vec3(cx + dx, cy + dy, 0.0);
    t.reflectivity = gain(rng);
    spec.scene.targets.push_back(t);
  }
  return spec;
}

const SplitInfo& DatasetManifest::split(const std::string& name) const {
  for (const SplitInfo& s : splits) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown split '" + name + "'");
}

json DatasetManifest::to_json() const {
  json j;
  j["format_version"] = format_version;
  j["scenario"] = scenario;
  j["label_names"] = label_names;
  j["aperture_s"] = aperture_s;
  j["seed"] = seed;
  j["image_shape"] = {3, n_at, n_ct};
  j["channels"] = {"distorted", "reference", "difference"};
  j["dtype"] = "float32";
  j["byte_order"] = "little";
  j["label_mean"] = label_mean;
  j["label_std"] = label_std;
  json counts, files, targets;
  for (const SplitInfo& s : splits) {
    counts[s.name] = s.count;
    targets[s.name] = s.targets;
    files[s.name] = {{"inputs", s.inputs_file},
                     {"labels", s.labels_file},
                     {"inputs_shape", {s.count, 3, n_at, n_ct}},
                     {"labels_shape", {s.count, label_width()}}};
  }
  j["counts"] = counts;
  j["targets"] = targets;
  j["files"] = files;
  j["config"] = config;
  return j;
}

DatasetManifest DatasetManifest::from_json(const json& j) {
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kDatasetFormatVersion) {
      throw ValidationError("unsupported dataset format_version " +
                            std::to_string(m.format_version));
    }
    m.scenario = j.at("scenario").get<int>();
    m.label_names = j.at("label_names").get<std::vector<std::string>>();
    m.aperture_s = j.at("aperture_s").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto shape = j.at("image_shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3 || shape[0] != 3) throw ValidationError("manifest: bad image_shape");
    m.n_at = shape[1];
    m.n_ct = shape[2];
    m.label_mean = j.at("label_mean").get<std::vector<double>>();
    m.label_std = j.at("label_std").get<std::vector<double>>();
    for (std::size_t k = 0; k < 3; ++k) {
      SplitInfo& s = m.splits[k];
      s.name = kSplitNames[k];
      s.count = j.at("counts").at(s.name).get<std::size_t>();
      s.targets = j.at("targets").at(s.name).get<std::vector<int>>();
      s.inputs_file = j.at("files").at(s.name).at("inputs").get<std::string>();
      s.labels_file = j.at("files").at(s.name).at("labels").get<std::string>();
    }
    m.config = j.value("config", json::object());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed dataset manifest: ") + e.what());
  }
  if (m.label_mean.size() != m.label_width() || m.label_std.size() != m.label_width()) {
    throw ValidationError("manifest: label_mean/label_std length differs from label_names");
  }
  for (double s : m.label_std) {
    if (!(s > 0.0)) throw ValidationError("manifest: label_std must be strictly positive");
  }
  return m;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

BuildResult build_dataset(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          int workers) {
  cfg.validate();
  const Scenario scenario = Scenario::from_id(cfg.scenario);
  const ErrorScales scales{cfg.sampling.position_std, cfg.sampling.velocity_std};
  const auto n_targets = static_cast<std::size_t>(cfg.counts.targets);
  const auto n_pairs = static_cast<std::size_t>(cfg.counts.pairs_per_target);
  if (cfg.label_mean && cfg.label_mean->size() != scenario.label_width()) {
    throw ValidationError("label_standardization must have " +
                          std::to_string(scenario.label_width()) + " entries for scenario " +
                          std::to_string(scenario.id));
  }

  std::vector<int> ids(n_targets);
  std::iota(ids.begin(), ids.end(), 0);
  const TargetSplit split = split_by_target(ids, cfg.split, cfg.seed);
  const std::array<const std::vector<int>*, 3> split_targets = {&split.train, &split.val,
                                                                &split.test};

  // All errors are drawn before rendering so labels can be standardized over
  // the whole dataset and tensors streamed out target by target.
  BuildResult result;
  std::vector<NavError> errors;
  for (std::size_t s = 0; s < 3; ++s) {
    for (int t : *split_targets[s]) {
      for (std::size_t p = 0; p < n_pairs; ++p) {
        const std::uint64_t seed = make_rng({cfg.seed, static_cast<std::uint64_t>(t), p})();
        SampleRecord rec{t, static_cast<int>(p), kSplitNames[s], sample_errors(scenario, seed, scales)};
        errors.push_back(rec.raw_error);
        result.samples.push_back(rec);
      }
    }
  }
  result.labels = cfg.label_mean
                      ? standardize_labels(errors, scenario, *cfg.label_mean, *cfg.label_std)
                      : standardize_labels(errors, scenario);

  DatasetManifest& man = result.manifest;
  man.scenario = scenario.id;
  man.label_names = scenario.label_names();
  man.aperture_s = cfg.geometry.aperture_s;
  man.seed = cfg.seed;
  man.n_at = cfg.grid.n_at;
  man.n_ct = cfg.grid.n_ct;
  man.label_mean = result.labels.mean;
  man.label_std = result.labels.std_dev;
  man.config = to_json(cfg);
  // Execution details do not belong to the dataset's identity.
  man.config.erase("workers");
  man.config.erase("output_dir");
  for (std::size_t s = 0; s < 3; ++s) {
    SplitInfo& info = man.splits[s];
    info.name = kSplitNames[s];
    info.targets = *split_targets[s];
    info.count = info.targets.size() * n_pairs;
    info.inputs_file = info.name + "_inputs.f32";
    info.labels_file = info.name + "_labels.f32";
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> partials;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : partials) std::filesystem::remove(p, ec);
  };

  const Trajectory truth = cfg.trajectory();
  const double t_ref = truth.mid_time();
  const std::size_t m = scenario.label_width();
  const std::size_t pixels = cfg.grid.n_at * cfg.grid.n_ct;
  std::size_t sample_index = 0;

  try {
    for (std::size_t s = 0; s < 3; ++s) {
      const SplitInfo& info = man.splits[s];
      partials.push_back(out_dir / (info.inputs_file + ".partial"));
      partials.push_back(out_dir / (info.labels_file + ".partial"));
      std::ofstream inputs(partials[partials.size() - 2], std::ios::binary | std::ios::trunc);
      std::ofstream labels(partials.back(), std::ios::binary | std::ios::trunc);
      if (!inputs || !labels) throw RuntimeError("cannot write into " + out_dir.string());

      for (int t : info.targets) {
        const TargetSpec target = make_target(cfg, t);
        const RadarParams params =
            fit_range_window(cfg.base_radar(), truth, target.grid, cfg.radar.window_margin);
        SimulationOptions opts;
        opts.noise_std = cfg.radar.noise_std;
        opts.noise_seed = make_rng({cfg.seed, kNoiseStream, static_cast<std::uint64_t>(t)})();
        opts.workers = workers;

        std::vector<double> z_ref;
        PhaseHistory ph;
        try {
          ph = simulate_phase_history(truth, target.scene, params, opts);
          z_ref = preprocess_image(backproject(ph, truth, target.grid, params, workers).magnitude());
        } catch (const ValidationError& e) {
          throw ValidationError("reference for target " + std::to_string(t) + ": " + e.what());
        } catch (const std::exception& e) {
          throw RuntimeError("reference for target " + std::to_string(t) + ": " + e.what());
        }

        std::vector<std::vector<float>> rendered(n_pairs);
        parallel_for(n_pairs, workers, [&](std::size_t p) {
          const SampleRecord& rec = result.samples[sample_index + p];
          try {
            const Trajectory est = corrupt_trajectory(truth, rec.raw_error, t_ref);
            const SarImage img = backproject(ph, est, target.grid, params, 1);
            const std::vector<double> ch = make_input_channels(preprocess_image(img.magnitude()), z_ref);
            rendered[p].assign(ch.begin(), ch.end());
          } catch (const ValidationError& e) {
            throw ValidationError(sample_tag(t, static_cast<int>(p)) + ": " + e.what());
          } catch (const std::exception& e) {
            throw RuntimeError(sample_tag(t, static_cast<int>(p)) + ": " + e.what());
          }
        });

        for (std::size_t p = 0; p < n_pairs; ++p) {
          if (rendered[p].size() != 3 * pixels) throw RuntimeError("internal: bad tensor size");
          write_f32_le(inputs, rendered[p]);
          std::vector<float> lab(m);
          for (std::size_t c = 0; c < m; ++c) {
            lab[c] = static_cast<float>(result.labels.values[(sample_index + p) * m + c]);
          }
          write_f32_le(labels, lab);
        }
        sample_index += n_pairs;
      }
      inputs.close();
      labels.close();
      if (!inputs || !labels) throw RuntimeError("failed writing tensors into " + out_dir.string());
    }

    for (std::size_t s = 0; s < 3; ++s) {
      const SplitInfo& info = man.splits[s];
      for (const std::string& name : {info.inputs_file, info.labels_file}) {
        std::filesystem::rename(out_dir / (name + ".partial"), out_dir / name);
        result.files.push_back(out_dir / name);
      }
    }
    partials.clear();
  } catch (...) {
    cleanup();
    throw;
  }

  const auto manifest_path = out_dir / "manifest.json";
  std::ofstream mf(manifest_path, std::ios::trunc);
  mf << man.to_json().dump(2) << '\n';
  mf.close();
  if (!mf) throw RuntimeError("failed writing " + manifest_path.string());
  result.files.insert(result.files.begin(), manifest_path);
  return result;
}

SplitTensors load_split(const std::filesystem::path& dir, const DatasetManifest& manifest,
                        const std::string& split) {
  const SplitInfo& info = manifest.split(split);
  SplitTensors out;
  out.n = info.count;
  out.inputs = read_f32_le(dir / info.inputs_file);
  out.labels = read_f32_le(dir / info.labels_file);
  const std::size_t per_input = 3 * manifest.n_at * manifest.n_ct;
  if (out.inputs.size() != out.n * per_input) {
    throw RuntimeError(info.inputs_file + " holds " + std::to_string(out.inputs.size()) +
                       " values, manifest implies " + std::to_string(out.n * per_input));
  }
  if (out.labels.size() != out.n * manifest.label_width()) {
    throw RuntimeError(info.labels_file + " size does not match the manifest count");
  }
  return out;
}

}  // namespace sarnav
