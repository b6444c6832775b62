#include "sarnav/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sarnav/errors.hpp"

namespace sarnav {

namespace {

using nlohmann::json;

// Reads fields out of one JSON object, tracking which keys were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(where() + " must be a JSON object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ValidationError(field(key) + " must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ValidationError(field(key) + " must be finite");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ValidationError(field(key) + " must be an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else {
          const auto s = v->get<long long>();
          if (s < 0) throw ValidationError(field(key) + " must be non-negative");
          out = static_cast<Int>(s);
        }
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ValidationError(field(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void number_array(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ValidationError(field(key) + " must be an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number()) throw ValidationError(field(key) + " must be an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ValidationError("missing required config field: " + field(key));
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError("unknown config field: " + field(it.key()));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ValidationError(name + " must be positive");
}

void require_non_negative(double v, const std::string& name) {
  if (!(v >= 0.0)) throw ValidationError(name + " must be non-negative");
}

}  // namespace

void RunConfig::validate() const {
  require_positive(geometry.speed, "geometry.speed");
  require_positive(geometry.altitude, "geometry.altitude");
  require_positive(geometry.standoff, "geometry.standoff");
  require_positive(geometry.aperture_s, "geometry.aperture_s");
  require_positive(geometry.pulse_rate, "geometry.pulse_rate");
  if (geometry.aperture_s * geometry.pulse_rate < 1.0) {
    throw ValidationError("geometry: aperture_s * pulse_rate must give at least two pulses");
  }

  require_positive(radar.carrier_wavelength, "radar.carrier_wavelength");
  require_positive(radar.range_resolution, "radar.range_resolution");
  require_positive(radar.range_bin_spacing, "radar.range_bin_spacing");
  require_non_negative(radar.window_margin, "radar.window_margin");
  require_non_negative(radar.noise_std, "radar.noise_std");
  if (radar.range_bin_spacing > radar.range_resolution / 2.0 + 1e-15) {
    throw ValidationError("radar.range_bin_spacing must not exceed radar.range_resolution / 2");
  }

  if (grid.n_at < 3 || grid.n_ct < 3) throw ValidationError("grid.n_at and grid.n_ct must be >= 3");
  require_positive(grid.at_spacing, "grid.at_spacing");
  require_positive(grid.ct_spacing, "grid.ct_spacing");

  if (scene.scatterers < 1) throw ValidationError("scene.scatterers must be >= 1");
  require_non_negative(scene.extent, "scene.extent");
  require_non_negative(scene.at_spread, "scene.at_spread");
  require_non_negative(scene.ct_spread, "scene.ct_spread");
  if (scene.ct_spread >= geometry.standoff) {
    throw ValidationError("scene.ct_spread must be smaller than geometry.standoff");
  }

  if (scenario < 1 || scenario > 6) {
    throw ValidationError("scenario must be in 1..6, got " + std::to_string(scenario));
  }
  require_positive(sampling.position_std, "sampling.position_std");
  require_positive(sampling.velocity_std, "sampling.velocity_std");

  if (counts.targets < 3) throw ValidationError("counts.targets must be >= 3");
  if (counts.pairs_per_target < 1) throw ValidationError("counts.pairs_per_target must be >= 1");

  double sum = 0.0;
  for (double r : split) {
    require_non_negative(r, "split");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
  require_positive(thresholds.shift_px, "thresholds.shift_px");
  require_positive(thresholds.blur_ratio, "thresholds.blur_ratio");
  if (workers < 1) throw ValidationError("workers must be >= 1");

  if (label_mean.has_value() != label_std.has_value()) {
    throw ValidationError("label_standardization needs both mean and std");
  }
  if (label_std) {
    for (double s : *label_std) require_positive(s, "label_standardization.std");
    for (double m : *label_mean) {
      if (!std::isfinite(m)) throw ValidationError("label_standardization.mean must be finite");
    }
    if (label_mean->size() != label_std->size()) {
      throw ValidationError("label_standardization.mean and .std lengths differ");
    }
  }
}

Trajectory RunConfig::trajectory() const {
  return generate_level_trajectory(geometry.speed, geometry.altitude, geometry.aperture_s,
                                   geometry.pulse_rate);
}

RadarParams RunConfig::base_radar() const {
  RadarParams p;
  p.carrier_wavelength = radar.carrier_wavelength;
  p.range_resolution = radar.range_resolution;
  p.range_bin_spacing = radar.range_bin_spacing;
  return p;
}

ImageGrid RunConfig::grid_at(const Vec3& center) const {
  ImageGrid g;
  g.center = center;
  g.at_spacing = grid.at_spacing;
  g.ct_spacing = grid.ct_spacing;
  g.n_at = grid.n_at;
  g.n_ct = grid.n_ct;
  return g;
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  ObjectReader root(j, "");
  root.require("scenario");
  root.require("seed");

  if (const json* g = root.take("geometry")) {
    ObjectReader r(*g, "geometry");
    r.number("speed", cfg.geometry.speed);
    r.number("altitude", cfg.geometry.altitude);
    r.number("standoff", cfg.geometry.standoff);
    r.number("aperture_s", cfg.geometry.aperture_s);
    r.number("pulse_rate", cfg.geometry.pulse_rate);
    r.reject_unknown();
  }
  if (const json* g = root.take("radar")) {
    ObjectReader r(*g, "radar");
    r.number("carrier_wavelength", cfg.radar.carrier_wavelength);
    r.number("range_resolution", cfg.radar.range_resolution);
    r.number("range_bin_spacing", cfg.radar.range_bin_spacing);
    r.number("window_margin", cfg.radar.window_margin);
    r.number("noise_std", cfg.radar.noise_std);
    r.reject_unknown();
  }
  if (const json* g = root.take("grid")) {
    ObjectReader r(*g, "grid");
    r.integer("n_at", cfg.grid.n_at);
    r.integer("n_ct", cfg.grid.n_ct);
    r.number("at_spacing", cfg.grid.at_spacing);
    r.number("ct_spacing", cfg.grid.ct_spacing);
    r.reject_unknown();
  }
  if (const json* g = root.take("scene")) {
    ObjectReader r(*g, "scene");
    r.integer("scatterers", cfg.scene.scatterers);
    r.number("extent", cfg.scene.extent);
    r.number("at_spread", cfg.scene.at_spread);
    r.number("ct_spread", cfg.scene.ct_spread);
    r.reject_unknown();
  }
  root.integer("scenario", cfg.scenario);
  if (const json* g = root.take("sampling")) {
    ObjectReader r(*g, "sampling");
    r.number("position_std", cfg.sampling.position_std);
    r.number("velocity_std", cfg.sampling.velocity_std);
    r.reject_unknown();
  }
  if (const json* g = root.take("counts")) {
    ObjectReader r(*g, "counts");
    r.integer("targets", cfg.counts.targets);
    r.integer("pairs_per_target", cfg.counts.pairs_per_target);
    r.reject_unknown();
  }
  {
    std::vector<double> split;
    root.number_array("split", split);
    if (root.has("split")) {
      if (split.size() != 3) throw ValidationError("split must have exactly 3 entries");
      std::copy(split.begin(), split.end(), cfg.split.begin());
    }
  }
  root.integer("seed", cfg.seed);
  root.string("output_dir", cfg.output_dir);
  if (const json* g = root.take("thresholds")) {
    ObjectReader r(*g, "thresholds");
    r.number("shift_px", cfg.thresholds.shift_px);
    r.number("blur_ratio", cfg.thresholds.blur_ratio);
    r.reject_unknown();
  }
  root.integer("workers", cfg.workers);
  if (const json* g = root.take("label_standardization")) {
    ObjectReader r(*g, "label_standardization");
    r.require("mean");
    r.require("std");
    std::vector<double> mean, std_dev;
    r.number_array("mean", mean);
    r.number_array("std", std_dev);
    r.reject_unknown();
    cfg.label_mean = std::move(mean);
    cfg.label_std = std::move(std_dev);
  }
  root.reject_unknown();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
  json j;
  j["geometry"] = {{"speed", cfg.geometry.speed},
                   {"altitude", cfg.geometry.altitude},
                   {"standoff", cfg.geometry.standoff},
                   {"aperture_s", cfg.geometry.aperture_s},
                   {"pulse_rate", cfg.geometry.pulse_rate}};
  j["radar"] = {{"carrier_wavelength", cfg.radar.carrier_wavelength},
                {"range_resolution", cfg.radar.range_resolution},
                {"range_bin_spacing", cfg.radar.range_bin_spacing},
                {"window_margin", cfg.radar.window_margin},
                {"noise_std", cfg.radar.noise_std}};
  j["grid"] = {{"n_at", cfg.grid.n_at},
               {"n_ct", cfg.grid.n_ct},
               {"at_spacing", cfg.grid.at_spacing},
               {"ct_spacing", cfg.grid.ct_spacing}};
  j["scene"] = {{"scatterers", cfg.scene.scatterers},
                {"extent", cfg.scene.extent},
                {"at_spread", cfg.scene.at_spread},
                {"ct_spread", cfg.scene.ct_spread}};
  j["scenario"] = cfg.scenario;
  j["sampling"] = {{"position_std", cfg.sampling.position_std},
                   {"velocity_std", cfg.sampling.velocity_std}};
  j["counts"] = {{"targets", cfg.counts.targets},
                 {"pairs_per_target", cfg.counts.pairs_per_target}};
  j["split"] = cfg.split;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["thresholds"] = {{"shift_px", cfg.thresholds.shift_px},
                     {"blur_ratio", cfg.thresholds.blur_ratio}};
  j["workers"] = cfg.workers;
  if (cfg.label_mean) {
    j["label_standardization"] = {{"mean", *cfg.label_mean}, {"std", *cfg.label_std}};
  }
  return j;
}

}  // namespace sarnav
