// sarnav: render, sweep, build and baseline subcommands.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarnav/commands.hpp"
#include "sarnav/digest.hpp"
#include "sarnav/errors.hpp"

namespace {

using namespace sarnav;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> scenario;
  std::string out;
  std::optional<int> workers;
  bool checksum = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* c = cmd->add_option("--config", f.config, "JSON run configuration");
  if (needs_config) c->required();
  cmd->add_option("--seed", f.seed, "override the config seed");
  cmd->add_option("--out", f.out, "output directory (default: config output_dir)");
  cmd->add_option("--workers", f.workers, "worker threads (default: config workers)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--checksum", f.checksum, "print SHA-256 digests of every output file");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
}

RunConfig resolve_config(const CommonFlags& f) {
  json j = read_json_file(f.config);
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  if (f.seed) j["seed"] = *f.seed;
  if (f.scenario) j["scenario"] = *f.scenario;
  if (f.workers) j["workers"] = *f.workers;
  if (!f.out.empty()) j["output_dir"] = f.out;
  return parse_config(j);
}

void print_checksums(const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) {
    std::cout << "sha256 " << p.filename().string() << ' ' << sha256_file(p) << '\n';
  }
  std::cout << "digest " << combined_digest(files) << '\n';
}

NavError parse_error_overrides(const std::vector<std::string>& specs) {
  NavError err;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("--error expects axis=value, got '" + s + "'");
    }
    const ErrorAxis axis = parse_axis(s.substr(0, eq));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ValidationError("--error value for " + s.substr(0, eq) + " is not a number");
    }
    err.set_component(axis, value);
  }
  return err;
}

int run_render(const CommonFlags& f, const std::vector<std::string>& errors, int target) {
  const RunConfig cfg = resolve_config(f);
  const NavError err0 = parse_error_overrides(errors);
  const RenderResult r = cmd_render(cfg, err0, target, cfg.output_dir, cfg.workers);
  std::cout << "at_shift_px " << r.measurement.at_shift << '\n'
            << "ct_shift_px " << r.measurement.ct_shift << '\n'
            << "sharpness_ratio " << r.measurement.sharpness_ratio << '\n'
            << "classification " << r.classification.label() << '\n';
  if (f.checksum) print_checksums(r.files);
  return 0;
}

int run_sweep(const CommonFlags& f, const std::string& axis_arg,
              const std::vector<double>& magnitudes, bool assert_table) {
  const RunConfig cfg = resolve_config(f);
  std::vector<ErrorAxis> axes;
  if (axis_arg == "all") {
    axes.assign(kAllErrorAxes.begin(), kAllErrorAxes.end());
  } else {
    axes.push_back(parse_axis(axis_arg));
  }
  const auto sweeps = cmd_sweep(cfg, axes, magnitudes, cfg.output_dir, cfg.workers);
  bool all_match = true;
  std::vector<std::filesystem::path> files;
  for (const AxisSweep& s : sweeps) {
    std::cout << sweep_csv(s.rows);
    std::cout << "# " << axis_name(s.axis) << ' '
              << (s.matches_table ? "matches" : "DOES NOT match") << " the sensitivity table\n";
    all_match = all_match && s.matches_table;
    files.push_back(s.csv);
  }
  if (f.checksum) print_checksums(files);
  if (assert_table && !all_match) {
    std::cerr << "sarnav sweep: classification does not match the sensitivity table\n";
    return kExitRuntime;
  }
  return 0;
}

int run_build(const CommonFlags& f) {
  const RunConfig cfg = resolve_config(f);
  const BuildResult r = cmd_build(cfg, cfg.output_dir, cfg.workers);
  std::cout << r.manifest.to_json().dump(2) << '\n';
  if (f.checksum) print_checksums(r.files);
  return 0;
}

int run_baseline(const CommonFlags& f, const std::string& dataset) {
  const json out = cmd_baseline(dataset, f.workers.value_or(1));
  std::cout << out.dump(2) << '\n';
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    const auto metrics = std::filesystem::path(f.out) / "baseline_metrics.json";
    std::ofstream m(metrics, std::ios::trunc);
    m << out.dump(2) << '\n';
    if (!m) throw RuntimeError("failed writing " + metrics.string());
    if (f.checksum) print_checksums({metrics});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAR imaging under inertial navigation errors"};
  app.require_subcommand(1);

  CommonFlags render_flags, sweep_flags, build_flags, baseline_flags;

  auto* render = app.add_subcommand("render", "render a reference/distorted image pair");
  add_common(render, render_flags, true);
  std::vector<std::string> render_errors;
  int render_target = 0;
  render->add_option("--error", render_errors, "initial error component, e.g. ct_pos=3")
      ->take_all();
  render->add_option("--target", render_target,
                     "target location index; -1 renders the sensitivity scene");

  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep along one error axis");
  add_common(sweep, sweep_flags, true);
  std::string sweep_axis;
  std::vector<double> sweep_mags;
  bool sweep_assert = false;
  sweep->add_option("--axis", sweep_axis, "error axis (at_pos ... d_att) or 'all'")->required();
  sweep->add_option("--magnitudes", sweep_mags, "comma-separated magnitudes")->delimiter(',');
  sweep->add_flag("--assert", sweep_assert, "exit 2 unless the sensitivity table is reproduced");

  auto* build = app.add_subcommand("build", "build a dataset directory");
  add_common(build, build_flags, true);
  build->add_option("--scenario", build_flags.scenario, "override the config scenario");

  auto* baseline = app.add_subcommand("baseline", "shift-inversion baseline on a dataset");
  add_common(baseline, baseline_flags, false);
  std::string dataset_dir;
  baseline->add_option("dataset", dataset_dir, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*render) return run_render(render_flags, render_errors, render_target);
    if (*sweep) return run_sweep(sweep_flags, sweep_axis, sweep_mags, sweep_assert);
    if (*build) return run_build(build_flags);
    if (*baseline) return run_baseline(baseline_flags, dataset_dir);
  } catch (const ValidationError& e) {
    std::cerr << "sarnav: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "sarnav: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}
