// splidar -- command-line front end: simulate, filter, estimate, pipeline,
// verify-theory and sweep. Exit codes: 0 success, 1 runtime failure,
// 2 invalid configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "splidar/consensus_filter.hpp"
#include "splidar/depth_estimator.hpp"
#include "splidar/evaluation.hpp"
#include "splidar/io.hpp"
#include "splidar/scene.hpp"
#include "splidar/simulator.hpp"
#include "splidar/theory.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace splidar;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneOptions {
  std::string kind = "toy";
  std::size_t size = 200;
  std::string reflectivity;
  std::string depth;
};

struct AcquisitionOptions {
  double sbr = 1.0;
  double signal_ppp = 2.0;
  double repetition_period = 100e-9;
  double pulse_width = 270e-12;
  double efficiency = 0.35;
  double signal_flux = 0.0114;
};

struct CommonOptions {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
};

struct FilterOptions {
  std::string filter = "consensus";
  double p_outlier = 1.0;
  int neighborhood_side = 0;  // 0 = plan from data
};

struct PmlOptions {
  double beta = PmlConfig{}.beta;
  int max_iterations = PmlConfig{}.max_iterations;
  double tolerance = PmlConfig{}.tolerance;
};

const char* kSceneHelp =
    "Scene source: toy (ramp), blocks (piecewise-constant rectangles), csv or pgm.\n"
    "CSV: two row-major comma-separated files, reflectivity in [0,1] and depth in metres.\n"
    "PGM: two 16-bit binary (P5, maxval 65535) images mapped as\n"
    "  reflectivity = v / 65535, depth = z_max * v / 65536 with z_max = c T_r / 2.";

void add_scene_options(CLI::App* cmd, SceneOptions& s) {
  cmd->add_option("--scene", s.kind, kSceneHelp)
      ->check(CLI::IsMember({"toy", "blocks", "csv", "pgm"}));
  cmd->add_option("--scene-size", s.size, "Side length of procedural scenes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--reflectivity", s.reflectivity, "Reflectivity image for csv/pgm scenes");
  cmd->add_option("--depth", s.depth, "Depth image for csv/pgm scenes");
}

void add_acquisition_options(CLI::App* cmd, AcquisitionOptions& a) {
  cmd->add_option("--sbr", a.sbr, "Scene signal-to-background ratio (inf for B = 0)");
  cmd->add_option("--signal-ppp", a.signal_ppp, "Scene-average signal photons per pixel")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--repetition-period", a.repetition_period, "T_r in seconds");
  cmd->add_option("--pulse-width", a.pulse_width, "RMS pulse width T_p in seconds");
  cmd->add_option("--efficiency", a.efficiency, "Quantum efficiency eta");
  cmd->add_option("--signal-flux", a.signal_flux, "Signal photons per pulse S");
}

void add_filter_options(CLI::App* cmd, FilterOptions& f) {
  cmd->add_option("--filter", f.filter, "Signal extraction filter")
      ->check(CLI::IsMember({"rom", "mode", "consensus", "oracle"}));
  cmd->add_option("--p-outlier", f.p_outlier, "Consensus outlier threshold in std devs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--neighborhood-side", f.neighborhood_side,
                  "Override the consensus neighbourhood side (odd; 0 = automatic)");
}

void add_pml_options(CLI::App* cmd, PmlOptions& p) {
  cmd->add_option("--beta", p.beta, "TV penalty weight")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", p.max_iterations, "PML outer iterations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", p.tolerance, "PML relative objective change to stop")
      ->check(CLI::PositiveNumber);
}

void add_common_options(CLI::App* cmd, CommonOptions& c, bool needs_out = true) {
  cmd->add_option("--seed", c.seed, "Top-level random seed");
  cmd->add_option("--threads", c.threads, "Worker cap (0 = all hardware threads)");
  auto* out = cmd->add_option("--out", c.out, "Existing output directory");
  if (needs_out) out->required();
}

AcquisitionParams base_params(const AcquisitionOptions& a) {
  AcquisitionParams p;
  p.repetition_period = a.repetition_period;
  p.pulse_width = a.pulse_width;
  p.efficiency = a.efficiency;
  p.signal_flux = a.signal_flux;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

Scene make_scene(const SceneOptions& s, const AcquisitionParams& params) {
  try {
    Scene scene;
    if (s.kind == "toy") {
      scene = toy_scene(s.size);
    } else if (s.kind == "blocks") {
      scene = blocks_scene(s.size);
    } else {
      if (s.reflectivity.empty() || s.depth.empty())
        throw UsageError("--scene " + s.kind + " needs --reflectivity and --depth");
      for (const auto& p : {s.reflectivity, s.depth})
        if (!fs::exists(p)) throw UsageError("input file not found: " + p);
      scene = s.kind == "csv" ? load_scene_csv(s.reflectivity, s.depth)
                              : load_scene_pgm(s.reflectivity, s.depth, params);
    }
    scene.validate(params);
    return scene;
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
}

json scene_json(const SceneOptions& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "toy" || s.kind == "blocks") j["size"] = s.size;
  else {
    j["reflectivity"] = fs::absolute(s.reflectivity).string();
    j["depth"] = fs::absolute(s.depth).string();
  }
  return j;
}

json params_json(const AcquisitionParams& p) {
  return json{{"repetition_period_s", p.repetition_period}, {"pulse_width_s", p.pulse_width},
              {"efficiency", p.efficiency},                {"signal_flux", p.signal_flux},
              {"pulses", p.pulses},                        {"background", p.background}};
}

AcquisitionParams params_from_json(const json& j) {
  AcquisitionParams p;
  p.repetition_period = j.at("repetition_period_s").get<double>();
  p.pulse_width = j.at("pulse_width_s").get<double>();
  p.efficiency = j.at("efficiency").get<double>();
  p.signal_flux = j.at("signal_flux").get<double>();
  p.pulses = j.at("pulses").get<long long>();
  p.background = j.at("background").get<double>();
  p.validate();
  return p;
}

json base_manifest(const std::string& command, const CommonOptions& c) {
  return json{{"tool", "splidar"}, {"version", kVersion}, {"command", command}, {"seed", c.seed}};
}

fs::path require_out_dir(const std::string& out) {
  const fs::path dir(out);
  if (!fs::is_directory(dir)) throw UsageError("output directory does not exist: " + out);
  return dir;
}

// Writes through a temporary name so a failed run leaves no partial file.
template <typename Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    writer(out);
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_manifest(const fs::path& dir, const json& manifest) {
  write_atomically(dir / "manifest.json", [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
}

json read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("manifest not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("bad manifest " + path.string() + ": " + e.what());
  }
}

fs::path sibling_manifest(const std::string& artifact, const std::string& manifest) {
  if (!manifest.empty()) return manifest;
  return fs::path(artifact).parent_path() / "manifest.json";
}

TimestampCube load_cube(const std::string& path, const json& manifest) {
  if (!fs::exists(path)) throw UsageError("cube not found: " + path);
  TimestampCube cube;
  const CubeFile file = read_cube_file(path);
  cube.timestamps = file.timestamps;
  try {
    cube.params = params_from_json(manifest.at("params"));
  } catch (const std::exception& e) {
    throw UsageError(std::string("manifest lacks valid params: ") + e.what());
  }
  if (cube.params.repetition_period != file.repetition_period)
    throw UsageError("cube T_r disagrees with its manifest");
  return cube;
}

PipelineOptions pipeline_options(const FilterOptions& f, const PmlOptions& p, unsigned threads) {
  PipelineOptions o;
  o.p_outlier = f.p_outlier;
  if (f.neighborhood_side > 0) {
    if (f.neighborhood_side % 2 == 0) throw UsageError("--neighborhood-side must be odd");
    o.neighborhood_side = f.neighborhood_side;
  }
  o.pml.beta = p.beta;
  o.pml.max_iterations = p.max_iterations;
  o.pml.tolerance = p.tolerance;
  o.threads = threads;
  return o;
}

json filter_json(const FilterOptions& f) {
  json j{{"filter", f.filter}};
  if (f.filter == "consensus") {
    j["p_outlier"] = f.p_outlier;
    j["neighborhood_side"] = f.neighborhood_side;
  }
  return j;
}

json pml_json(const PmlOptions& p) {
  return json{{"beta", p.beta}, {"max_iterations", p.max_iterations}, {"tolerance", p.tolerance}};
}

void write_depth_outputs(const fs::path& dir, const DepthImage& depth, double z_max) {
  write_atomically(dir / "depth.pgm", [&](std::ostream& o) { write_depth_pgm(o, depth, z_max); });
  write_atomically(dir / "depth.csv", [&](std::ostream& o) { write_grid_csv(o, depth.depth); });
  write_atomically(dir / "depth.f64", [&](std::ostream& o) { write_depth_f64(o, depth); });
  write_atomically(dir / "valid.pbm", [&](std::ostream& o) { write_pbm(o, depth.valid); });
}

std::optional<double> report_rmse(const fs::path& dir, const Grid<double>& truth,
                                  const DepthImage& depth) {
  if (truth.height() != depth.height() || truth.width() != depth.width())
    throw UsageError("truth depth size differs from the estimate");
  const double value = rmse(truth, depth.depth);
  std::cout << "rmse_m " << std::setprecision(10) << value << '\n';
  write_atomically(dir / "rmse.txt",
                   [&](std::ostream& o) { o << std::setprecision(17) << value << '\n'; });
  return value;
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  SceneOptions scene;
  AcquisitionOptions acq;
  CommonOptions common;
  bool csv = false;
};

int run_simulate(const SimulateCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  const AcquisitionParams base = base_params(cmd.acq);
  const Scene scene = make_scene(cmd.scene, base);
  AcquisitionParams params;
  try {
    params = configure_for_targets(scene, base, cmd.acq.sbr, cmd.acq.signal_ppp);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (violates_low_flux(scene, params))
    std::cerr << "warning: more than one expected detection per pulse; low-flux model strained\n";
  const TimestampCube cube = simulate_scene(scene, params, RngSeed{cmd.common.seed}, cmd.common.threads);

  write_atomically(dir / "cube.sptc", [&](std::ostream& o) {
    write_cube(o, cube.timestamps, params.repetition_period);
  });
  if (cmd.csv)
    write_atomically(dir / "cube.csv", [&](std::ostream& o) { write_cube_csv(o, cube.timestamps); });
  write_atomically(dir / "truth_depth.csv", [&](std::ostream& o) { write_grid_csv(o, scene.depth()); });
  write_atomically(dir / "truth_reflectivity.csv",
                   [&](std::ostream& o) { write_grid_csv(o, scene.reflectivity()); });

  json m = base_manifest("simulate", cmd.common);
  m["scene"] = scene_json(cmd.scene);
  m["target_sbr"] = std::isinf(cmd.acq.sbr) ? json("inf") : json(cmd.acq.sbr);
  m["target_signal_ppp"] = cmd.acq.signal_ppp;
  m["scene_sbr"] = std::isinf(scene_sbr(scene, params)) ? json("inf") : json(scene_sbr(scene, params));
  m["params"] = params_json(params);
  m["outputs"] = {"cube.sptc", "truth_depth.csv", "truth_reflectivity.csv"};
  if (cmd.csv) m["outputs"].push_back("cube.csv");
  write_manifest(dir, m);
  std::cout << "pulses " << params.pulses << "\nbackground " << std::setprecision(10)
            << params.background << '\n';
  return 0;
}

struct FilterCmd {
  std::string cube;
  std::string manifest;
  FilterOptions filter;
  CommonOptions common;
};

int run_filter_cmd(const FilterCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  const json source = read_manifest(sibling_manifest(cmd.cube, cmd.manifest));
  const TimestampCube cube = load_cube(cmd.cube, source);
  const auto options = pipeline_options(cmd.filter, PmlOptions{}, cmd.common.threads);
  CensoredCube censored;
  try {
    censored = run_filter(cube, parse_filter(cmd.filter.filter), options);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  write_atomically(dir / "censored.sptc", [&](std::ostream& o) {
    write_cube(o, censored.signal_sets, cube.params.repetition_period, &censored.estimates);
  });
  json m = base_manifest("filter", cmd.common);
  m["seed"] = source.value("seed", json());
  m["source_cube"] = fs::absolute(cmd.cube).string();
  m["params"] = params_json(cube.params);
  m["filter"] = filter_json(cmd.filter);
  m["nonempty_pixels"] = censored.nonempty_pixels();
  if (source.contains("scene")) m["scene"] = source["scene"];
  m["outputs"] = {"censored.sptc"};
  write_manifest(dir, m);
  return 0;
}

struct EstimateCmd {
  std::string censored;
  std::string manifest;
  std::string truth;
  PmlOptions pml;
  CommonOptions common;
};

int run_estimate(const EstimateCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  const json source = read_manifest(sibling_manifest(cmd.censored, cmd.manifest));
  if (!fs::exists(cmd.censored)) throw UsageError("censored cube not found: " + cmd.censored);
  AcquisitionParams params;
  try {
    params = params_from_json(source.at("params"));
  } catch (const std::exception& e) {
    throw UsageError(std::string("manifest lacks valid params: ") + e.what());
  }
  const CubeFile file = read_cube_file(cmd.censored);
  CensoredCube censored;
  censored.signal_sets = file.timestamps;
  censored.estimates = file.estimates.empty()
                           ? std::vector<double>(file.timestamps.pixel_count(),
                                                 std::numeric_limits<double>::quiet_NaN())
                           : file.estimates;

  PmlConfig config;
  config.beta = cmd.pml.beta;
  config.max_iterations = cmd.pml.max_iterations;
  config.tolerance = cmd.pml.tolerance;
  config.threads = cmd.common.threads;
  const PmlResult result = pml_depth(censored, params, config);
  write_depth_outputs(dir, result.image, params.max_depth());

  json m = base_manifest("estimate", cmd.common);
  m["seed"] = source.value("seed", json());
  m["source_censored"] = fs::absolute(cmd.censored).string();
  m["params"] = params_json(params);
  m["pml"] = pml_json(cmd.pml);
  m["pml_iterations"] = result.iterations;
  m["pml_converged"] = result.converged;
  m["outputs"] = {"depth.pgm", "depth.csv", "depth.f64", "valid.pbm"};
  if (!cmd.truth.empty()) {
    if (!fs::exists(cmd.truth)) throw UsageError("truth file not found: " + cmd.truth);
    m["rmse_m"] = *report_rmse(dir, read_grid_csv_file(cmd.truth), result.image);
    m["outputs"].push_back("rmse.txt");
  }
  write_manifest(dir, m);
  return 0;
}

struct PipelineCmd {
  std::string cube;  // empty: simulate inline
  std::string manifest;
  std::string truth;
  SceneOptions scene;
  AcquisitionOptions acq;
  FilterOptions filter;
  PmlOptions pml;
  CommonOptions common;
};

int run_pipeline_cmd(const PipelineCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  json m = base_manifest("pipeline", cmd.common);
  TimestampCube cube;
  std::optional<Grid<double>> truth;
  if (!cmd.cube.empty()) {
    const json source = read_manifest(sibling_manifest(cmd.cube, cmd.manifest));
    cube = load_cube(cmd.cube, source);
    m["seed"] = source.value("seed", json());
    m["source_cube"] = fs::absolute(cmd.cube).string();
    if (source.contains("scene")) m["scene"] = source["scene"];
    if (!cmd.truth.empty()) {
      if (!fs::exists(cmd.truth)) throw UsageError("truth file not found: " + cmd.truth);
      truth = read_grid_csv_file(cmd.truth);
    }
  } else {
    const AcquisitionParams base = base_params(cmd.acq);
    const Scene scene = make_scene(cmd.scene, base);
    AcquisitionParams params;
    try {
      params = configure_for_targets(scene, base, cmd.acq.sbr, cmd.acq.signal_ppp);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    cube = simulate_scene(scene, params, RngSeed{cmd.common.seed}, cmd.common.threads);
    truth = scene.depth();
    m["scene"] = scene_json(cmd.scene);
    m["target_sbr"] = std::isinf(cmd.acq.sbr) ? json("inf") : json(cmd.acq.sbr);
    m["target_signal_ppp"] = cmd.acq.signal_ppp;
  }

  const auto options = pipeline_options(cmd.filter, cmd.pml, cmd.common.threads);
  PipelineResult result;
  try {
    result = run_pipeline(cube, parse_filter(cmd.filter.filter), options);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  write_atomically(dir / "censored.sptc", [&](std::ostream& o) {
    write_cube(o, result.censored.signal_sets, cube.params.repetition_period,
               &result.censored.estimates);
  });
  write_depth_outputs(dir, result.depth, cube.params.max_depth());

  m["params"] = params_json(cube.params);
  m["filter"] = filter_json(cmd.filter);
  m["pml"] = pml_json(cmd.pml);
  m["blank"] = result.blank;
  m["pml_converged"] = result.pml_converged;
  m["outputs"] = {"censored.sptc", "depth.pgm", "depth.csv", "depth.f64", "valid.pbm"};
  if (truth) {
    m["rmse_m"] = *report_rmse(dir, *truth, result.depth);
    m["outputs"].push_back("rmse.txt");
  }
  write_manifest(dir, m);
  return 0;
}

struct TheoryCmd {
  SceneOptions scene;
  AcquisitionOptions acq;
  CommonOptions common;
  double bin_width = kDefaultPredictorBinWidth;
};

int run_verify_theory(const TheoryCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  const AcquisitionParams base = base_params(cmd.acq);
  const Scene scene = make_scene(cmd.scene, base);
  AcquisitionParams params;
  try {
    params = configure_for_targets(scene, base, cmd.acq.sbr, cmd.acq.signal_ppp);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const TimestampCube cube = simulate_scene(scene, params, RngSeed{cmd.common.seed}, cmd.common.threads);
  const auto report = phase_transition_report(scene, cube, cmd.bin_width, cmd.common.threads);
  write_atomically(dir / "phase_transition.csv", [&](std::ostream& o) {
    o << "pi_bin_center,empirical_error_s,theoretical_error_s,pixel_count\n"
      << std::setprecision(10);
    for (const auto& b : report.bins)
      o << b.center << ',' << b.empirical_error << ',' << b.theoretical_error << ',' << b.pixels
        << '\n';
  });
  json m = base_manifest("verify-theory", cmd.common);
  m["scene"] = scene_json(cmd.scene);
  m["params"] = params_json(params);
  m["bin_width"] = cmd.bin_width;
  m["absent_pixels"] = report.absent;
  m["overflow_pixels"] = report.overflow;
  m["outputs"] = {"phase_transition.csv"};
  write_manifest(dir, m);
  return 0;
}

struct SweepCmd {
  SceneOptions scene;
  AcquisitionOptions acq;
  FilterOptions filter;  // p_outlier / neighbourhood override for consensus
  PmlOptions pml;
  CommonOptions common;
  std::string vary = "sbr";
  std::vector<double> values;
  double fixed = 2.0;
  int trials = 10;
  std::vector<std::string> filters{"rom", "mode", "consensus", "oracle"};
};

int run_sweep_cmd(const SweepCmd& cmd) {
  const fs::path dir = require_out_dir(cmd.common.out);
  const AcquisitionParams base = base_params(cmd.acq);
  SweepSpec spec;
  spec.scene = make_scene(cmd.scene, base);
  spec.variable = cmd.vary == "sbr" ? SweepVariable::sbr : SweepVariable::signal_ppp;
  spec.values = cmd.values;
  spec.fixed_value = cmd.fixed;
  spec.trials = cmd.trials;
  spec.filters.clear();
  for (const auto& f : cmd.filters) spec.filters.push_back(parse_filter(f));
  spec.pipeline = pipeline_options(cmd.filter, cmd.pml, cmd.common.threads);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SweepTable table = run_sweep(spec, base, RngSeed{cmd.common.seed});
  write_atomically(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, table); });
  for (const auto& f : table.failures)
    std::cerr << "trial failure: " << to_string(f.filter) << " value=" << f.value
              << " trial=" << f.trial << ": " << f.message << '\n';

  json m = base_manifest("sweep", cmd.common);
  m["scene"] = scene_json(cmd.scene);
  m["sweep_variable"] = cmd.vary;
  m["values"] = cmd.values;
  m["fixed_value"] = cmd.fixed;
  m["trials"] = cmd.trials;
  m["filters"] = cmd.filters;
  m["p_outlier"] = cmd.filter.p_outlier;
  m["pml"] = pml_json(cmd.pml);
  m["base_params"] = params_json(base);
  m["failures"] = table.failures.size();
  m["outputs"] = {"sweep.csv"};
  write_manifest(dir, m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splidar: single-photon LiDAR depth reconstruction toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML configuration file; command-line flags override it");
  app.require_subcommand(1);

  SimulateCmd simulate;
  auto* sim = app.add_subcommand("simulate", "Simulate a timestamp cube for a scene");
  add_scene_options(sim, simulate.scene);
  add_acquisition_options(sim, simulate.acq);
  add_common_options(sim, simulate.common);
  sim->add_flag("--csv", simulate.csv, "Also export the cube as CSV");

  FilterCmd filter;
  auto* fil = app.add_subcommand("filter", "Extract signal timestamps from a cube");
  fil->add_option("--cube", filter.cube, "Cube file written by simulate")->required();
  fil->add_option("--manifest", filter.manifest, "Manifest of the cube (default: sibling)");
  add_filter_options(fil, filter.filter);
  add_common_options(fil, filter.common);

  EstimateCmd estimate;
  auto* est = app.add_subcommand("estimate", "PML depth estimation from a censored cube");
  est->add_option("--censored", estimate.censored, "Censored cube written by filter")->required();
  est->add_option("--manifest", estimate.manifest, "Manifest of the censored cube");
  est->add_option("--truth", estimate.truth, "Ground-truth depth CSV for an RMSE line");
  add_pml_options(est, estimate.pml);
  add_common_options(est, estimate.common);

  PipelineCmd pipeline;
  auto* pip = app.add_subcommand("pipeline", "Filter and estimate (simulating inline if no --cube)");
  pip->add_option("--cube", pipeline.cube, "Existing cube; omit to simulate the scene");
  pip->add_option("--manifest", pipeline.manifest, "Manifest of the cube");
  pip->add_option("--truth", pipeline.truth, "Ground-truth depth CSV when --cube is given");
  add_scene_options(pip, pipeline.scene);
  add_acquisition_options(pip, pipeline.acq);
  add_filter_options(pip, pipeline.filter);
  add_pml_options(pip, pipeline.pml);
  add_common_options(pip, pipeline.common);

  TheoryCmd theory;
  auto* thy = app.add_subcommand("verify-theory", "ROM phase-transition report (CSV)");
  add_scene_options(thy, theory.scene);
  add_acquisition_options(thy, theory.acq);
  add_common_options(thy, theory.common);
  thy->add_option("--bin-width", theory.bin_width, "Predictor bin width")
      ->check(CLI::PositiveNumber);

  SweepCmd sweep;
  auto* swp = app.add_subcommand("sweep", "RMSE sweep over SBR or signal PPP");
  add_scene_options(swp, sweep.scene);
  sweep.scene.kind = "blocks";
  sweep.scene.size = 128;
  add_acquisition_options(swp, sweep.acq);
  add_filter_options(swp, sweep.filter);
  add_pml_options(swp, sweep.pml);
  add_common_options(swp, sweep.common);
  swp->add_option("--vary", sweep.vary, "Swept variable")
      ->check(CLI::IsMember({"sbr", "signal-ppp"}));
  swp->add_option("--values", sweep.values, "Comma-separated sweep values")
      ->delimiter(',')
      ->required();
  swp->add_option("--fixed", sweep.fixed, "Value of the other variable");
  swp->add_option("--trials", sweep.trials, "Trials per point")->check(CLI::PositiveNumber);
  swp->add_option("--filters", sweep.filters, "Filters to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"rom", "mode", "consensus", "oracle"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return run_simulate(simulate);
    if (*fil) return run_filter_cmd(filter);
    if (*est) return run_estimate(estimate);
    if (*pip) return run_pipeline_cmd(pipeline);
    if (*thy) return run_verify_theory(theory);
    if (*swp) return run_sweep_cmd(sweep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
