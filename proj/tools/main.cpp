// heatobs: plant simulation, adaptive observer runs, gain sweeps, offline
// diffusivity estimation and heatmap export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heatobs/errors.hpp"
#include "heatobs/experiment.hpp"
#include "heatobs/field_io.hpp"
#include "heatobs/heatmap.hpp"
#include "heatobs/scenario.hpp"

namespace fs = std::filesystem;
using namespace heatobs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("bad number in list: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

fs::path default_out(const fs::path& config, const std::string& what) {
  return fs::path("runs") / (config.stem().string() + "_" + what);
}

void print_summary(const ExperimentResult& r) {
  if (r.rows.empty()) return;
  const MetricsRow& last = r.rows.back();
  std::cout << "L=" << format_double(r.L) << " t=" << format_double(last.t)
            << " param_err=" << format_double(last.param_err) << " err_inf=" << format_double(last.err_inf)
            << " K err_l2=" << format_double(last.err_l2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive surface observer for subsurface tissue temperature"};
  app.require_subcommand(1);

  std::string config_path, out_dir, frames_dir, dump_path, plane_text = "z=0", image_path, range_text, L_list;
  double L = -1.0;
  bool no_adapt = false;
  std::size_t threads = 0;
  int history = 7;
  double beta = 100.0;

  auto* sim = app.add_subcommand("simulate", "Run the plant only; write frames, plant.csv and field dumps");
  sim->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--out", out_dir, "Output directory");

  auto* obs = app.add_subcommand("observe", "Co-step plant and adaptive observer; write metrics.csv");
  obs->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  obs->add_option("--L", L, "Adaptation gain (overrides the config)");
  obs->add_flag("--no-adapt", no_adapt, "Keep the observer diffusivity at a0");
  obs->add_option("-o,--out", out_dir, "Output directory");

  auto* est = app.add_subcommand("estimate", "Offline diffusivity estimation from a directory of frame CSVs");
  est->add_option("frames", frames_dir, "Directory of frame CSVs")->required()->check(CLI::ExistingDirectory);
  est->add_option("--history", history, "Temporal filter length")->check(CLI::Range(4, 64));
  est->add_option("--beta", beta, "RTC sharpening parameter")->check(CLI::Range(1.0, 1e9));
  est->add_option("-o,--out", out_dir, "Write estimates.csv here instead of stdout");

  auto* swp = app.add_subcommand("sweep", "One plant run replayed to observers with several gains");
  swp->add_option("config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  swp->add_option("--L", L_list, "Comma separated gains, e.g. 0,0.1,0.5")->required();
  swp->add_option("-j,--threads", threads, "Concurrent observers (0 = hardware)");
  swp->add_option("-o,--out", out_dir, "Output directory");

  auto* slc = app.add_subcommand("slice", "Render a TF3D field slice as an 8-bit PGM");
  slc->add_option("dump", dump_path, "TF3D field dump")->required()->check(CLI::ExistingFile);
  slc->add_option("--plane", plane_text, "Plane such as z=0 or y=0 (cm)");
  slc->add_option("--out", image_path, "Output PGM")->required();
  slc->add_option("--range", range_text, "Temperature range min:max in K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) {
      const ScenarioConfig cfg = load_config(config_path);
      const fs::path out = out_dir.empty() ? default_out(config_path, "plant") : fs::path(out_dir);
      const PlantTrajectory traj = simulate(cfg, out);
      std::cout << "simulated " << traj.size() << " levels into " << out.string() << '\n';
    } else if (*obs) {
      const ScenarioConfig cfg = load_config(config_path);
      RunOptions opts;
      if (L >= 0.0) opts.L = L;
      if (no_adapt) opts.adaptive = false;
      opts.out_dir = out_dir.empty() ? default_out(config_path, "observe") : fs::path(out_dir);
      print_summary(run_experiment(cfg, opts));
      std::cout << "metrics written to " << (*opts.out_dir / "metrics.csv").string() << '\n';
    } else if (*est) {
      AnraParams params;
      params.history = static_cast<std::size_t>(history);
      params.beta = beta;
      const auto estimates = estimate_offline(read_frame_dir(frames_dir), params);
      if (out_dir.empty()) {
        write_estimates_csv(std::cout, estimates);
      } else {
        fs::create_directories(out_dir);
        std::ofstream os(fs::path(out_dir) / "estimates.csv");
        write_estimates_csv(os, estimates);
      }
    } else if (*swp) {
      const ScenarioConfig cfg = load_config(config_path);
      const fs::path out = out_dir.empty() ? default_out(config_path, "sweep") : fs::path(out_dir);
      const SweepResult res = sweep(cfg, parse_list(L_list), out, threads);
      for (const auto& r : res.runs) print_summary(r);
      std::cout << "sweep written to " << (out / "sweep.csv").string() << '\n';
    } else if (*slc) {
      const FieldDump dump = read_tf3d(dump_path);
      std::optional<IntensityRange> range;
      if (!range_text.empty()) range = parse_range(range_text);
      export_heatmap(dump.field, parse_slice_plane(plane_text), image_path, range);
      std::cout << "wrote " << image_path << " (t = " << format_double(dump.t) << " s)\n";
    }
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOk;
}
