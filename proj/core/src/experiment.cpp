#include "heatobs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include "heatobs/errors.hpp"
#include "heatobs/field_io.hpp"
#include "heatobs/log.hpp"

namespace heatobs {
namespace {

namespace fs = std::filesystem;

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string numbered(const char* stem, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05zu.%s", stem, k, ext);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

PlantRunSpec run_spec(const ScenarioConfig& cfg, bool keep_fields) {
  PlantRunSpec spec;
  spec.horizon = cfg.horizon;
  spec.initial_temperature = cfg.initial_temperature;
  spec.sensor_stride = cfg.sensor_stride;
  spec.frame_noise = cfg.frame_noise;
  spec.seed = cfg.seed;
  spec.keep_fields = keep_fields;
  return spec;
}

void write_metadata(const fs::path& path, const ScenarioConfig& cfg, const PlantModel& model, double L,
                    bool adaptive) {
  std::ofstream os = open_out(path);
  const Grid3& g = model.grid;
  os << "key,value\n";
  os << "nodes_x," << g.count(0) << "\nnodes_y," << g.count(1) << "\nnodes_z," << g.count(2) << '\n';
  os << "dx_m," << format_double(g.spacing()) << '\n';
  os << "dt_s," << format_double(cfg.solver.dt) << '\n';
  os << "steps," << step_count(cfg.horizon, cfg.solver.dt) << '\n';
  os << "diffusivity_m2_s," << format_double(cfg.true_diffusivity()) << '\n';
  os << "a0_m2_s," << format_double(cfg.observer.a0_factor * cfg.true_diffusivity()) << '\n';
  os << "L," << format_double(L) << '\n';
  os << "adaptive," << (adaptive ? "true" : "false") << '\n';
  os << "adaptation_clock," << (cfg.observer.clock == AdaptationClock::PerSample ? "per_sample" : "seconds") << '\n';
  os << "gain," << format_double(cfg.observer.gain) << '\n';
  os << "seed," << cfg.seed << '\n';
  os << "eps_l2," << format_double(cfg.disturbance.eps_l2) << '\n';
  os << "holder_c," << format_double(cfg.disturbance.holder_c) << '\n';
  if (model.disturbance) {
    os << "certified_l2," << format_double(model.disturbance->certified_l2()) << '\n';
    os << "certified_holder," << format_double(model.disturbance->certified_holder()) << '\n';
  }
  os << "sensors," << SensorSet::top_face(g, cfg.sensor_stride).size() << '\n';
}

}  // namespace

std::string metrics_header() {
  return "t,abar,param_err,ahat,ahat_raw,valid_fraction,estimate_status,adaptation,err_inf,err_l2,"
         "c_gamma,b_star,i_star,gain_ok,vacuous,gs_iterations";
}

void write_metrics_row(std::ostream& os, const MetricsRow& r) {
  os << format_double(r.t) << ',' << format_double(r.abar) << ',' << format_double(r.param_err) << ','
     << opt(r.ahat) << ',' << opt(r.ahat_raw) << ',' << format_double(r.valid_fraction) << ','
     << to_string(r.estimate_status) << ',' << to_string(r.adaptation) << ',' << format_double(r.err_inf) << ','
     << format_double(r.err_l2) << ',';
  if (r.bound) {
    os << format_double(r.bound->c_gamma) << ',' << format_double(r.bound->b_star) << ',' << r.bound->i_star << ','
       << (r.bound->satisfied ? 1 : 0) << ',' << (r.bound->vacuous ? 1 : 0);
  } else {
    os << ",,,,";
  }
  os << ',' << r.gs_iterations << '\n';
}

// ---------------------------------------------------------------------------

ObserverRun::ObserverRun(const ScenarioConfig& cfg, const PlantModel& model, const SensorSet& sensors, double L,
                         bool adaptive)
    : cfg_(cfg),
      model_(model),
      observer_(model, sensors, adaptive, cfg.observer.injection),
      law_{adaptive ? L : 0.0, cfg.observer.clock},
      gains_(GainSchedule::constant(sensors.size(), cfg.observer.gain)),
      history_(cfg.anra.history),
      a_true_(cfg.true_diffusivity()),
      steps_(step_count(cfg.horizon, cfg.solver.dt)) {
  if (!(L >= 0.0)) throw ConfigError("adaptation gain L must be >= 0");
  const double sample = static_cast<double>(cfg.anra_decimation) * cfg.solver.dt;
  if (law_.L * (law_.clock == AdaptationClock::Seconds ? sample : 1.0) > 1.0) {
    throw ConfigError("adaptation gain L too large: L * step must not exceed 1");
  }
  gains_.mode = cfg.observer.gain_mode;
  gains_.eps_l2 = cfg.disturbance.eps_l2;
  gains_.holder_c = cfg.disturbance.holder_c;
  obs_ = observer_.initial_state(cfg.observer.initial_temperature, cfg.observer.a0_factor * a_true_);
}

MetricsRow ObserverRun::advance(const SurfaceFrame& y, double power, const ScalarField3D* truth) {
  if (k_ > steps_) throw ContractError("observer run advanced past the horizon");
  const double dt = cfg_.solver.dt;
  const double sample = static_cast<double>(cfg_.anra_decimation) * dt;

  MetricsRow row;
  row.t = obs_.t;

  std::optional<double> fresh;
  if (k_ % cfg_.anra_decimation == 0) {
    history_.push(y, power);
    const EstimateResult est = estimate_diffusivity(history_, cfg_.anra);
    row.estimate_status = est.status;
    if (est.estimate) {
      row.ahat = est.estimate->ahat;
      row.ahat_raw = est.estimate->ahat_raw;
      row.valid_fraction = est.estimate->valid_fraction;
      fresh = est.estimate->ahat;
    }
  }
  if (observer_.adaptive()) {
    AdaptationOutcome upd = update_abar(obs_, fresh, law_, sample);
    obs_ = std::move(upd.state);
    row.adaptation = upd.status;
  }
  const double a_used = observer_.adaptive() ? obs_.abar : obs_.a0;
  row.abar = a_used;
  row.param_err = std::abs(a_used - a_true_) / a_true_;

  if (truth) {
    ScalarField3D e = *truth;
    e -= obs_.xhat;
    row.err_inf = e.max_abs();
    row.err_l2 = e.l2_norm();
  }

  const bool checked = gains_.mode == GainMode::BoundChecked;
  if (cfg_.observer.report_gain_bound || checked) {
    const SurfaceFrame r = residual(y, restrict_to_surface(obs_.xhat, observer_.sensors(), obs_.t));
    const GainBoundInputs in{gains_.eps_l2, gains_.holder_c, a_used, kResidualFloor};
    GainBoundReport rep = gain_lower_bound(r, obs_.t, in, model_.grid, observer_.sensors(), gains_.gains);
    if (checked && !rep.satisfied) {
      warn("observer gain " + format_double(gains_.gains[rep.i_star]) + " below its lower bound " +
           format_double(rep.b_star) + " at t = " + format_double(obs_.t) + " s");
    }
    rep.bounds.clear();
    row.bound = std::move(rep);
  }
  row.gs_iterations = last_iterations_;

  if (k_ < steps_) {
    GainSchedule g = gains_;
    g.mode = GainMode::Constant;  // already checked above
    const ProbeState mid = model_.schedule.at(obs_.t + 0.5 * dt);
    ObserverStepResult res = observer_.step(obs_, y, mid, g, cfg_.solver);
    obs_ = std::move(res.state);
    obs_.t = static_cast<double>(k_ + 1) * dt;
    last_iterations_ = res.solver.iterations;
  }
  ++k_;
  return row;
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ScenarioConfig& cfg, const RunOptions& opts) {
  const PlantModel model = build_plant_model(cfg);
  const Plant plant(model);
  const SensorSet sensors = SensorSet::top_face(model.grid, cfg.sensor_stride);
  const double L = opts.L.value_or(cfg.observer.L);
  const bool adaptive = opts.adaptive.value_or(cfg.observer.adaptive);

  ExperimentResult result;
  result.true_diffusivity = cfg.true_diffusivity();
  result.a0 = cfg.observer.a0_factor * result.true_diffusivity;
  result.L = adaptive ? L : 0.0;

  std::ofstream metrics;
  const std::size_t dump_every = cfg.output.field_dump_every;
  if (opts.out_dir) {
    fs::create_directories(*opts.out_dir);
    if (cfg.output.frames) fs::create_directories(*opts.out_dir / "frames");
    if (dump_every > 0) fs::create_directories(*opts.out_dir / "fields");
    write_metadata(*opts.out_dir / "run_metadata.csv", cfg, model, result.L, adaptive);
    metrics = open_out(*opts.out_dir / "metrics.csv");
    metrics << kMetricsSchema << '\n' << metrics_header() << '\n';
  }

  ObserverRun run(cfg, model, sensors, L, adaptive);
  auto on_level = [&](std::size_t k, const PlantState& state, const SurfaceFrame& frame, double power) {
    if (opts.out_dir && dump_every > 0 && k % dump_every == 0) {
      write_tf3d(*opts.out_dir / "fields" / numbered("plant", k, "tf3d"), state.x, state.t);
      write_tf3d(*opts.out_dir / "fields" / numbered("observer", k, "tf3d"), run.state().xhat, run.state().t);
    }
    if (opts.out_dir && cfg.output.frames) {
      write_frame_csv(*opts.out_dir / "frames" / numbered("frame", k, "csv"), frame, power);
    }
    MetricsRow row = run.advance(frame, power, &state.x);
    if (metrics.is_open()) {
      write_metrics_row(metrics, row);
      metrics.flush();
    }
    result.rows.push_back(std::move(row));
  };
  run_plant(plant, sensors, run_spec(cfg, false), cfg.solver, on_level);
  return result;
}

PlantTrajectory simulate(const ScenarioConfig& cfg, const std::optional<fs::path>& out_dir, bool keep_fields) {
  const PlantModel model = build_plant_model(cfg);
  const Plant plant(model);
  const SensorSet sensors = SensorSet::top_face(model.grid, cfg.sensor_stride);

  std::ofstream summary;
  if (out_dir) {
    fs::create_directories(*out_dir / "frames");
    if (cfg.output.field_dump_every > 0) fs::create_directories(*out_dir / "fields");
    write_metadata(*out_dir / "run_metadata.csv", cfg, model, 0.0, false);
    summary = open_out(*out_dir / "plant.csv");
    summary << "# heatobs plant v1\n";
    summary << "t,power_W,probe_x,probe_y,probe_z,max_T,surface_max_T\n";
  }
  auto on_level = [&](std::size_t k, const PlantState& state, const SurfaceFrame& frame, double power) {
    if (!out_dir) return;
    write_frame_csv(*out_dir / "frames" / numbered("frame", k, "csv"), frame, power);
    if (cfg.output.field_dump_every > 0 && k % cfg.output.field_dump_every == 0) {
      write_tf3d(*out_dir / "fields" / numbered("plant", k, "tf3d"), state.x, state.t);
    }
    const auto vals = state.x.values();
    summary << format_double(state.t) << ',' << format_double(power) << ',' << format_double(state.probe.p[0]) << ','
            << format_double(state.probe.p[1]) << ',' << format_double(state.probe.p[2]) << ','
            << format_double(*std::max_element(vals.begin(), vals.end())) << ','
            << format_double(*std::max_element(frame.values.begin(), frame.values.end())) << '\n';
    summary.flush();
  };
  return run_plant(plant, sensors, run_spec(cfg, keep_fields), cfg.solver, on_level);
}

ExperimentResult replay_observer(const ScenarioConfig& cfg, const PlantModel& model, const PlantTrajectory& traj,
                                 double L, bool adaptive) {
  if (traj.fields.size() != traj.size()) throw ContractError("replay needs a trajectory with stored fields");
  const SensorSet sensors = SensorSet::top_face(model.grid, cfg.sensor_stride);
  ObserverRun run(cfg, model, sensors, L, adaptive);
  ExperimentResult result;
  result.true_diffusivity = cfg.true_diffusivity();
  result.a0 = cfg.observer.a0_factor * result.true_diffusivity;
  result.L = adaptive ? L : 0.0;
  result.rows.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    result.rows.push_back(run.advance(traj.frames[k], traj.frame_power[k], &traj.fields[k]));
  }
  return result;
}

SweepResult sweep(const ScenarioConfig& cfg, const std::vector<double>& L_values,
                  const std::optional<fs::path>& out_dir, std::size_t max_threads) {
  if (L_values.empty()) throw ConfigError("sweep needs at least one L value");
  for (double L : L_values) {
    if (!(L >= 0.0) || !std::isfinite(L)) throw ConfigError("sweep L values must be finite and >= 0");
  }
  const PlantModel model = build_plant_model(cfg);
  const PlantTrajectory traj = simulate(cfg, std::nullopt, true);

  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
  SweepResult out;
  out.runs.resize(L_values.size());
  // Observers only read the shared trajectory; each writes its own slot.
  for (std::size_t first = 0; first < L_values.size(); first += max_threads) {
    const std::size_t last = std::min(L_values.size(), first + max_threads);
    std::vector<std::future<ExperimentResult>> jobs;
    for (std::size_t i = first; i < last; ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return replay_observer(cfg, model, traj, L_values[i], cfg.observer.adaptive);
      }));
    }
    for (std::size_t i = first; i < last; ++i) out.runs[i] = jobs[i - first].get();
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    std::ofstream os = open_out(*out_dir / "sweep.csv");
    write_sweep_csv(os, out);
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << kSweepSchema << '\n' << "L," << metrics_header() << '\n';
  for (const auto& run : result.runs) {
    for (const auto& row : run.rows) {
      os << format_double(run.L) << ',';
      write_metrics_row(os, row);
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<OfflineEstimate> estimate_offline(const std::vector<RecordedFrame>& frames, const AnraParams& params) {
  FrameHistory history(params.history);
  std::vector<OfflineEstimate> out;
  out.reserve(frames.size());
  for (const auto& rf : frames) {
    history.push(rf.frame, rf.power);
    EstimateResult r = estimate_diffusivity(history, params);
    out.push_back({rf.frame.t, r.status, r.estimate});
  }
  return out;
}

void write_estimates_csv(std::ostream& os, const std::vector<OfflineEstimate>& estimates) {
  os << "# heatobs estimates v1\n";
  os << "t,status,ahat,ahat_raw,valid_fraction\n";
  for (const auto& e : estimates) {
    os << format_double(e.t) << ',' << to_string(e.status) << ',';
    if (e.estimate) {
      os << format_double(e.estimate->ahat) << ',' << format_double(e.estimate->ahat_raw) << ','
         << format_double(e.estimate->valid_fraction);
    } else {
      os << ",,";
    }
    os << '\n';
  }
}

}  // namespace heatobs
