#include "heatobs/plant.hpp"

#include <cmath>

#include "heatobs/errors.hpp"

namespace heatobs {

void add_source_rate(ScalarField3D& rate, const PlantModel& model, const ProbeState& probe) {
  if (probe.u == 0.0) return;
  add_shifted_source(rate, model.source_kernel, probe.p, probe.u / model.material.heat_capacity(), model.shift);
}

Plant::Plant(PlantModel model) : model_(std::move(model)), stepper_(model_.grid, model_.bc) {
  model_.material.validate();
  model_.schedule.validate_within(model_.grid);
  if (model_.disturbance && !(model_.disturbance->grid() == model_.grid)) {
    throw ConfigError("disturbance was built for a different grid");
  }
}

PlantState Plant::initial_state(double temperature) const {
  return initial_state(ScalarField3D(model_.grid, temperature));
}

PlantState Plant::initial_state(ScalarField3D x0) const {
  if (!(x0.grid() == model_.grid)) throw ConfigError("initial field grid mismatch");
  if (!x0.all_finite()) throw ConfigError("initial field must be finite");
  apply_dirichlet(x0, stepper_.pins());
  return {std::move(x0), model_.schedule.at(0.0), 0.0};
}

PlantState Plant::step(const PlantState& state, const SolverParams& params, GsReport* report) const {
  const double t_mid = state.t + 0.5 * params.dt;
  ScalarField3D forcing(model_.grid, 0.0);
  add_source_rate(forcing, model_, model_.schedule.at(t_mid));
  if (model_.disturbance) model_.disturbance->add_to(forcing, t_mid);

  PlantState next;
  next.x = stepper_.step(state.x, model_.material.diffusivity(), forcing, params, report);
  next.t = state.t + params.dt;
  next.probe = model_.schedule.at(next.t);
  return next;
}

std::size_t step_count(double horizon, double dt) {
  if (!(horizon >= 0.0) || !(dt > 0.0)) throw ConfigError("horizon must be >= 0 and dt > 0");
  const double n = std::round(horizon / dt);
  if (std::abs(n * dt - horizon) > 1e-9 * std::max(1.0, horizon)) {
    throw ConfigError("horizon must be a whole number of time steps");
  }
  return static_cast<std::size_t>(n);
}

PlantTrajectory run_plant(const Plant& plant, const SensorSet& sensors, const PlantRunSpec& spec,
                          const SolverParams& params, const PlantObserverFn& on_level) {
  params.validate();
  sensors.validate_for(plant.model().grid);
  const std::size_t steps = step_count(spec.horizon, params.dt);

  std::mt19937_64 rng(spec.seed ^ 0x5eed'f4a3'0000'0001ULL);
  std::normal_distribution<double> noise(0.0, spec.frame_noise > 0.0 ? spec.frame_noise : 1.0);

  PlantTrajectory traj;
  PlantState state = plant.initial_state(spec.initial_temperature);
  auto record = [&](std::size_t k, double power) {
    SurfaceFrame frame = restrict_to_surface(state.x, sensors, state.t);
    if (spec.frame_noise > 0.0) {
      for (double& v : frame.values) v += noise(rng);
    }
    traj.times.push_back(state.t);
    traj.probes.push_back(state.probe);
    traj.frame_power.push_back(power);
    if (spec.keep_fields) traj.fields.push_back(state.x);
    if (on_level) on_level(k, state, frame, power);
    traj.frames.push_back(std::move(frame));
  };

  record(0, state.probe.u);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * params.dt;
    const double power = plant.model().schedule.at(t_prev + 0.5 * params.dt).u;
    GsReport rep;
    state.t = t_prev;
    state = plant.step(state, params, &rep);
    state.t = static_cast<double>(k) * params.dt;
    state.probe = plant.model().schedule.at(state.t);
    traj.solver.push_back(std::move(rep));
    record(k, power);
  }
  return traj;
}

}  // namespace heatobs
