#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "heatobs/disturbance.hpp"
#include "heatobs/heat_solver.hpp"
#include "heatobs/source.hpp"
#include "heatobs/surface.hpp"

namespace heatobs {

/// Everything that defines the forward tissue model apart from its state.
struct PlantModel {
  Grid3 grid;
  BoundaryCondition bc;
  MaterialProps material;
  ScalarField3D source_kernel;  // from build_source
  ShiftMode shift = ShiftMode::Nearest;
  ProbeSchedule schedule;
  std::optional<DisturbanceGen> disturbance;
};

struct PlantState {
  ScalarField3D x;   // K
  ProbeState probe;
  double t = 0.0;    // s
};

/// Heat input T_p u q / (rho c_p) at time t, in K/s. The probe power is in
/// W and q integrates to one, so dividing by the volumetric heat capacity
/// turns deposited power density into a temperature rate.
void add_source_rate(ScalarField3D& rate, const PlantModel& model, const ProbeState& probe);

class Plant {
 public:
  explicit Plant(PlantModel model);

  const PlantModel& model() const noexcept { return model_; }
  const HeatStepper& stepper() const noexcept { return stepper_; }

  PlantState initial_state(double temperature) const;
  PlantState initial_state(ScalarField3D x0) const;

  /// Source and disturbance are evaluated at the step midpoint; the probe
  /// state is advanced to t + dt.
  PlantState step(const PlantState& state, const SolverParams& params, GsReport* report = nullptr) const;

 private:
  PlantModel model_;
  HeatStepper stepper_;
};

inline PlantState step_plant(const Plant& plant, const PlantState& state, const SolverParams& params) {
  return plant.step(state, params);
}

struct PlantRunSpec {
  double horizon = 2.0;              // s
  double initial_temperature = 300;  // K
  std::size_t sensor_stride = 1;
  double frame_noise = 0.0;          // K, std-dev of additive thermographer noise; 0 disables
  std::uint64_t seed = 0;
  bool keep_fields = true;
};

/// Recorded plant run: one entry per time level t_k = k dt, k = 0..N.
struct PlantTrajectory {
  std::vector<double> times;
  std::vector<ScalarField3D> fields;    // empty when keep_fields is false
  std::vector<SurfaceFrame> frames;
  std::vector<double> frame_power;      // W applied over the step ending at t_k
  std::vector<ProbeState> probes;
  std::vector<GsReport> solver;         // per step, size N

  std::size_t size() const noexcept { return times.size(); }
};

/// Called after each recorded time level; lets callers stream outputs so a
/// solver failure still leaves the frames written so far.
using PlantObserverFn = std::function<void(std::size_t k, const PlantState&, const SurfaceFrame&, double power)>;

/// Number of steps for a horizon; the horizon must be a whole number of steps
/// to within 1e-9 relative.
std::size_t step_count(double horizon, double dt);

PlantTrajectory run_plant(const Plant& plant, const SensorSet& sensors, const PlantRunSpec& spec,
                          const SolverParams& params, const PlantObserverFn& on_level = {});

}  // namespace heatobs
