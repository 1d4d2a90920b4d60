#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "heatobs/anra.hpp"
#include "heatobs/disturbance.hpp"
#include "heatobs/heat_solver.hpp"
#include "heatobs/observer.hpp"
#include "heatobs/plant.hpp"
#include "heatobs/source.hpp"

namespace heatobs {

struct ObserverConfig {
  double a0_factor = 2.0;          // a0 = a0_factor * true diffusivity
  GainMode gain_mode = GainMode::Constant;
  double gain = 50.0;              // diagonal of G, 1/s
  double L = 0.5;
  AdaptationClock clock = AdaptationClock::PerSample;
  bool adaptive = true;
  double initial_temperature = 300.0;  // K
  InjectionScaling injection = InjectionScaling::Kronecker;
  bool report_gain_bound = true;
};

struct OutputConfig {
  bool frames = false;             // per-step surface frame CSVs
  std::size_t field_dump_every = 0;  // TF3D dumps every N steps, 0 = off
};

/// A full experiment, in SI units. The JSON form uses cm / s / W / K.
struct ScenarioConfig {
  Vec3 extents{0.04, 0.02, 0.02};
  double dx = 5e-4;
  SolverParams solver;
  double horizon = 2.0;
  MaterialProps material;
  BoundaryCondition bc = BoundaryCondition::insulated_top(300.0);
  double initial_temperature = 300.0;
  SourceSpec source;
  ShiftMode shift = ShiftMode::Nearest;
  std::vector<ProbeSegment> schedule;
  DisturbanceSpec disturbance;
  std::size_t sensor_stride = 1;
  double frame_noise = 0.0;
  AnraParams anra;
  std::size_t anra_decimation = 1;
  ObserverConfig observer;
  std::uint64_t seed = 0;
  OutputConfig output;

  Grid3 grid() const { return Grid3::tissue_block(extents, dx); }
  double true_diffusivity() const noexcept { return material.diffusivity(); }
};

/// Reads and validates a JSON scenario. Every error is a ConfigError whose
/// message starts with the JSON path of the offending field. The probe path
/// is checked against the domain eagerly.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& json_text, const std::string& origin = "<config>");

/// Builds the forward model described by a config.
PlantModel build_plant_model(const ScenarioConfig& cfg);

}  // namespace heatobs
