#include <gtest/gtest.h>

#include <cmath>

#include "heatobs/errors.hpp"
#include "heatobs/plant.hpp"
#include "test_util.hpp"

using namespace heatobs;

namespace {

PlantModel reference_model() {
  PlantModel m;
  m.grid = Grid3::tissue_block({0.04, 0.02, 0.02}, 5e-4);
  m.bc = BoundaryCondition::insulated_top(300.0);
  m.source_kernel = build_source(SourceSpec{1e-3}, m.grid);
  m.schedule = ProbeSchedule({{0.0, 0.75, {0.01, 0, 0}, {0.01, 0, 0}, 30.0},
                              {1.25, 2.0, {0.0225, 0, 0}, {0.01, 0, 0}, 30.0}});
  return m;
}

PlantModel small_model(ProbeSchedule schedule, BoundaryCondition bc) {
  PlantModel m;
  m.grid = Grid3::tissue_block({0.012, 0.008, 0.008}, 5e-4);
  m.bc = bc;
  m.source_kernel = build_source(SourceSpec{1e-3}, m.grid);
  m.schedule = std::move(schedule);
  return m;
}

}  // namespace

TEST(Plant, IdleProbeKeepsConstantState) {
  const Plant plant(small_model(ProbeSchedule({{0.0, 1.0, {0.006, 0, -0.004}, {}, 0.0}}),
                                BoundaryCondition::insulated_top(300.0)));
  PlantState s = plant.initial_state(300.0);
  for (int k = 0; k < 5; ++k) s = plant.step(s, SolverParams{});
  for (double v : s.x.values()) EXPECT_EQ(v, 300.0);
  EXPECT_NEAR(s.t, 0.1, 1e-15);
}

TEST(Plant, FirstStepHotspotAtProbeNode) {
  const Plant plant(reference_model());
  const PlantState s = plant.step(plant.initial_state(300.0), SolverParams{});
  const Index3 hot = plant.model().grid.unravel(s.x.argmax());
  EXPECT_EQ(hot, plant.model().grid.nearest_node({0.0102, 0.0, 0.0}));
  EXPECT_NEAR(s.probe.p[0], 0.0102, 1e-15);
  EXPECT_GT(s.x.values()[s.x.argmax()], 300.0);
}

TEST(Plant, EnergyAuditWithInsulatedBox) {
  const Plant plant(small_model(ProbeSchedule({{0.0, 1.0, {0.006, 0.0, -0.004}, {}, 30.0}}),
                                BoundaryCondition::all_neumann()));
  const SolverParams p;
  const PlantState s0 = plant.initial_state(300.0);
  const PlantState s1 = plant.step(s0, p);
  const double rho_cp = plant.model().material.heat_capacity();
  const double deposited = (s1.x.integral() - s0.x.integral()) * rho_cp;
  const double expected = 30.0 * p.dt;
  EXPECT_NEAR(deposited, expected, 0.02 * expected);
}

TEST(Plant, SourceRateScalesWithHeatCapacity) {
  PlantModel m = small_model(ProbeSchedule({{0.0, 1.0, {0.006, 0.0, -0.004}, {}, 30.0}}),
                             BoundaryCondition::all_neumann());
  ScalarField3D r1(m.grid);
  add_source_rate(r1, m, m.schedule.at(0.1));
  m.material.specific_heat *= 2.0;
  ScalarField3D r2(m.grid);
  add_source_rate(r2, m, m.schedule.at(0.1));
  EXPECT_NEAR(r1.max_abs(), 2.0 * r2.max_abs(), 1e-9 * r1.max_abs());
  // Faces 4 sigma away cut a little of the kernel, so compare with the shifted kernel itself.
  const ScalarField3D shifted = shift_source(m.source_kernel, m.schedule.at(0.1).p, m.grid);
  EXPECT_NEAR(r1.integral() * MaterialProps{}.heat_capacity(), 30.0 * shifted.integral(), 1e-12 * 30.0);
  EXPECT_NEAR(shifted.integral(), 1.0, 1e-3);
}

TEST(Plant, TrajectoryShapeForReferenceHorizon) {
  PlantModel m = small_model(ProbeSchedule({{0.0, 0.5, {0.004, 0.0, 0.0}, {0.004, 0, 0}, 10.0}}),
                             BoundaryCondition::insulated_top(300.0));
  const Plant plant(std::move(m));
  const SensorSet sensors = SensorSet::top_face(plant.model().grid);
  const PlantTrajectory traj = run_plant(plant, sensors, PlantRunSpec{}, SolverParams{});
  ASSERT_EQ(traj.size(), 101u);
  EXPECT_EQ(traj.frames.size(), 101u);
  EXPECT_EQ(traj.fields.size(), 101u);
  EXPECT_EQ(traj.solver.size(), 100u);
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(traj.times.back(), 2.0);
  EXPECT_EQ(traj.frame_power[0], 10.0);
  EXPECT_EQ(traj.frame_power[25], 10.0);  // step [0.48, 0.5)
  EXPECT_EQ(traj.frame_power[26], 0.0);
  for (std::size_t k = 0; k < traj.size(); ++k) EXPECT_NEAR(traj.frames[k].t, 0.02 * k, 1e-12);
}

TEST(Plant, ZeroPowerScheduleGivesFlatFrames) {
  const Plant plant(small_model(ProbeSchedule({{0.0, 2.0, {0.004, 0.0, 0.0}, {0.002, 0, 0}, 0.0}}),
                                BoundaryCondition::insulated_top(300.0)));
  PlantRunSpec spec;
  spec.horizon = 0.4;
  const PlantTrajectory traj = run_plant(plant, SensorSet::top_face(plant.model().grid), spec, SolverParams{});
  for (const auto& f : traj.frames) {
    for (double v : f.values) EXPECT_EQ(v, 300.0);
  }
}

TEST(Plant, DeterministicWithNoiseAndDisturbance) {
  PlantModel m = small_model(ProbeSchedule({{0.0, 0.2, {0.004, 0.0, 0.0}, {0.01, 0, 0}, 10.0}}),
                             BoundaryCondition::insulated_top(300.0));
  DisturbanceSpec ds;
  ds.eps_l2 = 1e-3;
  ds.holder_c = 150.0;  // small box
  ds.seed = 3;
  m.disturbance.emplace(ds, m.grid);
  const Plant plant(std::move(m));
  PlantRunSpec spec;
  spec.horizon = 0.3;
  spec.frame_noise = 0.05;
  spec.seed = 9;
  const SensorSet s = SensorSet::top_face(plant.model().grid);
  const PlantTrajectory a = run_plant(plant, s, spec, SolverParams{});
  const PlantTrajectory b = run_plant(plant, s, spec, SolverParams{});
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.frames[k].values, b.frames[k].values);
  // Noise only touches frames, never the state.
  const SurfaceFrame clean = restrict_to_surface(a.fields.back(), s);
  double diff = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) diff = std::max(diff, std::abs(clean.values[i] - a.frames.back().values[i]));
  EXPECT_GT(diff, 0.0);
  EXPECT_LT(diff, 1.0);
}

TEST(Plant, StreamsLevelsToCallback) {
  const Plant plant(small_model(ProbeSchedule({{0.0, 0.2, {0.004, 0.0, 0.0}, {0.01, 0, 0}, 10.0}}),
                                BoundaryCondition::insulated_top(300.0)));
  PlantRunSpec spec;
  spec.horizon = 0.1;
  spec.keep_fields = false;
  std::vector<std::size_t> seen;
  const PlantTrajectory traj = run_plant(plant, SensorSet::top_face(plant.model().grid), spec, SolverParams{},
                                         [&](std::size_t k, const PlantState&, const SurfaceFrame&, double) {
                                           seen.push_back(k);
                                         });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_TRUE(traj.fields.empty());
}

TEST(Plant, StepCountRequiresWholeSteps) {
  EXPECT_EQ(step_count(2.0, 0.02), 100u);
  EXPECT_THROW(step_count(2.01, 0.02), ConfigError);
}

TEST(Plant, ScheduleOutsideDomainIsRejected) {
  PlantModel m = small_model(ProbeSchedule({{0.0, 2.0, {0.004, 0.0, 0.0}, {0.01, 0, 0}, 10.0}}),
                             BoundaryCondition::insulated_top(300.0));
  EXPECT_THROW(Plant{m}, ScheduleError);
}
