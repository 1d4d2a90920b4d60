#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "heatobs/experiment.hpp"
#include "test_util.hpp"

using namespace heatobs;
using heatobs::testing::scratch_dir;

namespace {

const std::string kReferenceConfig = std::string(HEATOBS_SOURCE_DIR) + "/configs/two_cut.json";

// A short, small version of the reference scenario: one cut, then an idle period.
ScenarioConfig small_config() {
  ScenarioConfig cfg = load_config(kReferenceConfig);
  cfg.extents = {0.012, 0.008, 0.006};
  cfg.horizon = 0.4;
  cfg.schedule = {{0.0, 0.16, {0.004, 0.0, 0.0}, {0.01, 0.0, 0.0}, 5.0}};
  cfg.disturbance.holder_c = 200.0;  // smaller box, larger mode gradients
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_rows_equal(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::ostringstream sa, sb;
    write_metrics_row(sa, a[k]);
    write_metrics_row(sb, b[k]);
    EXPECT_EQ(sa.str(), sb.str()) << k;
  }
}

}  // namespace

TEST(Metrics, HeaderSchema) {
  EXPECT_STREQ(kMetricsSchema, "# heatobs metrics v1");
  EXPECT_EQ(metrics_header(),
            "t,abar,param_err,ahat,ahat_raw,valid_fraction,estimate_status,adaptation,err_inf,err_l2,"
            "c_gamma,b_star,i_star,gain_ok,vacuous,gs_iterations");
  MetricsRow row;
  std::ostringstream os;
  write_metrics_row(os, row);
  std::string line = os.str();
  if (!line.empty() && line.back() == '\n') line.pop_back();
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 15);
}

TEST(Experiment, RunIsByteDeterministic) {
  ScenarioConfig cfg = small_config();
  cfg.frame_noise = 0.02;
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  run_experiment(cfg, {std::nullopt, std::nullopt, a});
  run_experiment(cfg, {std::nullopt, std::nullopt, b});
  const std::string ma = slurp(a / "metrics.csv");
  ASSERT_FALSE(ma.empty());
  EXPECT_EQ(ma.rfind(kMetricsSchema, 0), 0u);
  EXPECT_EQ(ma, slurp(b / "metrics.csv"));
  EXPECT_EQ(slurp(a / "run_metadata.csv"), slurp(b / "run_metadata.csv"));
}

TEST(Experiment, OneRowPerLevel) {
  const ScenarioConfig cfg = small_config();
  const ExperimentResult r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 21u);
  for (std::size_t k = 0; k < r.rows.size(); ++k) EXPECT_NEAR(r.rows[k].t, 0.02 * k, 1e-12);
  EXPECT_EQ(r.rows.front().abar, r.a0);
  EXPECT_DOUBLE_EQ(r.a0, 2.0 * cfg.true_diffusivity());
  EXPECT_DOUBLE_EQ(r.rows.front().param_err, 1.0);
}

TEST(Experiment, SupNormDominatesL2) {
  const ScenarioConfig cfg = small_config();
  const double vol = cfg.grid().volume();
  for (const MetricsRow& row : run_experiment(cfg).rows) {
    EXPECT_GE(row.err_inf * (1.0 + 1e-12), row.err_l2 / std::sqrt(vol)) << row.t;
  }
}

TEST(Experiment, MatchedModelErrorIsNonIncreasing) {
  // With the true diffusivity, no adaptation and no disturbance the error only
  // starts from the initial mismatch and must not grow.
  ScenarioConfig cfg = small_config();
  cfg.disturbance.eps_l2 = 0.0;
  cfg.disturbance.holder_c = 0.0;
  cfg.observer.a0_factor = 1.0;
  cfg.observer.adaptive = false;
  cfg.observer.initial_temperature = 302.0;
  const ExperimentResult r = run_experiment(cfg);
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_LE(r.rows[k].err_inf, r.rows[k - 1].err_inf + 1e-6) << k;
}

TEST(Experiment, SweepMatchesIndividualRuns) {
  const ScenarioConfig cfg = small_config();
  const auto dir = scratch_dir("sweep");
  const SweepResult s = sweep(cfg, {0.5, 0.1, 0.5}, dir, 2);
  ASSERT_EQ(s.runs.size(), 3u);
  expect_rows_equal(s.runs[0].rows, s.runs[2].rows);
  expect_rows_equal(s.runs[0].rows, run_experiment(cfg, {0.5, std::nullopt, std::nullopt}).rows);
  expect_rows_equal(s.runs[1].rows, run_experiment(cfg, {0.1, std::nullopt, std::nullopt}).rows);
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(csv.rfind(kSweepSchema, 0), 0u);
}

TEST(Experiment, ReplayEqualsCoStepping) {
  const ScenarioConfig cfg = small_config();
  const PlantModel model = build_plant_model(cfg);
  const PlantTrajectory traj = simulate(cfg, std::nullopt, true);
  expect_rows_equal(replay_observer(cfg, model, traj, 0.3, true).rows, run_experiment(cfg, {0.3, std::nullopt, std::nullopt}).rows);
}

TEST(Experiment, ZeroGainKeepsInitialGuess) {
  const ExperimentResult r = run_experiment(small_config(), {0.0, std::nullopt, std::nullopt});
  for (const MetricsRow& row : r.rows) EXPECT_EQ(row.abar, r.a0);
}

TEST(Experiment, WritesConfiguredDumps) {
  ScenarioConfig cfg = small_config();
  cfg.horizon = 0.1;
  cfg.output.frames = true;
  cfg.output.field_dump_every = 2;
  const auto dir = scratch_dir("dumps");
  run_experiment(cfg, {std::nullopt, std::nullopt, dir});
  EXPECT_EQ(read_frame_dir(dir / "frames").size(), 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / "fields" / "plant_00004.tf3d"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fields" / "observer_00004.tf3d"));
  EXPECT_FALSE(std::filesystem::exists(dir / "fields" / "plant_00003.tf3d"));
}

TEST(Experiment, OfflineEstimatesMatchOnlineHistory) {
  ScenarioConfig cfg = small_config();
  cfg.output.frames = true;
  const auto dir = scratch_dir("offline");
  const PlantTrajectory traj = simulate(cfg, dir);
  const std::vector<RecordedFrame> frames = read_frame_dir(dir / "frames");
  ASSERT_EQ(frames.size(), traj.size());
  const std::vector<OfflineEstimate> est = estimate_offline(frames, cfg.anra);
  const ExperimentResult online = run_experiment(cfg);
  ASSERT_EQ(est.size(), online.rows.size());
  for (std::size_t k = 0; k < est.size(); ++k) {
    EXPECT_EQ(est[k].status, online.rows[k].estimate_status) << k;
    if (est[k].estimate && online.rows[k].ahat) {
      EXPECT_NEAR(est[k].estimate->ahat, *online.rows[k].ahat, 1e-9 * *online.rows[k].ahat);
    }
  }
}

// Surface temperature rise along the track of a Gaussian source moving in an
// insulated half space, up to a constant factor.
double moving_source_profile(double x, double t, const ProbeSegment& cut, double sigma, double a) {
  const int n = 20000;
  const double ds = (t - cut.t_start) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = cut.t_start + (i + 0.5) * ds;
    const double var = sigma * sigma + 2.0 * a * (t - s);
    const double d = x - (cut.start[0] + cut.velocity[0] * (s - cut.t_start));
    sum += std::pow(var, -1.5) * std::exp(-d * d / (2.0 * var));
  }
  return sum;
}

TEST(Experiment, ReferenceHotspotMatchesMovingSourceSolution) {
  const ScenarioConfig cfg = load_config(kReferenceConfig);
  const PlantTrajectory traj = simulate(cfg, std::nullopt);
  const std::size_t k = 97;  // t = 1.94 s
  ASSERT_NEAR(traj.times[k], 1.94, 1e-12);
  const SurfaceFrame& f = traj.frames[k];
  std::size_t best = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] > f.values[best]) best = i;
  }
  const double x = static_cast<double>(best % f.cols) * f.pitch;
  const double y = static_cast<double>(best / f.cols) * f.pitch - 0.5 * cfg.extents[1];

  double oracle_x = 0.0, peak = -1.0;
  for (double xs = 0.02; xs < 0.032; xs += 0.25 * cfg.dx) {
    const double v = moving_source_profile(xs, 1.94, cfg.schedule[1], cfg.source.sigma, cfg.true_diffusivity());
    if (v > peak) {
      peak = v;
      oracle_x = xs;
    }
  }
  // The peak trails the probe: diffusion is too slow to carry heat ahead of it.
  EXPECT_LT(oracle_x, traj.probes[k].p[0] - 2.0 * cfg.dx);
  EXPECT_NEAR(x, oracle_x, 2.0 * cfg.dx + 1e-12);
  EXPECT_NEAR(y, 0.0, 2.0 * cfg.dx + 1e-12);
  EXPECT_GT(f.values[best], 300.0);
}
