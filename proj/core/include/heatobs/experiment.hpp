#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heatobs/anra.hpp"
#include "heatobs/field_io.hpp"
#include "heatobs/observer.hpp"
#include "heatobs/plant.hpp"
#include "heatobs/scenario.hpp"

namespace heatobs {

/// First line of every metrics CSV. Bump the version when columns change.
inline constexpr const char* kMetricsSchema = "# heatobs metrics v1";
inline constexpr const char* kSweepSchema = "# heatobs sweep v1";

struct MetricsRow {
  double t = 0.0;                       // s
  double abar = 0.0;                    // m^2/s, diffusivity used by the observer over the next step
  double param_err = 0.0;               // |abar - a| / a
  EstimateStatus estimate_status = EstimateStatus::InsufficientHistory;
  std::optional<double> ahat;           // m^2/s, estimate produced at this level
  std::optional<double> ahat_raw;
  double valid_fraction = 0.0;
  AdaptationStatus adaptation = AdaptationStatus::Frozen;
  double err_inf = 0.0;                 // K
  double err_l2 = 0.0;                  // K m^{3/2}, trapezoid weights
  std::optional<GainBoundReport> bound; // per-sensor vector dropped before storing
  int gs_iterations = 0;                // observer solve ending at this level
};

std::string metrics_header();
void write_metrics_row(std::ostream& os, const MetricsRow& row);

/// One observer fed level by level. Used both when co-stepping with the
/// plant and when replaying a recorded trajectory, so the two paths agree
/// row for row.
class ObserverRun {
 public:
  ObserverRun(const ScenarioConfig& cfg, const PlantModel& model, const SensorSet& sensors, double L, bool adaptive);

  /// Level k of the plant: frame y_k, the power of the step that produced it
  /// and, when available, the true field for the error metrics. Advances the
  /// observer to the next level unless k is the last one.
  MetricsRow advance(const SurfaceFrame& y, double power, const ScalarField3D* truth);

  const ObserverState& state() const noexcept { return obs_; }
  double L() const noexcept { return law_.L; }

 private:
  const ScenarioConfig& cfg_;
  const PlantModel& model_;
  Observer observer_;
  AdaptationLaw law_;
  GainSchedule gains_;
  FrameHistory history_;
  ObserverState obs_;
  double a_true_;
  std::size_t steps_;
  std::size_t k_ = 0;
  int last_iterations_ = 0;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  double true_diffusivity = 0.0;
  double a0 = 0.0;
  double L = 0.0;
};

struct RunOptions {
  std::optional<double> L;           // overrides cfg.observer.L
  std::optional<bool> adaptive;      // overrides cfg.observer.adaptive
  std::optional<std::filesystem::path> out_dir;
};

/// Co-steps plant and observer. With an output directory, writes
/// metrics.csv, run_metadata.csv and the configured frame / field dumps as
/// the run progresses; a solver failure leaves everything up to the failing
/// level on disk.
ExperimentResult run_experiment(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Plant only. Writes plant.csv, frames/ and field dumps when given a directory.
PlantTrajectory simulate(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                         bool keep_fields = false);

/// Replays a recorded trajectory (fields required) to an observer with gain L.
ExperimentResult replay_observer(const ScenarioConfig& cfg, const PlantModel& model, const PlantTrajectory& traj,
                                 double L, bool adaptive);

struct SweepResult {
  std::vector<ExperimentResult> runs;  // in the order of the requested L values
};

/// Simulates the plant once and replays it to one observer per L, running
/// the observers concurrently. With an output directory, writes sweep.csv
/// keyed by L.
SweepResult sweep(const ScenarioConfig& cfg, const std::vector<double>& L_values,
                  const std::optional<std::filesystem::path>& out_dir = {}, std::size_t max_threads = 0);

void write_sweep_csv(std::ostream& os, const SweepResult& result);

struct OfflineEstimate {
  double t = 0.0;
  EstimateStatus status = EstimateStatus::InsufficientHistory;
  std::optional<DiffusivityEstimate> estimate;
};

/// Runs ANRA over a recorded frame sequence, one entry per frame.
std::vector<OfflineEstimate> estimate_offline(const std::vector<RecordedFrame>& frames, const AnraParams& params);
void write_estimates_csv(std::ostream& os, const std::vector<OfflineEstimate>& estimates);

}  // namespace heatobs
