#pragma once

#include <optional>
#include <span>
#include <vector>

#include "heatobs/heat_solver.hpp"
#include "heatobs/plant.hpp"
#include "heatobs/surface.hpp"

namespace heatobs {

struct ObserverState {
  ScalarField3D xhat;          // K
  double abar = 0.0;           // adapted diffusivity, m^2/s
  std::optional<double> ahat;  // latest accepted estimate
  double a0 = 0.0;             // initial guess, m^2/s
  double t = 0.0;
};

enum class GainMode {
  Constant,      // use the gains as given
  BoundChecked,  // also evaluate the lower bound each step and warn when violated
};

/// Diagonal of G(t), one entry per sensor (1/s with Kronecker injection).
struct GainSchedule {
  GainMode mode = GainMode::Constant;
  std::vector<double> gains;
  // Disturbance bounds consumed by BoundChecked mode.
  double eps_l2 = 0.0;
  double holder_c = 0.0;

  static GainSchedule constant(std::size_t sensors, double g);
};

// ---------------------------------------------------------------------------
// Gain lower bound

inline constexpr double kResidualFloor = 1e-3;  // K

struct GainBoundInputs {
  double eps_l2 = 0.0;
  double holder_c = 0.0;
  double diffusivity = 0.0;  // used in the Hoelder growth term
  double residual_floor = kResidualFloor;
};

struct GainBoundReport {
  double t = 0.0;
  double c_gamma = 0.0;           // Hoelder growth C_w/(n a) (exp(n a t) - 1)
  double bracket = 0.0;           // max over nodes of min over sensors [|r_j| + C_gamma |eta_j - eta|^{1/2}]
  std::vector<double> bounds;     // per sensor; NaN where |r_i| is below the floor
  std::size_t i_star = 0;         // argmax |r_i|
  double b_star = 0.0;            // bounds[i_star] (0 when vacuous)
  bool vacuous = false;           // every residual below the floor
  bool satisfied = false;         // gains[i_star] >= b_star, or vacuous
};

/// Hoelder growth term for an n = 3 domain; zero at t = 0.
double holder_growth(double holder_c, double diffusivity, double t);

/// Lower bound on the observer gain at each sensor:
///   b_i = eps_l2 m(Omega)^{1/2} r_i^{-2} * bracket.
/// The "at least one gain" condition is checked at i* = argmax |r_i|.
GainBoundReport gain_lower_bound(const SurfaceFrame& residual, double t, const GainBoundInputs& in,
                                 const Grid3& grid, const SensorSet& sensors, std::span<const double> gains = {});

// ---------------------------------------------------------------------------
// Observer

/// Adaptation of abar: d abar = L (ahat - abar) per unit of `clock`.
enum class AdaptationClock {
  Seconds,     // forward Euler in physical time: abar += dt L (ahat - abar)
  PerSample,   // one unit per estimator sample:   abar += L (ahat - abar)
};

struct AdaptationLaw {
  double L = 0.0;
  AdaptationClock clock = AdaptationClock::PerSample;
};

enum class AdaptationStatus { Applied, Frozen, Rejected };

struct AdaptationOutcome {
  ObserverState state;
  AdaptationStatus status = AdaptationStatus::Frozen;
};

/// Integral correction of the diffusivity toward a fresh estimate. Without an
/// estimate (window inactive) abar is frozen; estimates <= 0 are rejected and
/// logged. The update is a convex combination: L * step <= 1 is enforced
/// (ContractError otherwise).
AdaptationOutcome update_abar(const ObserverState& obs, std::optional<double> ahat_new, const AdaptationLaw& law,
                              double dt);

struct ObserverStepResult {
  ObserverState state;
  std::optional<GainBoundReport> bound;
  GsReport solver;
};

/// Surface-feedback Luenberger observer on the nominal model:
///   xhat' = abar lap(xhat) + T_p u q / (rho c_p) + C* G (y - C xhat)
/// The output injection is evaluated at the start of the step and enters the
/// Crank-Nicolson right-hand side explicitly.
class Observer {
 public:
  /// `adaptive` selects abar (true) or the fixed a0 (false) in the step.
  Observer(const PlantModel& nominal, SensorSet sensors, bool adaptive,
           InjectionScaling scaling = InjectionScaling::Kronecker);

  ObserverState initial_state(double temperature, double a0) const;
  ObserverState initial_state(ScalarField3D x0, double a0) const;

  /// `probe` is the probe state at the step midpoint, matching the plant.
  /// Throws ContractError if y is not timestamped at obs.t.
  ObserverStepResult step(const ObserverState& obs, const SurfaceFrame& y, const ProbeState& probe,
                          const GainSchedule& gains, const SolverParams& params) const;

  const SensorSet& sensors() const noexcept { return sensors_; }
  const HeatStepper& stepper() const noexcept { return stepper_; }
  bool adaptive() const noexcept { return adaptive_; }

 private:
  PlantModel model_;
  SensorSet sensors_;
  bool adaptive_;
  InjectionScaling scaling_;
  HeatStepper stepper_;
};

const char* to_string(AdaptationStatus s) noexcept;

}  // namespace heatobs
