#include "heatobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "heatobs/errors.hpp"
#include "heatobs/log.hpp"

namespace heatobs {

GainSchedule GainSchedule::constant(std::size_t sensors, double g) {
  if (!(g > 0.0)) throw ConfigError("observer gain must be positive");
  GainSchedule s;
  s.gains.assign(sensors, g);
  return s;
}

double holder_growth(double holder_c, double diffusivity, double t) {
  if (!(diffusivity > 0.0)) throw ContractError("diffusivity must be positive");
  constexpr double n = Grid3::dimension();
  return holder_c / (n * diffusivity) * std::expm1(n * diffusivity * t);
}

namespace {

// max over grid nodes of min over sensors of |r_j| + c_gamma * dist^{1/2}.
// Sensors form a regular lattice on the top face, so for each node the
// search walks outward in square rings around the nearest sensor and stops
// once no farther sensor can beat the current minimum.
double bracket_term(const std::vector<double>& abs_res, double c_gamma, const Grid3& grid, const SensorSet& sensors) {
  const double r_min = *std::min_element(abs_res.begin(), abs_res.end());
  if (c_gamma == 0.0) return r_min;

  const auto rows = static_cast<std::ptrdiff_t>(sensors.rows());
  const auto cols = static_cast<std::ptrdiff_t>(sensors.cols());
  const auto stride = static_cast<std::ptrdiff_t>(sensors.stride());
  const double pitch = sensors.pitch();
  const double h = grid.spacing();
  const auto top = static_cast<std::ptrdiff_t>(grid.count(2) - 1);
  const std::ptrdiff_t max_ring = std::max(rows, cols);

  double worst = 0.0;
  const auto& c = grid.counts();
  for (std::size_t i = 0; i < c[0]; ++i) {
    for (std::size_t j = 0; j < c[1]; ++j) {
      const std::ptrdiff_t c0 = std::clamp<std::ptrdiff_t>((static_cast<std::ptrdiff_t>(i) + stride / 2) / stride, 0, cols - 1);
      const std::ptrdiff_t r0 = std::clamp<std::ptrdiff_t>((static_cast<std::ptrdiff_t>(j) + stride / 2) / stride, 0, rows - 1);
      for (std::size_t k = 0; k < c[2]; ++k) {
        const double dz = static_cast<double>(top - static_cast<std::ptrdiff_t>(k)) * h;
        double best = std::numeric_limits<double>::infinity();
        for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
          const double lat = std::max(0.0, static_cast<double>(ring) - 0.5) * pitch;
          if (r_min + c_gamma * std::sqrt(std::sqrt(lat * lat + dz * dz)) >= best) break;
          for (std::ptrdiff_t dr = -ring; dr <= ring; ++dr) {
            const std::ptrdiff_t r = r0 + dr;
            if (r < 0 || r >= rows) continue;
            const bool edge_row = (dr == -ring || dr == ring);
            for (std::ptrdiff_t dc = -ring; dc <= ring; dc += edge_row ? 1 : 2 * std::max<std::ptrdiff_t>(ring, 1)) {
              const std::ptrdiff_t col = c0 + dc;
              if (col < 0 || col >= cols) continue;
              const double dx = static_cast<double>(col * stride - static_cast<std::ptrdiff_t>(i)) * h;
              const double dy = static_cast<double>(r * stride - static_cast<std::ptrdiff_t>(j)) * h;
              const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
              best = std::min(best, abs_res[static_cast<std::size_t>(r * cols + col)] + c_gamma * std::sqrt(d));
              if (ring == 0) break;
            }
          }
        }
        worst = std::max(worst, best);
      }
    }
  }
  return worst;
}

}  // namespace

GainBoundReport gain_lower_bound(const SurfaceFrame& residual, double t, const GainBoundInputs& in, const Grid3& grid,
                                 const SensorSet& sensors, std::span<const double> gains) {
  sensors.validate_for(grid);
  if (residual.size() != sensors.size()) throw ContractError("residual must have one entry per sensor");
  if (!gains.empty() && gains.size() != sensors.size()) throw ContractError("gains must have one entry per sensor");

  GainBoundReport rep;
  rep.t = t;
  rep.c_gamma = holder_growth(in.holder_c, in.diffusivity, t);

  std::vector<double> abs_res(residual.size());
  std::transform(residual.values.begin(), residual.values.end(), abs_res.begin(), [](double v) { return std::abs(v); });
  rep.i_star = static_cast<std::size_t>(std::max_element(abs_res.begin(), abs_res.end()) - abs_res.begin());
  rep.bounds.assign(abs_res.size(), std::numeric_limits<double>::quiet_NaN());

  if (abs_res[rep.i_star] <= in.residual_floor) {
    rep.vacuous = true;
    rep.satisfied = true;
    return rep;
  }

  rep.bracket = bracket_term(abs_res, rep.c_gamma, grid, sensors);
  const double prefactor = in.eps_l2 * std::sqrt(grid.volume()) * rep.bracket;
  for (std::size_t i = 0; i < abs_res.size(); ++i) {
    if (abs_res[i] > in.residual_floor) rep.bounds[i] = prefactor / (abs_res[i] * abs_res[i]);
  }
  rep.b_star = rep.bounds[rep.i_star];
  rep.satisfied = !gains.empty() && gains[rep.i_star] >= rep.b_star;
  return rep;
}

// ---------------------------------------------------------------------------

AdaptationOutcome update_abar(const ObserverState& obs, std::optional<double> ahat_new, const AdaptationLaw& law,
                              double dt) {
  if (!(law.L >= 0.0) || !std::isfinite(law.L)) throw ContractError("adaptation gain L must be >= 0");
  const double unit = law.clock == AdaptationClock::Seconds ? dt : 1.0;
  if (law.L * unit > 1.0) throw ContractError("adaptation step L * step must not exceed 1");

  AdaptationOutcome out{obs, AdaptationStatus::Frozen};
  if (!ahat_new) return out;
  if (!(*ahat_new > 0.0) || !std::isfinite(*ahat_new)) {
    std::ostringstream msg;
    msg << "rejected diffusivity estimate " << *ahat_new << " m^2/s at t = " << obs.t << " s";
    warn(msg.str());
    out.status = AdaptationStatus::Rejected;
    return out;
  }
  out.state.ahat = ahat_new;
  out.state.abar = obs.abar + unit * law.L * (*ahat_new - obs.abar);
  out.status = AdaptationStatus::Applied;
  return out;
}

// ---------------------------------------------------------------------------

Observer::Observer(const PlantModel& nominal, SensorSet sensors, bool adaptive, InjectionScaling scaling)
    : model_(nominal), sensors_(std::move(sensors)), adaptive_(adaptive), scaling_(scaling),
      stepper_(model_.grid, model_.bc) {
  model_.disturbance.reset();
  model_.material.validate();
  sensors_.validate_for(model_.grid);
}

ObserverState Observer::initial_state(double temperature, double a0) const {
  return initial_state(ScalarField3D(model_.grid, temperature), a0);
}

ObserverState Observer::initial_state(ScalarField3D x0, double a0) const {
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw ConfigError("initial diffusivity guess must be positive");
  if (!(x0.grid() == model_.grid)) throw ConfigError("observer initial field grid mismatch");
  apply_dirichlet(x0, stepper_.pins());
  ObserverState s;
  s.xhat = std::move(x0);
  s.abar = a0;
  s.a0 = a0;
  return s;
}

ObserverStepResult Observer::step(const ObserverState& obs, const SurfaceFrame& y, const ProbeState& probe,
                                  const GainSchedule& gains, const SolverParams& params) const {
  if (std::abs(y.t - obs.t) > 1e-9) throw ContractError("output frame is not timestamped at the observer time");
  if (!(obs.abar > 0.0)) throw ContractError("adapted diffusivity must stay positive");

  const SurfaceFrame r = residual(y, restrict_to_surface(obs.xhat, sensors_, obs.t));

  ObserverStepResult out;
  if (gains.mode == GainMode::BoundChecked) {
    const GainBoundInputs in{gains.eps_l2, gains.holder_c, adaptive_ ? obs.abar : obs.a0, kResidualFloor};
    out.bound = gain_lower_bound(r, obs.t, in, model_.grid, sensors_, gains.gains);
    if (!out.bound->satisfied) {
      std::ostringstream msg;
      msg << "observer gain " << gains.gains[out.bound->i_star] << " below its lower bound " << out.bound->b_star
          << " at t = " << obs.t << " s (sensor " << out.bound->i_star << ")";
      warn(msg.str());
    }
  }

  ScalarField3D forcing(model_.grid, 0.0);
  add_source_rate(forcing, model_, probe);
  add_pointwise(forcing, sensors_, r, gains.gains, scaling_);

  const double diffusivity = adaptive_ ? obs.abar : obs.a0;
  out.state = obs;
  out.state.xhat = stepper_.step(obs.xhat, diffusivity, forcing, params, &out.solver);
  out.state.t = obs.t + params.dt;
  return out;
}

const char* to_string(AdaptationStatus s) noexcept {
  switch (s) {
    case AdaptationStatus::Applied: return "applied";
    case AdaptationStatus::Frozen: return "frozen";
    case AdaptationStatus::Rejected: return "rejected";
  }
  return "?";
}

}  // namespace heatobs
