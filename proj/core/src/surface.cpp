#include "heatobs/surface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatobs/errors.hpp"

namespace heatobs {

SensorSet SensorSet::top_face(const Grid3& grid, std::size_t stride) {
  if (stride == 0) throw ConfigError("sensor stride must be >= 1");
  SensorSet s;
  s.grid_ = grid;
  s.stride_ = stride;
  s.pitch_ = static_cast<double>(stride) * grid.spacing();
  s.cols_ = (grid.count(0) - 1) / stride + 1;
  s.rows_ = (grid.count(1) - 1) / stride + 1;
  const std::size_t top = grid.count(2) - 1;
  s.nodes_.reserve(s.rows_ * s.cols_);
  for (std::size_t r = 0; r < s.rows_; ++r) {
    for (std::size_t c = 0; c < s.cols_; ++c) s.nodes_.push_back(grid.index(c * stride, r * stride, top));
  }
  return s;
}

void SensorSet::validate_for(const Grid3& grid) const {
  if (!(grid == grid_)) throw ConfigError("sensor set was built for a different grid");
  const std::size_t top = grid.count(2) - 1;
  for (std::size_t n : nodes_) {
    if (n >= grid.size() || grid.unravel(n)[2] != top) {
      throw ConfigError("sensor node " + std::to_string(n) + " is not on the top face");
    }
  }
}

bool SurfaceFrame::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

SurfaceFrame restrict_to_surface(const ScalarField3D& field, const SensorSet& sensors, double t) {
  sensors.validate_for(field.grid());
  SurfaceFrame frame(sensors.rows(), sensors.cols(), sensors.pitch(), t);
  for (std::size_t i = 0; i < sensors.size(); ++i) frame.values[i] = field[sensors.node(i)];
  return frame;
}

void add_pointwise(ScalarField3D& rate, const SensorSet& sensors, const SurfaceFrame& residual,
                   std::span<const double> gains, InjectionScaling scaling, double weight) {
  if (residual.size() != sensors.size() || gains.size() != sensors.size()) {
    throw ContractError("residual and gains must have one entry per sensor");
  }
  const Grid3& g = rate.grid();
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (gains[i] < 0.0 || !std::isfinite(gains[i])) throw ContractError("observer gains must be finite and >= 0");
    const std::size_t n = sensors.node(i);
    double add = weight * gains[i] * residual.values[i];
    if (scaling == InjectionScaling::CellVolume) add /= g.node_volume(n);
    rate[n] += add;
  }
}

ScalarField3D inject_pointwise(const ScalarField3D& rate, const SensorSet& sensors, const SurfaceFrame& residual,
                               std::span<const double> gains, InjectionScaling scaling) {
  sensors.validate_for(rate.grid());
  ScalarField3D out = rate;
  add_pointwise(out, sensors, residual, gains, scaling);
  return out;
}

SurfaceFrame residual(const SurfaceFrame& y, const SurfaceFrame& y_hat) {
  if (y.rows != y_hat.rows || y.cols != y_hat.cols) throw ContractError("frame size mismatch");
  SurfaceFrame r = y;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= y_hat.values[i];
  return r;
}

}  // namespace heatobs
