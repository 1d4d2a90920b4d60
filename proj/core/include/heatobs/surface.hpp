#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heatobs/grid.hpp"

namespace heatobs {

/// Thermographer pixels: nodes on the top face (z max), laid out as a
/// rows x cols image with rows along y and columns along x.
class SensorSet {
 public:
  /// Every `stride`-th top-face node in x and y, starting at the corner.
  static SensorSet top_face(const Grid3& grid, std::size_t stride = 1);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Pixel pitch (m), an integer multiple of the grid spacing.
  double pitch() const noexcept { return pitch_; }
  std::size_t stride() const noexcept { return stride_; }
  const Grid3& grid() const noexcept { return grid_; }

  std::size_t node(std::size_t sensor) const noexcept { return nodes_[sensor]; }
  std::span<const std::size_t> nodes() const noexcept { return nodes_; }
  Vec3 position(std::size_t sensor) const noexcept { return grid_.position(nodes_[sensor]); }

  /// Throws ConfigError if the set was built for a different grid or any
  /// node is off the top face.
  void validate_for(const Grid3& grid) const;

 private:
  Grid3 grid_;
  std::size_t rows_ = 0, cols_ = 0, stride_ = 1;
  double pitch_ = 0.0;
  std::vector<std::size_t> nodes_;
};

/// One thermographer image. values[r * cols + c]; r runs along y, c along x.
struct SurfaceFrame {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double pitch = 0.0;  // m
  double t = 0.0;      // s
  std::vector<double> values;

  SurfaceFrame() = default;
  SurfaceFrame(std::size_t r, std::size_t c, double pitch_m, double time, double fill = 0.0)
      : rows(r), cols(c), pitch(pitch_m), t(time), values(r * c, fill) {}

  std::size_t size() const noexcept { return values.size(); }
  double& at(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
  bool all_finite() const noexcept;
};

/// y = C x: samples the field at the sensor nodes.
SurfaceFrame restrict_to_surface(const ScalarField3D& field, const SensorSet& sensors, double t = 0.0);

/// How a pointwise correction is spread onto its node.
enum class InjectionScaling {
  Kronecker,   // add g * r directly to the node rate
  CellVolume,  // add g * r / node_volume, the discrete Dirac
};

/// rate + C* diag(gains) residual. Only sensor nodes change.
/// Throws ContractError on a negative gain or size mismatch.
ScalarField3D inject_pointwise(const ScalarField3D& rate, const SensorSet& sensors, const SurfaceFrame& residual,
                               std::span<const double> gains, InjectionScaling scaling = InjectionScaling::Kronecker);

/// In-place variant used by the time steppers; adds `weight * g_i * r_i`.
void add_pointwise(ScalarField3D& rate, const SensorSet& sensors, const SurfaceFrame& residual,
                   std::span<const double> gains, InjectionScaling scaling, double weight = 1.0);

/// y - y_hat, timestamped with y.
SurfaceFrame residual(const SurfaceFrame& y, const SurfaceFrame& y_hat);

}  // namespace heatobs
