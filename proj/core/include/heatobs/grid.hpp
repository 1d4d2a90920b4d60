#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace heatobs {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<std::size_t, 3>;

/// Uniform node-centred Cartesian grid. Nodes include the boundary, so an
/// axis of physical length L carries round(L / spacing) + 1 nodes.
///
/// The tissue-block frame puts the thermographed surface at z = 0:
/// x in [0, Lx], y in [-Ly/2, Ly/2], z in [-Lz, 0].
class Grid3 {
 public:
  Grid3() = default;
  Grid3(Vec3 origin, double spacing, Index3 counts);

  /// Block in the tissue frame described above. Throws ConfigError when an
  /// extent or the spacing is non-positive, or an extent is not resolved by
  /// at least one interval.
  static Grid3 tissue_block(Vec3 extents, double spacing);

  /// Grid of (2h+1) nodes per axis centred on the coordinate origin.
  static Grid3 centered(Index3 half_widths, double spacing);

  const Vec3& origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  const Index3& counts() const noexcept { return counts_; }
  std::size_t count(int axis) const noexcept { return counts_[axis]; }
  std::size_t size() const noexcept { return counts_[0] * counts_[1] * counts_[2]; }

  Vec3 extents() const noexcept;
  double volume() const noexcept;
  /// Dimension of the domain; the gain bound's growth rate depends on it.
  static constexpr int dimension() noexcept { return 3; }

  // Row-major, z fastest.
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (i * counts_[1] + j) * counts_[2] + k;
  }
  Index3 unravel(std::size_t n) const noexcept;
  std::size_t stride(int axis) const noexcept {
    return axis == 0 ? counts_[1] * counts_[2] : axis == 1 ? counts_[2] : 1;
  }

  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const noexcept;
  Vec3 position(std::size_t n) const noexcept;

  /// Quadrature weight of a node: spacing^3 halved once per boundary axis
  /// (trapezoid rule). Weights sum to volume().
  double node_volume(std::size_t i, std::size_t j, std::size_t k) const noexcept;
  double node_volume(std::size_t n) const noexcept;
  double cell_volume() const noexcept { return spacing_ * spacing_ * spacing_; }

  bool contains(const Vec3& p, double tol = 1e-12) const noexcept;
  /// Nearest node to p, clamped to the grid.
  Index3 nearest_node(const Vec3& p) const noexcept;

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  Vec3 origin_{0.0, 0.0, 0.0};
  double spacing_ = 1.0;
  Index3 counts_{2, 2, 2};
};

/// Node values over a Grid3 (temperatures in K, rates in K/s, sources in 1/m^3).
class ScalarField3D {
 public:
  ScalarField3D() = default;
  explicit ScalarField3D(const Grid3& grid, double fill = 0.0);
  ScalarField3D(const Grid3& grid, std::vector<double> values);

  const Grid3& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t n) noexcept { return values_[n]; }
  double operator[](std::size_t n) const noexcept { return values_[n]; }
  double& at(std::size_t i, std::size_t j, std::size_t k) noexcept { return values_[grid_.index(i, j, k)]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept { return values_[grid_.index(i, j, k)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  void fill(double v);
  bool all_finite() const noexcept;

  /// Trapezoid-weighted integral over the domain.
  double integral() const noexcept;
  double max_abs() const noexcept;
  /// Discrete L2 norm using node_volume weights.
  double l2_norm() const noexcept;
  std::size_t argmax() const noexcept;

  ScalarField3D& operator+=(const ScalarField3D& other);
  ScalarField3D& operator-=(const ScalarField3D& other);
  ScalarField3D& operator*=(double s) noexcept;

 private:
  Grid3 grid_;
  std::vector<double> values_;
};

ScalarField3D operator+(ScalarField3D a, const ScalarField3D& b);
ScalarField3D operator-(ScalarField3D a, const ScalarField3D& b);
ScalarField3D operator*(double s, ScalarField3D a);

enum class Face { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

struct FaceCondition {
  enum class Kind { NeumannZero, Dirichlet };
  Kind kind = Kind::NeumannZero;
  double value = 0.0;  // K, Dirichlet only

  static FaceCondition neumann() { return {Kind::NeumannZero, 0.0}; }
  static FaceCondition dirichlet(double v) { return {Kind::Dirichlet, v}; }
};

/// One condition per face, indexed by Face. Nodes on any Dirichlet face are
/// pinned; where two Dirichlet faces meet, the lower Face index wins.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  explicit BoundaryCondition(std::array<FaceCondition, 6> faces);

  static BoundaryCondition all_neumann();
  static BoundaryCondition all_dirichlet(double value);
  /// Insulated top (z max), fixed temperature elsewhere.
  static BoundaryCondition insulated_top(double value);

  const FaceCondition& operator[](Face f) const noexcept { return faces_[static_cast<int>(f)]; }
  FaceCondition& operator[](Face f) noexcept { return faces_[static_cast<int>(f)]; }

  /// Throws ConfigError on a non-finite Dirichlet value.
  void validate() const;

  /// True when the node sits on a Dirichlet face; writes the pinned value.
  bool pinned(const Grid3& grid, std::size_t i, std::size_t j, std::size_t k, double* value = nullptr) const noexcept;

 private:
  std::array<FaceCondition, 6> faces_{};
};

/// Per-node pin mask and values; precomputed once per (grid, bc).
struct PinMask {
  std::vector<unsigned char> pinned;
  std::vector<double> value;

  PinMask(const Grid3& grid, const BoundaryCondition& bc);
  bool is_pinned(std::size_t n) const noexcept { return pinned[n] != 0; }
};

/// Apply pinned values in place.
void apply_dirichlet(ScalarField3D& field, const PinMask& mask);

}  // namespace heatobs
