#include "heatobs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatobs/errors.hpp"

namespace heatobs {

Grid3::Grid3(Vec3 origin, double spacing, Index3 counts) : origin_(origin), spacing_(spacing), counts_(counts) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 2) throw ConfigError("grid needs at least two nodes per axis (axis " + std::to_string(a) + ")");
  }
}

Grid3 Grid3::tissue_block(Vec3 extents, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
  Index3 counts{};
  for (int a = 0; a < 3; ++a) {
    if (!(extents[a] > 0.0)) throw ConfigError("domain extent must be positive (axis " + std::to_string(a) + ")");
    const double intervals = std::round(extents[a] / spacing);
    if (intervals < 1.0) throw ConfigError("domain extent smaller than grid spacing (axis " + std::to_string(a) + ")");
    counts[a] = static_cast<std::size_t>(intervals) + 1;
  }
  const double ly = static_cast<double>(counts[1] - 1) * spacing;
  const double lz = static_cast<double>(counts[2] - 1) * spacing;
  return Grid3({0.0, -0.5 * ly, -lz}, spacing, counts);
}

Grid3 Grid3::centered(Index3 half_widths, double spacing) {
  Vec3 origin{};
  Index3 counts{};
  for (int a = 0; a < 3; ++a) {
    origin[a] = -static_cast<double>(half_widths[a]) * spacing;
    counts[a] = 2 * half_widths[a] + 1;
  }
  return Grid3(origin, spacing, counts);
}

Vec3 Grid3::extents() const noexcept {
  return {static_cast<double>(counts_[0] - 1) * spacing_, static_cast<double>(counts_[1] - 1) * spacing_,
          static_cast<double>(counts_[2] - 1) * spacing_};
}

double Grid3::volume() const noexcept {
  const Vec3 e = extents();
  return e[0] * e[1] * e[2];
}

Index3 Grid3::unravel(std::size_t n) const noexcept {
  const std::size_t k = n % counts_[2];
  const std::size_t rest = n / counts_[2];
  return {rest / counts_[1], rest % counts_[1], k};
}

Vec3 Grid3::position(std::size_t i, std::size_t j, std::size_t k) const noexcept {
  return {origin_[0] + static_cast<double>(i) * spacing_, origin_[1] + static_cast<double>(j) * spacing_,
          origin_[2] + static_cast<double>(k) * spacing_};
}

Vec3 Grid3::position(std::size_t n) const noexcept {
  const Index3 ijk = unravel(n);
  return position(ijk[0], ijk[1], ijk[2]);
}

double Grid3::node_volume(std::size_t i, std::size_t j, std::size_t k) const noexcept {
  double w = cell_volume();
  const Index3 ijk{i, j, k};
  for (int a = 0; a < 3; ++a) {
    if (ijk[a] == 0 || ijk[a] + 1 == counts_[a]) w *= 0.5;
  }
  return w;
}

double Grid3::node_volume(std::size_t n) const noexcept {
  const Index3 ijk = unravel(n);
  return node_volume(ijk[0], ijk[1], ijk[2]);
}

bool Grid3::contains(const Vec3& p, double tol) const noexcept {
  const Vec3 e = extents();
  for (int a = 0; a < 3; ++a) {
    const double lo = origin_[a] - tol;
    const double hi = origin_[a] + e[a] + tol;
    if (!(p[a] >= lo && p[a] <= hi)) return false;
  }
  return true;
}

Index3 Grid3::nearest_node(const Vec3& p) const noexcept {
  Index3 out{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::round((p[a] - origin_[a]) / spacing_);
    const double hi = static_cast<double>(counts_[a] - 1);
    out[a] = static_cast<std::size_t>(std::clamp(f, 0.0, hi));
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarField3D::ScalarField3D(const Grid3& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField3D::ScalarField3D(const Grid3& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("field value count does not match grid");
}

void ScalarField3D::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool ScalarField3D::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField3D::integral() const noexcept {
  double sum = 0.0;
  for (std::size_t n = 0; n < values_.size(); ++n) sum += values_[n] * grid_.node_volume(n);
  return sum;
}

double ScalarField3D::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField3D::l2_norm() const noexcept {
  double sum = 0.0;
  for (std::size_t n = 0; n < values_.size(); ++n) sum += values_[n] * values_[n] * grid_.node_volume(n);
  return std::sqrt(sum);
}

std::size_t ScalarField3D::argmax() const noexcept {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

ScalarField3D& ScalarField3D::operator+=(const ScalarField3D& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grid mismatch");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other.values_[n];
  return *this;
}

ScalarField3D& ScalarField3D::operator-=(const ScalarField3D& other) {
  if (!(other.grid_ == grid_)) throw ConfigError("field grid mismatch");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other.values_[n];
  return *this;
}

ScalarField3D& ScalarField3D::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField3D operator+(ScalarField3D a, const ScalarField3D& b) { return a += b; }
ScalarField3D operator-(ScalarField3D a, const ScalarField3D& b) { return a -= b; }
ScalarField3D operator*(double s, ScalarField3D a) { return a *= s; }

// ---------------------------------------------------------------------------

BoundaryCondition::BoundaryCondition(std::array<FaceCondition, 6> faces) : faces_(faces) { validate(); }

BoundaryCondition BoundaryCondition::all_neumann() { return BoundaryCondition{}; }

BoundaryCondition BoundaryCondition::all_dirichlet(double value) {
  std::array<FaceCondition, 6> f;
  f.fill(FaceCondition::dirichlet(value));
  return BoundaryCondition(f);
}

BoundaryCondition BoundaryCondition::insulated_top(double value) {
  std::array<FaceCondition, 6> f;
  f.fill(FaceCondition::dirichlet(value));
  f[static_cast<int>(Face::ZMax)] = FaceCondition::neumann();
  return BoundaryCondition(f);
}

void BoundaryCondition::validate() const {
  for (const auto& f : faces_) {
    if (f.kind == FaceCondition::Kind::Dirichlet && !std::isfinite(f.value)) {
      throw ConfigError("Dirichlet boundary value must be finite");
    }
  }
}

bool BoundaryCondition::pinned(const Grid3& grid, std::size_t i, std::size_t j, std::size_t k,
                               double* value) const noexcept {
  const Index3 ijk{i, j, k};
  for (int f = 0; f < 6; ++f) {
    const int axis = f / 2;
    const bool on_face = (f % 2 == 0) ? ijk[axis] == 0 : ijk[axis] + 1 == grid.count(axis);
    if (on_face && faces_[f].kind == FaceCondition::Kind::Dirichlet) {
      if (value) *value = faces_[f].value;
      return true;
    }
  }
  return false;
}

PinMask::PinMask(const Grid3& grid, const BoundaryCondition& bc)
    : pinned(grid.size(), 0), value(grid.size(), 0.0) {
  const auto& c = grid.counts();
  for (std::size_t i = 0; i < c[0]; ++i) {
    for (std::size_t j = 0; j < c[1]; ++j) {
      for (std::size_t k = 0; k < c[2]; ++k) {
        double v = 0.0;
        if (bc.pinned(grid, i, j, k, &v)) {
          const std::size_t n = grid.index(i, j, k);
          pinned[n] = 1;
          value[n] = v;
        }
      }
    }
  }
}

void apply_dirichlet(ScalarField3D& field, const PinMask& mask) {
  for (std::size_t n = 0; n < field.size(); ++n) {
    if (mask.is_pinned(n)) field[n] = mask.value[n];
  }
}

}  // namespace heatobs
