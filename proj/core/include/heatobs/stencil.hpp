#pragma once

#include "heatobs/grid.hpp"

namespace heatobs {

/// Second-order 7-point Laplacian (1/m^2 times field units).
///
/// NeumannZero faces use a mirrored ghost node, so the stencil stays
/// second-order up to the boundary. Nodes on Dirichlet faces are pinned and
/// report zero.
ScalarField3D laplacian(const ScalarField3D& field, const BoundaryCondition& bc);
ScalarField3D laplacian(const ScalarField3D& field, const PinMask& mask);

namespace detail {

// Offsets of the lower/upper neighbour along one axis, mirrored at the ends.
inline std::ptrdiff_t lower_offset(std::size_t n, std::size_t stride) noexcept {
  return n == 0 ? static_cast<std::ptrdiff_t>(stride) : -static_cast<std::ptrdiff_t>(stride);
}
inline std::ptrdiff_t upper_offset(std::size_t n, std::size_t count, std::size_t stride) noexcept {
  return n + 1 == count ? -static_cast<std::ptrdiff_t>(stride) : static_cast<std::ptrdiff_t>(stride);
}

}  // namespace detail
}  // namespace heatobs
