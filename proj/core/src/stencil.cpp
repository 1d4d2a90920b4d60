#include "heatobs/stencil.hpp"

#include "heatobs/errors.hpp"

namespace heatobs {

ScalarField3D laplacian(const ScalarField3D& field, const BoundaryCondition& bc) {
  bc.validate();
  return laplacian(field, PinMask(field.grid(), bc));
}

ScalarField3D laplacian(const ScalarField3D& field, const PinMask& mask) {
  const Grid3& g = field.grid();
  if (mask.pinned.size() != g.size()) throw ConfigError("boundary mask does not match the field grid");
  ScalarField3D out(g, 0.0);
  const auto& c = g.counts();
  const std::size_t sx = g.stride(0), sy = g.stride(1);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const double* x = field.values().data();

  for (std::size_t i = 0; i < c[0]; ++i) {
    const auto xl = detail::lower_offset(i, sx), xu = detail::upper_offset(i, c[0], sx);
    for (std::size_t j = 0; j < c[1]; ++j) {
      const auto yl = detail::lower_offset(j, sy), yu = detail::upper_offset(j, c[1], sy);
      for (std::size_t k = 0; k < c[2]; ++k) {
        const std::size_t n = g.index(i, j, k);
        if (mask.is_pinned(n)) continue;
        const auto zl = detail::lower_offset(k, 1), zu = detail::upper_offset(k, c[2], 1);
        const double* p = x + n;
        out[n] = (p[xl] + p[xu] + p[yl] + p[yu] + p[zl] + p[zu] - 6.0 * p[0]) * inv_h2;
      }
    }
  }
  return out;
}

}  // namespace heatobs
