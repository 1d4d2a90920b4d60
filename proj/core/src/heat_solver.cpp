#include "heatobs/heat_solver.hpp"

#include <cmath>
#include <sstream>

#include "heatobs/errors.hpp"
#include "heatobs/stencil.hpp"

namespace heatobs {

void MaterialProps::validate() const {
  for (double v : {density, conductivity, specific_heat}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("material properties must be finite and positive");
  }
}

void SolverParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (!(gs_tol > 0.0)) throw ConfigError("Gauss-Seidel tolerance must be positive");
  if (gs_max_iters < 1) throw ConfigError("Gauss-Seidel iteration cap must be >= 1");
}

HeatStepper::HeatStepper(const Grid3& grid, const BoundaryCondition& bc) : grid_(grid), bc_(bc), pins_(grid, bc) {
  bc_.validate();
}

namespace {

// Sum of the six (mirrored) neighbours minus 6 x.
struct Stencil {
  const Grid3& g;
  std::size_t sx, sy;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    const auto& c = g.counts();
    for (std::size_t i = 0; i < c[0]; ++i) {
      const auto xl = detail::lower_offset(i, sx), xu = detail::upper_offset(i, c[0], sx);
      for (std::size_t j = 0; j < c[1]; ++j) {
        const auto yl = detail::lower_offset(j, sy), yu = detail::upper_offset(j, c[1], sy);
        const std::size_t row = g.index(i, j, 0);
        for (std::size_t k = 0; k < c[2]; ++k) {
          fn(row + k, i + j + k, xl, xu, yl, yu, detail::lower_offset(k, 1), detail::upper_offset(k, c[2], 1));
        }
      }
    }
  }
};

inline double neighbour_sum(const double* p, std::ptrdiff_t xl, std::ptrdiff_t xu, std::ptrdiff_t yl,
                            std::ptrdiff_t yu, std::ptrdiff_t zl, std::ptrdiff_t zu) {
  return p[xl] + p[xu] + p[yl] + p[yu] + p[zl] + p[zu];
}

}  // namespace

ScalarField3D HeatStepper::step(const ScalarField3D& x, double diffusivity, const ScalarField3D& forcing,
                                const SolverParams& params, GsReport* report) const {
  params.validate();
  if (!(x.grid() == grid_) || !(forcing.grid() == grid_)) throw ConfigError("field grid does not match the stepper");
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) throw ContractError("diffusivity must be positive");

  const double h2 = grid_.spacing() * grid_.spacing();
  const double c = diffusivity * params.dt / (2.0 * h2);
  const double diag = 1.0 + 6.0 * c;
  const Stencil st{grid_, grid_.stride(0), grid_.stride(1)};

  std::vector<double> rhs(grid_.size(), 0.0);
  {
    const double* xp = x.values().data();
    st.for_each([&](std::size_t n, std::size_t, auto xl, auto xu, auto yl, auto yu, auto zl, auto zu) {
      if (pins_.is_pinned(n)) return;
      const double* p = xp + n;
      rhs[n] = p[0] + c * (neighbour_sum(p, xl, xu, yl, yu, zl, zu) - 6.0 * p[0]) + params.dt * forcing[n];
    });
  }

  ScalarField3D y = x;
  apply_dirichlet(y, pins_);
  double* yp = y.values().data();

  auto residual = [&] {
    double r = 0.0;
    st.for_each([&](std::size_t n, std::size_t, auto xl, auto xu, auto yl, auto yu, auto zl, auto zu) {
      if (pins_.is_pinned(n)) return;
      const double* p = yp + n;
      r = std::max(r, std::abs(rhs[n] - diag * p[0] + c * neighbour_sum(p, xl, xu, yl, yu, zl, zu)));
    });
    return r;
  };

  auto sweep = [&](int colour) {
    st.for_each([&](std::size_t n, std::size_t parity, auto xl, auto xu, auto yl, auto yu, auto zl, auto zu) {
      if (pins_.is_pinned(n)) return;
      if (colour >= 0 && static_cast<int>(parity % 2) != colour) return;
      double* p = yp + n;
      p[0] = (rhs[n] + c * neighbour_sum(p, xl, xu, yl, yu, zl, zu)) / diag;
    });
  };

  GsReport local;
  GsReport& rep = report ? *report : local;
  rep = GsReport{};
  double r = residual();
  rep.history.push_back(r);
  while (r >= params.gs_tol && rep.iterations < params.gs_max_iters) {
    if (params.ordering == GsOrdering::RedBlack) {
      sweep(0);
      sweep(1);
    } else {
      sweep(-1);
    }
    ++rep.iterations;
    r = residual();
    rep.history.push_back(r);
  }
  rep.residual = r;
  if (r >= params.gs_tol) {
    std::ostringstream msg;
    msg << "Gauss-Seidel did not converge: residual " << r << " K after " << rep.iterations << " sweeps";
    throw SolverError(msg.str(), r, rep.iterations);
  }
  return y;
}

ScalarField3D step_heat(const ScalarField3D& field, double diffusivity, const ScalarField3D& forcing,
                        const BoundaryCondition& bc, const SolverParams& params, GsReport* report) {
  return HeatStepper(field.grid(), bc).step(field, diffusivity, forcing, params, report);
}

}  // namespace heatobs
