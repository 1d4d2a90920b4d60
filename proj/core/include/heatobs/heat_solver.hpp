#pragma once

#include <vector>

#include "heatobs/grid.hpp"

namespace heatobs {

struct MaterialProps {
  double density = 700.0;        // kg/m^3
  double conductivity = 0.5934;  // W/(m K)
  double specific_heat = 4000.0; // J/(kg K)

  double diffusivity() const noexcept { return conductivity / (density * specific_heat); }
  double heat_capacity() const noexcept { return density * specific_heat; }  // J/(m^3 K)
  /// Throws ConfigError unless every property is finite and positive.
  void validate() const;
};

enum class GsOrdering { Lexicographic, RedBlack };

struct SolverParams {
  double dt = 0.02;          // s
  double gs_tol = 1e-6;      // residual sup-norm, K
  int gs_max_iters = 500;
  GsOrdering ordering = GsOrdering::Lexicographic;

  void validate() const;
};

struct GsReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;  // residual before the first sweep, then after each
};

/// Crank-Nicolson step for x' = a lap(x) + f on a fixed (grid, bc):
///   (I - a dt/2 lap) x+ = (I + a dt/2 lap) x + dt f
/// solved by Gauss-Seidel from x. Dirichlet nodes are held at their value.
class HeatStepper {
 public:
  HeatStepper(const Grid3& grid, const BoundaryCondition& bc);

  /// Throws SolverError if the residual is still >= gs_tol after
  /// gs_max_iters sweeps, ConfigError on grid mismatch.
  ScalarField3D step(const ScalarField3D& x, double diffusivity, const ScalarField3D& forcing,
                     const SolverParams& params, GsReport* report = nullptr) const;

  const Grid3& grid() const noexcept { return grid_; }
  const BoundaryCondition& bc() const noexcept { return bc_; }
  const PinMask& pins() const noexcept { return pins_; }

 private:
  Grid3 grid_;
  BoundaryCondition bc_;
  PinMask pins_;
};

ScalarField3D step_heat(const ScalarField3D& field, double diffusivity, const ScalarField3D& forcing,
                        const BoundaryCondition& bc, const SolverParams& params, GsReport* report = nullptr);

}  // namespace heatobs
