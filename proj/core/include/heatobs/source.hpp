#pragma once

#include <vector>

#include "heatobs/grid.hpp"

namespace heatobs {

struct SourceSpec {
  double sigma = 1e-3;  // probe radius, m
  /// Kernel half-width in units of sigma; beyond it the Gaussian is dropped.
  double truncation = 5.0;
};

/// Gaussian heat-source kernel on a grid centred at the origin, discretely
/// renormalised so that sum(q) * spacing^3 == 1. Uses the spacing of `grid`.
/// Warns (does not throw) when sigma < spacing.
ScalarField3D build_source(const SourceSpec& spec, const Grid3& grid);

enum class ShiftMode {
  Nearest,    // kernel centre snapped to the nearest node of p
  Trilinear,  // kernel split over the 8 nodes around p
};

/// T_p q: the kernel translated to p and cut to the domain. Values outside
/// the grid are dropped, so the mass can only decrease. Throws ScheduleError
/// when p is outside the domain.
ScalarField3D shift_source(const ScalarField3D& kernel, const Vec3& p, const Grid3& grid,
                           ShiftMode mode = ShiftMode::Nearest);

/// Adds scale * T_p q into `field` without allocating a full-size temporary.
void add_shifted_source(ScalarField3D& field, const ScalarField3D& kernel, const Vec3& p, double scale,
                        ShiftMode mode = ShiftMode::Nearest);

struct ProbeState {
  Vec3 p{};        // m
  double u = 0.0;  // W
  Vec3 v{};        // m/s
};

/// One straight constant-speed pass at constant power over [t_start, t_end).
struct ProbeSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec3 start{};
  Vec3 velocity{};
  double power = 0.0;

  Vec3 end() const noexcept;
};

/// Piecewise probe motion. Between segments the probe rests at the last
/// endpoint with zero power; before the first segment it rests at that
/// segment's start; after the last one it rests at its endpoint.
class ProbeSchedule {
 public:
  ProbeSchedule() = default;
  /// Throws ScheduleError on overlapping/unsorted segments or negative or
  /// non-finite power.
  explicit ProbeSchedule(std::vector<ProbeSegment> segments);

  const std::vector<ProbeSegment>& segments() const noexcept { return segments_; }
  double end_time() const noexcept;

  /// Right-continuous in t. Throws ContractError for t < 0.
  ProbeState at(double t) const;

  /// Every position the probe visits must lie in the grid. Segments are
  /// straight lines, so checking endpoints suffices for a box.
  void validate_within(const Grid3& grid) const;

 private:
  std::vector<ProbeSegment> segments_;
};

inline ProbeState probe_at(const ProbeSchedule& schedule, double t) { return schedule.at(t); }

}  // namespace heatobs
