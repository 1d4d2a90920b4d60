#include "heatobs/source.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "heatobs/errors.hpp"
#include "heatobs/log.hpp"

namespace heatobs {

ScalarField3D build_source(const SourceSpec& spec, const Grid3& grid) {
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) throw ConfigError("source sigma must be positive");
  if (!(spec.truncation >= 1.0)) throw ConfigError("source truncation must be >= 1 sigma");
  const double h = grid.spacing();
  if (spec.sigma < h) {
    std::ostringstream msg;
    msg << "source sigma " << spec.sigma << " m is below the grid spacing " << h << " m (under-resolved)";
    warn(msg.str());
  }
  const auto half = static_cast<std::size_t>(std::ceil(spec.truncation * spec.sigma / h));
  const Grid3 kgrid = Grid3::centered({half, half, half}, h);
  ScalarField3D q(kgrid, 0.0);

  const double inv_two_var = 1.0 / (2.0 * spec.sigma * spec.sigma);
  double sum = 0.0;
  // Offsets from integer index differences keep the kernel exactly symmetric.
  for (std::size_t n = 0; n < q.size(); ++n) {
    const Index3 ijk = kgrid.unravel(n);
    double r2 = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      const double d = (static_cast<double>(ijk[ax]) - static_cast<double>(half)) * h;
      r2 += d * d;
    }
    q[n] = std::exp(-r2 * inv_two_var);
    sum += q[n];
  }
  q *= 1.0 / (sum * kgrid.cell_volume());
  return q;
}

namespace {

void add_at_node(ScalarField3D& field, const ScalarField3D& kernel, const Index3& centre, double scale) {
  const Grid3& g = field.grid();
  const Grid3& kg = kernel.grid();
  // Kernel node (a,b,c) maps to field node centre + (a,b,c) - half.
  std::array<std::ptrdiff_t, 3> lo{}, hi{};
  for (int ax = 0; ax < 3; ++ax) {
    const auto half = static_cast<std::ptrdiff_t>(kg.count(ax) / 2);
    lo[ax] = std::max<std::ptrdiff_t>(0, half - static_cast<std::ptrdiff_t>(centre[ax]));
    hi[ax] = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(kg.count(ax)),
                                      static_cast<std::ptrdiff_t>(g.count(ax)) - static_cast<std::ptrdiff_t>(centre[ax]) + half);
  }
  for (std::ptrdiff_t a = lo[0]; a < hi[0]; ++a) {
    const std::size_t i = centre[0] + a - kg.count(0) / 2;
    for (std::ptrdiff_t b = lo[1]; b < hi[1]; ++b) {
      const std::size_t j = centre[1] + b - kg.count(1) / 2;
      for (std::ptrdiff_t c = lo[2]; c < hi[2]; ++c) {
        const std::size_t k = centre[2] + c - kg.count(2) / 2;
        field.at(i, j, k) += scale * kernel.at(a, b, c);
      }
    }
  }
}

}  // namespace

void add_shifted_source(ScalarField3D& field, const ScalarField3D& kernel, const Vec3& p, double scale,
                        ShiftMode mode) {
  const Grid3& g = field.grid();
  if (std::abs(kernel.grid().spacing() - g.spacing()) > 1e-12 * g.spacing()) {
    throw ConfigError("source kernel spacing does not match the grid");
  }
  if (!g.contains(p, 1e-9 * g.spacing())) {
    std::ostringstream msg;
    msg << "probe position (" << p[0] << ", " << p[1] << ", " << p[2] << ") m is outside the domain";
    throw ScheduleError(msg.str());
  }
  if (mode == ShiftMode::Nearest) {
    add_at_node(field, kernel, g.nearest_node(p), scale);
    return;
  }
  Index3 base{};
  Vec3 frac{};
  for (int ax = 0; ax < 3; ++ax) {
    const double s = (p[ax] - g.origin()[ax]) / g.spacing();
    const double top = static_cast<double>(g.count(ax) - 1);
    const double f = std::clamp(std::floor(s), 0.0, top - 1.0);
    base[ax] = static_cast<std::size_t>(f);
    frac[ax] = std::clamp(s - f, 0.0, 1.0);
  }
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    Index3 node = base;
    for (int ax = 0; ax < 3; ++ax) {
      const bool up = (corner >> ax) & 1;
      w *= up ? frac[ax] : 1.0 - frac[ax];
      node[ax] += up ? 1 : 0;
    }
    if (w > 0.0) add_at_node(field, kernel, node, scale * w);
  }
}

ScalarField3D shift_source(const ScalarField3D& kernel, const Vec3& p, const Grid3& grid, ShiftMode mode) {
  ScalarField3D out(grid, 0.0);
  add_shifted_source(out, kernel, p, 1.0, mode);
  return out;
}

// ---------------------------------------------------------------------------

Vec3 ProbeSegment::end() const noexcept {
  const double d = t_end - t_start;
  return {start[0] + velocity[0] * d, start[1] + velocity[1] * d, start[2] + velocity[2] * d};
}

ProbeSchedule::ProbeSchedule(std::vector<ProbeSegment> segments) : segments_(std::move(segments)) {
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const auto& seg = segments_[s];
    const std::string where = "schedule segment " + std::to_string(s) + ": ";
    if (!(seg.t_start >= 0.0) || !(seg.t_end > seg.t_start) || !std::isfinite(seg.t_end)) {
      throw ScheduleError(where + "needs 0 <= t_start < t_end");
    }
    if (!(seg.power >= 0.0) || !std::isfinite(seg.power)) throw ScheduleError(where + "power must be finite and >= 0");
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(seg.start[a]) || !std::isfinite(seg.velocity[a])) {
        throw ScheduleError(where + "position and velocity must be finite");
      }
    }
    if (s > 0 && seg.t_start < segments_[s - 1].t_end) throw ScheduleError(where + "overlaps or precedes the previous segment");
  }
}

double ProbeSchedule::end_time() const noexcept { return segments_.empty() ? 0.0 : segments_.back().t_end; }

ProbeState ProbeSchedule::at(double t) const {
  if (!(t >= 0.0)) throw ContractError("probe time must be >= 0");
  ProbeState st;
  if (segments_.empty()) return st;
  st.p = segments_.front().start;
  for (const auto& seg : segments_) {
    if (t < seg.t_start) break;
    if (t < seg.t_end) {
      const double d = t - seg.t_start;
      st.p = {seg.start[0] + seg.velocity[0] * d, seg.start[1] + seg.velocity[1] * d,
              seg.start[2] + seg.velocity[2] * d};
      st.u = seg.power;
      st.v = seg.velocity;
      return st;
    }
    st.p = seg.end();
  }
  return st;
}

void ProbeSchedule::validate_within(const Grid3& grid) const {
  const double tol = 1e-9 * grid.spacing();
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    for (const Vec3& p : {segments_[s].start, segments_[s].end()}) {
      if (!grid.contains(p, tol)) {
        std::ostringstream msg;
        msg << "schedule segment " << s << " leaves the domain at (" << p[0] << ", " << p[1] << ", " << p[2]
            << ") m; the probe path must stay inside the tissue block";
        throw ScheduleError(msg.str());
      }
    }
  }
}

}  // namespace heatobs
