#include "heatobs/disturbance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "heatobs/errors.hpp"

namespace heatobs {

DisturbanceGen::DisturbanceGen(const DisturbanceSpec& spec, const Grid3& grid) : grid_(grid) {
  if (!(spec.eps_l2 >= 0.0) || !std::isfinite(spec.eps_l2)) throw ConfigError("disturbance eps_l2 must be >= 0");
  if (!(spec.holder_c >= 0.0) || !std::isfinite(spec.holder_c)) throw ConfigError("disturbance holder_c must be >= 0");
  if (spec.n_modes < 1) throw ConfigError("disturbance n_modes must be >= 1");
  if (spec.max_mode_index < 0) throw ConfigError("disturbance max_mode_index must be >= 0");
  if (!(spec.fill > 0.0 && spec.fill <= 1.0)) throw ConfigError("disturbance fill must lie in (0, 1]");
  for (double f : spec.temporal_freqs) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("disturbance temporal frequencies must be >= 0");
  }
  if (spec.eps_l2 == 0.0) return;

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> wavenumber(0, spec.max_mode_index);
  std::uniform_real_distribution<double> magnitude(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::bernoulli_distribution negative(0.5);

  const Vec3 ext = grid.extents();
  double l2_unit = 0.0, sup_unit = 0.0, lip_unit = 0.0, lip_t_unit = 0.0;
  for (int m = 0; m < spec.n_modes; ++m) {
    Mode mode;
    double grad2 = 0.0;
    double norm2 = 1.0;
    for (int a = 0; a < 3; ++a) {
      mode.k[a] = wavenumber(rng);
      const std::size_t n = grid.count(a);
      mode.profile[a].resize(n);
      double axis_norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = static_cast<double>(i) * grid.spacing();
        const double v = std::cos(mode.k[a] * std::numbers::pi * xi / ext[a]);
        mode.profile[a][i] = v;
        const double w = (i == 0 || i + 1 == n) ? 0.5 * grid.spacing() : grid.spacing();
        axis_norm2 += v * v * w;
      }
      norm2 *= axis_norm2;
      const double kk = mode.k[a] * std::numbers::pi / ext[a];
      grad2 += kk * kk;
    }
    mode.coeff = (negative(rng) ? -1.0 : 1.0) * magnitude(rng);
    mode.phase = phase(rng);
    mode.freq = spec.temporal_freqs.empty() ? 0.0 : spec.temporal_freqs[m % spec.temporal_freqs.size()];

    const double c = std::abs(mode.coeff);
    l2_unit += c * std::sqrt(norm2);
    sup_unit += c;
    lip_unit += c * std::sqrt(grad2);
    lip_t_unit += c * 2.0 * std::numbers::pi * mode.freq;
    modes_.push_back(std::move(mode));
  }

  const double diam = std::sqrt(ext[0] * ext[0] + ext[1] * ext[1] + ext[2] * ext[2]);
  // |w(a)-w(b)| <= min(Lip d, 2 S); the quotient peaks where Lip d = 2 S.
  double holder_unit = std::sqrt(2.0 * sup_unit * lip_unit);
  if (lip_unit * diam < 2.0 * sup_unit) holder_unit = lip_unit * std::sqrt(diam);

  scale_ = spec.eps_l2 * spec.fill / l2_unit;
  cert_l2_ = scale_ * l2_unit;
  cert_holder_ = scale_ * holder_unit;
  lip_t_ = scale_ * lip_t_unit;

  if (cert_holder_ > spec.holder_c) {
    std::ostringstream msg;
    msg << "disturbance Hoelder bound C_w = " << spec.holder_c << " is infeasible: the modes scaled to the L2 bound "
        << "eps_w2 = " << spec.eps_l2 << " certify only C_w >= " << cert_holder_
        << " (raise C_w, lower eps_w2, or reduce max_mode_index)";
    throw ConfigError(msg.str());
  }
}

double DisturbanceGen::amplitude(std::size_t m, double t) const noexcept {
  const Mode& mode = modes_[m];
  return scale_ * mode.coeff * std::sin(2.0 * std::numbers::pi * mode.freq * t + mode.phase);
}

void DisturbanceGen::add_to(ScalarField3D& out, double t, double weight) const {
  if (!(out.grid() == grid_)) throw ConfigError("disturbance grid mismatch");
  const auto& c = grid_.counts();
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const double amp = weight * amplitude(m, t);
    const auto& px = modes_[m].profile[0];
    const auto& py = modes_[m].profile[1];
    const auto& pz = modes_[m].profile[2];
    for (std::size_t i = 0; i < c[0]; ++i) {
      for (std::size_t j = 0; j < c[1]; ++j) {
        const double axy = amp * px[i] * py[j];
        double* row = &out.at(i, j, 0);
        for (std::size_t k = 0; k < c[2]; ++k) row[k] += axy * pz[k];
      }
    }
  }
}

ScalarField3D DisturbanceGen::sample(double t) const {
  ScalarField3D w(grid_, 0.0);
  add_to(w, t);
  return w;
}

double sampled_holder_quotient(const ScalarField3D& w, std::size_t pairs, std::mt19937_64& rng) {
  const Grid3& g = w.grid();
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  double worst = 0.0;
  for (std::size_t s = 0; s < pairs; ++s) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const Vec3 pa = g.position(a), pb = g.position(b);
    const double d = std::sqrt((pa[0] - pb[0]) * (pa[0] - pb[0]) + (pa[1] - pb[1]) * (pa[1] - pb[1]) +
                               (pa[2] - pb[2]) * (pa[2] - pb[2]));
    worst = std::max(worst, std::abs(w[a] - w[b]) / std::sqrt(d));
  }
  return worst;
}

}  // namespace heatobs
