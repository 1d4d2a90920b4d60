#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "heatobs/grid.hpp"

namespace heatobs {

/// Requested bounds for the heat-input disturbance w(t), in rate units.
struct DisturbanceSpec {
  double eps_l2 = 0.0;     // bound on ||w(t)||_L2, K/s * m^{3/2}
  double holder_c = 0.0;   // bound on the 1/2-Hoelder coefficient, K/s * m^{-1/2}
  int n_modes = 6;
  int max_mode_index = 4;  // cosine wavenumbers drawn from 0..max per axis
  std::vector<double> temporal_freqs{0.5, 1.0, 2.0};  // Hz, assigned cyclically
  double fill = 0.8;       // worst-case L2 norm as a fraction of eps_l2, in (0, 1]
  std::uint64_t seed = 0;
};

/// Smooth space-time disturbance: a few cosine-product modes (zero normal
/// derivative on every face) with sinusoidal amplitudes. Construction
/// certifies both bounds with rigorous upper estimates:
///   L2:     sum_m |c_m| ||phi_m||_L2 (discrete, node-volume weighted)
///   Hoelder: sqrt(2 S Lip) with S = sum |c_m|, Lip = sum |c_m| |grad phi_m|_max,
///           capped by Lip * sqrt(diam) when that is smaller.
class DisturbanceGen {
 public:
  /// Throws ConfigError on an invalid spec, or when the Hoelder bound cannot
  /// be met at the requested L2 fill (message names the violated bound).
  DisturbanceGen(const DisturbanceSpec& spec, const Grid3& grid);

  ScalarField3D sample(double t) const;
  /// Adds w(t) into `out` (same grid).
  void add_to(ScalarField3D& out, double t, double weight = 1.0) const;

  const Grid3& grid() const noexcept { return grid_; }
  bool is_zero() const noexcept { return modes_.empty(); }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  /// Scaled amplitude of mode m at time t (K/s before the spatial factor).
  double amplitude(std::size_t m, double t) const noexcept;

  double certified_l2() const noexcept { return cert_l2_; }
  double certified_holder() const noexcept { return cert_holder_; }
  /// Bound on sup_node |dw/dt| (K/s^2).
  double time_lipschitz() const noexcept { return lip_t_; }

 private:
  struct Mode {
    std::array<int, 3> k{};
    std::array<std::vector<double>, 3> profile;  // cos(k pi xi / L) per axis node
    double coeff = 0.0;
    double freq = 0.0;
    double phase = 0.0;
  };

  Grid3 grid_;
  std::vector<Mode> modes_;
  double scale_ = 0.0;
  double cert_l2_ = 0.0;
  double cert_holder_ = 0.0;
  double lip_t_ = 0.0;
};

inline DisturbanceGen make_disturbance(const DisturbanceSpec& spec, const Grid3& grid) { return {spec, grid}; }
inline ScalarField3D sample_disturbance(const DisturbanceGen& gen, double t) { return gen.sample(t); }

/// Largest |w(a) - w(b)| / |a - b|^{1/2} over `pairs` random node pairs.
double sampled_holder_quotient(const ScalarField3D& w, std::size_t pairs, std::mt19937_64& rng);

}  // namespace heatobs
