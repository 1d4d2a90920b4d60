#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "heatobs/surface.hpp"

namespace heatobs {

// Attention-based noise-robust averaging: direct diffusivity estimation
// from surface thermography during idle (zero-power) periods.

/// One-sided smooth differentiator: f'(t_k) ~ sum_j c[j] f[k-j] / dt.
/// Exact for polynomials of degree <= 2 and flat (length - 3 zeros) at the
/// Nyquist frequency. length >= 4.
std::vector<double> backward_derivative_coefficients(std::size_t length);

/// Centred smooth second-derivative kernel c[-m..m] (scale by 1/h^2),
/// exact on quadratics with a zero of order (length - 3) at Nyquist.
/// Odd length >= 5; length 5 gives [1, 0, -2, 0, 1] / 4.
std::vector<double> centered_second_derivative_coefficients(std::size_t length);

/// Ring buffer of the most recent frames and the probe power that produced each.
class FrameHistory {
 public:
  explicit FrameHistory(std::size_t capacity = 7);

  void push(SurfaceFrame frame, double power);
  void clear() noexcept;

  bool full() const noexcept { return frames_.size() == capacity_; }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

  /// age 0 is the newest frame.
  const SurfaceFrame& frame(std::size_t age) const { return frames_[frames_.size() - 1 - age]; }
  double power(std::size_t age) const { return power_[power_.size() - 1 - age]; }
  const SurfaceFrame& newest() const { return frames_.back(); }

  /// Sampling period. Throws ContractError unless the timestamps are
  /// uniformly spaced to within 1e-9 s.
  double period() const;

 private:
  std::size_t capacity_;
  std::deque<SurfaceFrame> frames_;
  std::deque<double> power_;
};

/// Noise-robust time derivative at the newest frame (K/s), one value per
/// pixel. Throws ContractError("insufficient history") unless the buffer is full.
SurfaceFrame nr_time_derivative(const FrameHistory& history);

/// Noise-robust surface Laplacian d11 + d22 (K/m^2) with reflected borders.
/// Throws ConfigError for frames smaller than 5 x 5.
SurfaceFrame nr_surface_laplacian(const SurfaceFrame& frame);

/// Rate-of-thermal-change attention weights.
struct RtcField {
  std::vector<double> weights;
  double beta = 100.0;
  bool uniform_fallback = false;
};

/// exp(beta |rate|) minus its minimum, normalised to sum 1. Evaluated with
/// the exponent shifted by its maximum so large beta |rate| cannot overflow.
/// Falls back to uniform weights when the unnormalised sum is below 1e-12.
/// Throws ContractError for beta < 1.
RtcField rtc(const SurfaceFrame& rate, double beta);

struct AnraParams {
  std::size_t history = 7;
  double beta = 100.0;
  double lap_floor_fraction = 0.01;   // eps_lap = fraction * max |Laplacian|
  double rtc_threshold_factor = 0.1;  // tau_rtc = factor / M
};

/// Surface-only estimates see four conducting faces of a surface cell while
/// the tissue conducts through five; scaling by 4/5 undoes that.
inline constexpr double kDepthCorrection = 4.0 / 5.0;

/// Effective diffusivity ratio a'/a seen by a surface-only model for a cell
/// with an insulated top, given the second derivative along each axis. Each
/// face of the cell carries half of its axis' curvature; the tissue conducts
/// through the four lateral faces and the bottom, the model only laterally.
double surface_diffusivity_ratio(const std::array<double, 3>& axis_curvature);

struct DiffusivityEstimate {
  double ahat = 0.0;      // m^2/s, depth corrected
  double ahat_raw = 0.0;  // m^2/s
  double valid_fraction = 0.0;
  double t = 0.0;         // timestamp of the newest frame
};

enum class EstimateStatus { Ok, InsufficientHistory, WindowInactive, NoConfidentSensors };

struct EstimateResult {
  EstimateStatus status = EstimateStatus::InsufficientHistory;
  std::optional<DiffusivityEstimate> estimate;

  explicit operator bool() const noexcept { return estimate.has_value(); }
};

/// Weighted per-pixel ratio d_t x / (d11 + d22) x over confident pixels
/// (|Laplacian| > eps_lap and RTC weight > tau_rtc). Only valid while the
/// probe is off: any nonzero power in the history gives WindowInactive.
EstimateResult estimate_diffusivity(const FrameHistory& history, const AnraParams& params);

const char* to_string(EstimateStatus s) noexcept;

}  // namespace heatobs
