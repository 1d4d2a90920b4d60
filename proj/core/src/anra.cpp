#include "heatobs/anra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatobs/errors.hpp"

namespace heatobs {
namespace {

// Dense solve with partial pivoting; systems here are at most ~10 x 10.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) throw ConfigError("singular filter design system");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

double ipow(double base, std::size_t e) {
  double r = 1.0;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  if (i < 0) i = -i;
  if (i >= m) i = 2 * (m - 1) - i;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, m - 1));
}

}  // namespace

std::vector<double> backward_derivative_coefficients(std::size_t length) {
  if (length < 4) throw ConfigError("backward differentiator needs length >= 4");
  const std::size_t n = length;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  // Exactness at the newest sample for 1, t, t^2 (sample index j = k - t).
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = ipow(static_cast<double>(j), p);
    a.push_back(row);
    b.push_back(p == 1 ? -1.0 : 0.0);
  }
  // Zero of order n-3 at Nyquist: sum (-1)^j j^p c_j = 0.
  for (std::size_t p = 0; p + 3 < n; ++p) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = (j % 2 ? -1.0 : 1.0) * ipow(static_cast<double>(j), p);
    a.push_back(row);
    b.push_back(0.0);
  }
  return solve(std::move(a), std::move(b));
}

std::vector<double> centered_second_derivative_coefficients(std::size_t length) {
  if (length < 5 || length % 2 == 0) throw ConfigError("second-derivative kernel needs odd length >= 5");
  const std::size_t m = length / 2;
  // Unknowns c_0..c_m of the symmetric kernel.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  {
    std::vector<double> row(m + 1, 2.0);
    row[0] = 1.0;
    a.push_back(row);
    b.push_back(0.0);
  }
  {
    std::vector<double> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = 2.0 * static_cast<double>(j * j);
    a.push_back(row);
    b.push_back(2.0);
  }
  for (std::size_t q = 0; q + 1 < m; ++q) {
    const std::size_t p = 2 * q;
    std::vector<double> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      const double sign = j % 2 ? -1.0 : 1.0;
      row[j] = (j == 0 ? (p == 0 ? 1.0 : 0.0) : 2.0 * sign * ipow(static_cast<double>(j), p));
    }
    a.push_back(row);
    b.push_back(0.0);
  }
  const std::vector<double> half = solve(std::move(a), std::move(b));
  std::vector<double> full(length);
  for (std::size_t j = 0; j <= m; ++j) {
    full[m + j] = half[j];
    full[m - j] = half[j];
  }
  return full;
}

// ---------------------------------------------------------------------------

FrameHistory::FrameHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 4) throw ConfigError("frame history needs at least 4 frames");
}

void FrameHistory::push(SurfaceFrame frame, double power) {
  if (!frames_.empty() && (frame.rows != frames_.back().rows || frame.cols != frames_.back().cols)) {
    throw ContractError("frame size changed within a history");
  }
  frames_.push_back(std::move(frame));
  power_.push_back(power);
  if (frames_.size() > capacity_) {
    frames_.pop_front();
    power_.pop_front();
  }
}

void FrameHistory::clear() noexcept {
  frames_.clear();
  power_.clear();
}

double FrameHistory::period() const {
  if (frames_.size() < 2) throw ContractError("insufficient history");
  const double dt = (frames_.back().t - frames_.front().t) / static_cast<double>(frames_.size() - 1);
  if (!(dt > 0.0)) throw ContractError("frame timestamps must increase");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (std::abs(frames_[i].t - frames_[i - 1].t - dt) > 1e-9) throw ContractError("frames are not uniformly spaced");
  }
  return dt;
}

SurfaceFrame nr_time_derivative(const FrameHistory& history) {
  if (!history.full()) throw ContractError("insufficient history");
  const double dt = history.period();
  const std::vector<double> c = backward_derivative_coefficients(history.capacity());
  const SurfaceFrame& newest = history.newest();
  SurfaceFrame out(newest.rows, newest.cols, newest.pitch, newest.t, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    const SurfaceFrame& f = history.frame(j);
    const double w = c[j] / dt;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += w * f.values[i];
  }
  return out;
}

SurfaceFrame nr_surface_laplacian(const SurfaceFrame& frame) {
  if (frame.rows < 5 || frame.cols < 5) throw ConfigError("surface Laplacian needs frames of at least 5 x 5");
  if (!(frame.pitch > 0.0)) throw ConfigError("frame pitch must be positive");
  static const std::vector<double> c = centered_second_derivative_coefficients(5);
  const auto m = static_cast<std::ptrdiff_t>(c.size() / 2);
  const double inv_h2 = 1.0 / (frame.pitch * frame.pitch);
  SurfaceFrame out(frame.rows, frame.cols, frame.pitch, frame.t, 0.0);
  for (std::size_t r = 0; r < frame.rows; ++r) {
    for (std::size_t col = 0; col < frame.cols; ++col) {
      double s = 0.0;
      for (std::ptrdiff_t d = -m; d <= m; ++d) {
        const double w = c[static_cast<std::size_t>(d + m)];
        if (w == 0.0) continue;
        s += w * frame.at(r, reflect(static_cast<std::ptrdiff_t>(col) + d, frame.cols));
        s += w * frame.at(reflect(static_cast<std::ptrdiff_t>(r) + d, frame.rows), col);
      }
      out.at(r, col) = s * inv_h2;
    }
  }
  return out;
}

RtcField rtc(const SurfaceFrame& rate, double beta) {
  if (!(beta >= 1.0)) throw ContractError("RTC sharpening beta must be >= 1");
  const std::size_t n = rate.size();
  RtcField out;
  out.beta = beta;
  out.weights.assign(n, 0.0);
  if (n == 0) return out;

  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = beta * std::abs(rate.values[i]);
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const double emax = *hi;
  const double floor = std::exp(*lo - emax);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.weights[i] = std::exp(e[i] - emax) - floor;
    sum += out.weights[i];
  }
  // The unshifted sum is sum * exp(emax).
  if (!(sum > 0.0) || std::log(sum) + emax < std::log(1e-12)) {
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(n));
    out.uniform_fallback = true;
    return out;
  }
  for (double& w : out.weights) w /= sum;
  return out;
}

double surface_diffusivity_ratio(const std::array<double, 3>& axis_curvature) {
  // Per-face share of the curvature: x-, x+, y-, y+, z- (bottom). Top insulated.
  const double lateral = 0.5 * (axis_curvature[0] + axis_curvature[0]) + 0.5 * (axis_curvature[1] + axis_curvature[1]);
  const double bottom = 0.5 * axis_curvature[2];
  if (lateral == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (lateral + bottom) / lateral;
}

EstimateResult estimate_diffusivity(const FrameHistory& history, const AnraParams& params) {
  EstimateResult result;
  if (!history.full()) return result;
  for (std::size_t age = 0; age < history.size(); ++age) {
    if (history.power(age) != 0.0) {
      result.status = EstimateStatus::WindowInactive;
      return result;
    }
  }

  const SurfaceFrame rate = nr_time_derivative(history);
  const SurfaceFrame lap = nr_surface_laplacian(history.newest());
  const RtcField att = rtc(rate, params.beta);

  const std::size_t m = rate.size();
  double lap_max = 0.0;
  for (double v : lap.values) lap_max = std::max(lap_max, std::abs(v));
  const double eps_lap = params.lap_floor_fraction * lap_max;
  const double tau = params.rtc_threshold_factor / static_cast<double>(m);

  double wsum = 0.0, acc = 0.0;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::abs(lap.values[i]) > eps_lap) || !(att.weights[i] > tau)) continue;
    wsum += att.weights[i];
    acc += att.weights[i] * (rate.values[i] / lap.values[i]);
    ++valid;
  }
  if (valid == 0 || !(wsum > 0.0)) {
    result.status = EstimateStatus::NoConfidentSensors;
    return result;
  }

  DiffusivityEstimate est;
  est.ahat_raw = acc / wsum;
  est.ahat = kDepthCorrection * est.ahat_raw;
  est.valid_fraction = static_cast<double>(valid) / static_cast<double>(m);
  est.t = history.newest().t;
  result.status = EstimateStatus::Ok;
  result.estimate = est;
  return result;
}

const char* to_string(EstimateStatus s) noexcept {
  switch (s) {
    case EstimateStatus::Ok: return "ok";
    case EstimateStatus::InsufficientHistory: return "insufficient history";
    case EstimateStatus::WindowInactive: return "window inactive";
    case EstimateStatus::NoConfidentSensors: return "no confident sensors";
  }
  return "?";
}

}  // namespace heatobs
