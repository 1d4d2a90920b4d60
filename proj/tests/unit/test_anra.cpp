#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "heatobs/anra.hpp"
#include "heatobs/errors.hpp"

using namespace heatobs;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
SurfaceFrame frame_from(std::size_t rows, std::size_t cols, double h, double t, F&& fn) {
  SurfaceFrame f(rows, cols, h, t);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) f.at(r, c) = fn(c * h, r * h);
  }
  return f;
}

// Decaying separable cosine mode of the 2D heat equation on [0, W] x [0, H]
// with insulated edges: T0 + A exp(-a k^2 t) cos(kx x) cos(ky y).
struct SlabMode {
  double a, kx, ky, amp;
  double operator()(double x, double y, double t) const {
    return 300.0 + amp * std::exp(-a * (kx * kx + ky * ky) * t) * std::cos(kx * x) * std::cos(ky * y);
  }
};

FrameHistory slab_history(const SlabMode& m, std::size_t rows, std::size_t cols, double h, double dt, double t0,
                          std::size_t len = 7) {
  FrameHistory hist(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double t = t0 + k * dt;
    hist.push(frame_from(rows, cols, h, t, [&](double x, double y) { return m(x, y, t); }), 0.0);
  }
  return hist;
}

}  // namespace

// ---------------------------------------------------------------------------
// Filters

TEST(BackwardDerivative, ExactOnQuadraticsAndFlatAtNyquist) {
  for (std::size_t len : {4u, 5u, 7u, 9u}) {
    const std::vector<double> c = backward_derivative_coefficients(len);
    // Sample j lies at t = -j; the derivative at t = 0 of t^p is [p == 1].
    for (int p = 0; p <= 2; ++p) {
      double s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += c[j] * std::pow(-static_cast<double>(j), p);
      EXPECT_NEAR(s, p == 1 ? 1.0 : 0.0, 1e-10) << len << " " << p;
    }
    std::complex<double> nyq = 0.0;
    for (std::size_t j = 0; j < len; ++j) nyq += c[j] * std::polar(1.0, -kPi * static_cast<double>(j));
    EXPECT_LT(std::abs(nyq), 1e-10) << len;
  }
  EXPECT_THROW(backward_derivative_coefficients(3), ConfigError);
}

TEST(BackwardDerivative, HighFrequencyGainBelowNaiveDifference) {
  // Near Nyquist the smooth differentiator passes less than the first difference.
  const std::vector<double> c = backward_derivative_coefficients(7);
  for (double w : {0.8 * kPi, 0.9 * kPi}) {
    std::complex<double> h = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) h += c[j] * std::polar(1.0, -w * static_cast<double>(j));
    EXPECT_LT(std::abs(h), std::abs(1.0 - std::polar(1.0, -w)));
  }
}

TEST(SecondDerivative, LengthFiveKernel) {
  const std::vector<double> c = centered_second_derivative_coefficients(5);
  const std::vector<double> expect{0.25, 0.0, -0.5, 0.0, 0.25};
  ASSERT_EQ(c.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(c[i], expect[i], 1e-15);
  EXPECT_THROW(centered_second_derivative_coefficients(4), ConfigError);
  EXPECT_THROW(centered_second_derivative_coefficients(3), ConfigError);
}

TEST(SecondDerivative, LongerKernelsExactAndFlatAtNyquist) {
  for (std::size_t len : {7u, 9u}) {
    const std::vector<double> c = centered_second_derivative_coefficients(len);
    const auto m = static_cast<int>(len / 2);
    for (int p = 0; p <= 3; ++p) {
      double s = 0.0;
      for (int j = -m; j <= m; ++j) s += c[j + m] * std::pow(static_cast<double>(j), p);
      EXPECT_NEAR(s, p == 2 ? 2.0 : 0.0, 1e-10) << len << " " << p;
    }
    double nyq = 0.0;
    for (int j = -m; j <= m; ++j) nyq += c[j + m] * (j % 2 ? -1.0 : 1.0);
    EXPECT_NEAR(nyq, 0.0, 1e-10);
  }
}

// ---------------------------------------------------------------------------
// Surface Laplacian

TEST(SurfaceLaplacian, ConstantGivesZero) {
  const SurfaceFrame f(9, 11, 1e-3, 0.0, 310.0);
  for (double v : nr_surface_laplacian(f).values) EXPECT_EQ(v, 0.0);
}

TEST(SurfaceLaplacian, QuadraticInterior) {
  const double h = 5e-4, c = 3e4;
  const SurfaceFrame f = frame_from(12, 14, h, 0.0, [&](double x, double y) { return c * x * x + 0.5 * c * y * y; });
  const SurfaceFrame lap = nr_surface_laplacian(f);
  for (std::size_t r = 2; r + 2 < 12; ++r) {
    for (std::size_t col = 2; col + 2 < 14; ++col) EXPECT_NEAR(lap.at(r, col), 3.0 * c, 1e-6 * c);
  }
}

TEST(SurfaceLaplacian, MirrorSymmetricFieldAtEdge) {
  // An even function about the first row and column is reproduced at the border.
  const double h = 5e-4, c = 2e4;
  const SurfaceFrame f = frame_from(10, 10, h, 0.0, [&](double x, double y) { return c * (x * x + y * y); });
  EXPECT_NEAR(nr_surface_laplacian(f).at(0, 0), 4.0 * c, 1e-6 * c);
}

TEST(SurfaceLaplacian, SuppressesCheckerboardNoise) {
  const double h = 5e-4, c = 3e4;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  SurfaceFrame clean = frame_from(20, 20, h, 0.0, [&](double x, double y) { return c * (x * x + y * y); });
  SurfaceFrame noisy = clean;
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t col = 0; col < 20; ++col) noisy.at(r, col) += ((r + col) % 2 ? 0.05 : -0.05) + noise(rng);
  }
  const SurfaceFrame lap = nr_surface_laplacian(noisy);
  double nr_err = 0.0, naive_err = 0.0;
  for (std::size_t r = 2; r < 18; ++r) {
    for (std::size_t col = 2; col < 18; ++col) {
      const double naive = (noisy.at(r, col - 1) + noisy.at(r, col + 1) + noisy.at(r - 1, col) + noisy.at(r + 1, col) -
                            4.0 * noisy.at(r, col)) / (h * h);
      nr_err += std::pow(lap.at(r, col) - 4.0 * c, 2);
      naive_err += std::pow(naive - 4.0 * c, 2);
    }
  }
  EXPECT_LT(std::sqrt(nr_err / naive_err), 0.2);
  SurfaceFrame checker = frame_from(9, 9, h, 0.0, [](double, double) { return 0.0; });
  for (std::size_t i = 0; i < checker.size(); ++i) checker.values[i] = (i / 9 + i % 9) % 2 ? 1.0 : -1.0;
  for (double v : nr_surface_laplacian(checker).values) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(SurfaceLaplacian, RejectsSmallFrames) {
  EXPECT_THROW(nr_surface_laplacian(SurfaceFrame(4, 9, 1e-3, 0.0)), ConfigError);
  EXPECT_THROW(nr_surface_laplacian(SurfaceFrame(9, 9, 0.0, 0.0)), ConfigError);
}

// ---------------------------------------------------------------------------
// Attention weights

TEST(Rtc, WeightsSumToOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  SurfaceFrame rate(6, 7, 1e-3, 0.0);
  for (double& v : rate.values) v = d(rng);
  const RtcField w = rtc(rate, 100.0);
  double s = 0.0;
  for (double v : w.weights) {
    EXPECT_GE(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_FALSE(w.uniform_fallback);
}

TEST(Rtc, UniformRatesFallBack) {
  const RtcField w = rtc(SurfaceFrame(5, 5, 1e-3, 0.0, 0.3), 100.0);
  EXPECT_TRUE(w.uniform_fallback);
  for (double v : w.weights) EXPECT_DOUBLE_EQ(v, 1.0 / 25.0);
}

TEST(Rtc, TwoPixels) {
  SurfaceFrame rate(1, 2, 1e-3, 0.0);
  rate.values = {0.0, -1.0};
  const RtcField w = rtc(rate, 100.0);
  EXPECT_EQ(w.weights[0], 0.0);
  EXPECT_EQ(w.weights[1], 1.0);
}

TEST(Rtc, LargeExponentDoesNotOverflow) {
  SurfaceFrame rate(1, 3, 1e-3, 0.0);
  rate.values = {50.0, 49.0, 0.0};
  const RtcField w = rtc(rate, 100.0);
  for (double v : w.weights) EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(w.weights[0], 1.0, 1e-12);
}

TEST(Rtc, PermutationEquivariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  SurfaceFrame rate(1, 30, 1e-3, 0.0);
  for (double& v : rate.values) v = d(rng);
  std::vector<std::size_t> perm(30);
  for (std::size_t i = 0; i < 30; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  SurfaceFrame shuffled = rate;
  for (std::size_t i = 0; i < 30; ++i) shuffled.values[i] = rate.values[perm[i]];
  const RtcField a = rtc(rate, 100.0), b = rtc(shuffled, 100.0);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(b.weights[i], a.weights[perm[i]], 1e-15);
}

TEST(Rtc, RejectsSmallBeta) { EXPECT_THROW(rtc(SurfaceFrame(2, 2, 1e-3, 0.0), 0.5), ContractError); }

// ---------------------------------------------------------------------------
// History

TEST(FrameHistory, PeriodAndContracts) {
  FrameHistory h(4);
  EXPECT_THROW(h.period(), ContractError);
  for (int k = 0; k < 6; ++k) h.push(SurfaceFrame(5, 5, 1e-3, 0.02 * k), 0.0);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_NEAR(h.period(), 0.02, 1e-12);
  EXPECT_NEAR(h.newest().t, 0.1, 1e-12);
  EXPECT_NEAR(h.frame(3).t, 0.04, 1e-12);
  h.push(SurfaceFrame(5, 5, 1e-3, 0.13), 0.0);
  EXPECT_THROW(h.period(), ContractError);
  EXPECT_THROW(h.push(SurfaceFrame(5, 6, 1e-3, 0.14), 0.0), ContractError);
  EXPECT_THROW(FrameHistory(3), ConfigError);
}

TEST(TimeDerivative, ExactOnQuadraticInTime) {
  FrameHistory h(7);
  for (int k = 0; k < 7; ++k) {
    const double t = 0.5 + 0.02 * k;
    h.push(SurfaceFrame(5, 5, 1e-3, t, 300.0 + 3.0 * t - 2.0 * t * t), 0.0);
  }
  const double tn = 0.5 + 0.12;
  for (double v : nr_time_derivative(h).values) EXPECT_NEAR(v, 3.0 - 4.0 * tn, 1e-9);
}

TEST(TimeDerivative, Superposition) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  FrameHistory a(7), b(7), ab(7);
  for (int k = 0; k < 7; ++k) {
    SurfaceFrame fa(5, 6, 1e-3, 0.02 * k), fb(5, 6, 1e-3, 0.02 * k), fab(5, 6, 1e-3, 0.02 * k);
    for (std::size_t i = 0; i < fa.size(); ++i) {
      fa.values[i] = d(rng);
      fb.values[i] = d(rng);
      fab.values[i] = 2.0 * fa.values[i] - 3.0 * fb.values[i];
    }
    a.push(fa, 0.0);
    b.push(fb, 0.0);
    ab.push(fab, 0.0);
  }
  const SurfaceFrame ra = nr_time_derivative(a), rb = nr_time_derivative(b), rab = nr_time_derivative(ab);
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_NEAR(rab.values[i], 2.0 * ra.values[i] - 3.0 * rb.values[i], 1e-9);
}

// ---------------------------------------------------------------------------
// Estimator

TEST(Estimate, InsufficientHistory) {
  FrameHistory h(7);
  for (int k = 0; k < 6; ++k) h.push(SurfaceFrame(5, 5, 1e-3, 0.02 * k, 300.0), 0.0);
  const EstimateResult r = estimate_diffusivity(h, {});
  EXPECT_EQ(r.status, EstimateStatus::InsufficientHistory);
  EXPECT_FALSE(r);
  EXPECT_THROW(nr_time_derivative(h), ContractError);
}

TEST(Estimate, GatedWhileProbeIsOn) {
  const SlabMode m{1e-7, 2 * kPi / 0.01, 2 * kPi / 0.01, 1.0};
  FrameHistory h = slab_history(m, 21, 21, 5e-4, 0.02, 0.0);
  ASSERT_TRUE(estimate_diffusivity(h, {}));
  h.push(frame_from(21, 21, 5e-4, 0.14, [&](double x, double y) { return m(x, y, 0.14); }), 30.0);
  EXPECT_EQ(estimate_diffusivity(h, {}).status, EstimateStatus::WindowInactive);
  // The gate stays closed until the powered frame leaves the window.
  for (int k = 1; k <= 6; ++k) {
    const double t = 0.14 + 0.02 * k;
    h.push(frame_from(21, 21, 5e-4, t, [&](double x, double y) { return m(x, y, t); }), 0.0);
    EXPECT_EQ(estimate_diffusivity(h, {}).status, EstimateStatus::WindowInactive) << k;
  }
  h.push(frame_from(21, 21, 5e-4, 0.28, [&](double x, double y) { return m(x, y, 0.28); }), 0.0);
  EXPECT_EQ(estimate_diffusivity(h, {}).status, EstimateStatus::Ok);
}

TEST(Estimate, FlatFramesHaveNoConfidentSensors) {
  FrameHistory h(7);
  for (int k = 0; k < 7; ++k) h.push(SurfaceFrame(8, 8, 1e-3, 0.02 * k, 300.0), 0.0);
  EXPECT_EQ(estimate_diffusivity(h, {}).status, EstimateStatus::NoConfidentSensors);
}

TEST(Estimate, ThinSlabDecayRecoversDiffusivity) {
  // A thin insulated slab has no depth conduction, so its surface obeys the 2D
  // heat equation and the raw ratio is the diffusivity itself.
  for (double a : {1.4e-7, 1e-6}) {
    const double W = 0.02;
    const SlabMode m{a, 2 * kPi / W, kPi / W, 2.0};
    const double decay = a * (m.kx * m.kx + m.ky * m.ky);
    const double dt = 0.05 / decay;
    const FrameHistory h = slab_history(m, 41, 41, 5e-4, dt, 0.3);
    const EstimateResult r = estimate_diffusivity(h, {});
    ASSERT_EQ(r.status, EstimateStatus::Ok);
    EXPECT_NEAR(r.estimate->ahat_raw, a, 0.1 * a);
    EXPECT_EQ(r.estimate->ahat, 0.8 * r.estimate->ahat_raw);
    EXPECT_GT(r.estimate->valid_fraction, 0.0);
    EXPECT_LE(r.estimate->valid_fraction, 1.0);
    EXPECT_NEAR(r.estimate->t, 0.3 + 6 * dt, 1e-12);
  }
}

TEST(Estimate, AmplitudeInvariantForUniformRatio) {
  const double a = 1.4e-7, W = 0.02;
  double prev = 0.0;
  for (double amp : {0.5, 5.0, 50.0}) {
    const SlabMode m{a, 2 * kPi / W, 2 * kPi / W, amp};
    const double dt = 0.05 / (a * (m.kx * m.kx + m.ky * m.ky));
    const EstimateResult r = estimate_diffusivity(slab_history(m, 41, 41, 5e-4, dt, 0.0), {});
    ASSERT_TRUE(r);
    if (prev > 0.0) {
      EXPECT_NEAR(r.estimate->ahat_raw, prev, 1e-9 * prev);
    }
    prev = r.estimate->ahat_raw;
  }
}

TEST(DepthCorrection, EqualCurvaturesGiveFiveFourths) {
  EXPECT_DOUBLE_EQ(surface_diffusivity_ratio({-1.0, -1.0, -1.0}), 1.25);
  EXPECT_DOUBLE_EQ(kDepthCorrection * surface_diffusivity_ratio({3.0, 3.0, 3.0}), 1.0);
  EXPECT_DOUBLE_EQ(surface_diffusivity_ratio({-2.0, -1.0, 0.0}), 1.0);
  EXPECT_TRUE(std::isnan(surface_diffusivity_ratio({0.0, 0.0, 1.0})));
}
