#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nhdirac/lattice_operator.hpp"
#include "nhdirac/metric.hpp"
#include "nhdirac/observables.hpp"
#include "nhdirac/spectral.hpp"

using namespace nhdirac;

namespace {

SpectralDecomposition spectrum(MetricFamily f, std::size_t L, double mass, double t = 0.0) {
  return eig_auto(build(sample(MetricModel{std::move(f), 1.0, L}, t), mass, 1.0));
}

std::size_t nearest_index(const std::vector<double>& grid, double e) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (std::abs(grid[k] - e) < std::abs(grid[best] - e)) best = k;
  return best;
}

}  // namespace

TEST(Lorentzian, ShapeAndWeight) {
  const double g = 0.05;
  EXPECT_DOUBLE_EQ(lorentzian_delta(0.0, g), 1.0 / (std::numbers::pi * g));
  EXPECT_DOUBLE_EQ(lorentzian_delta(g, g), 0.5 * lorentzian_delta(0.0, g));
  EXPECT_EQ(lorentzian_delta(0.3, g), lorentzian_delta(-0.3, g));
  // trapezoid over [-100 g, 100 g]: (2/pi) atan(100)
  const int n = 200000;
  const double h = 200 * g / n;
  double s = 0;
  for (int k = 0; k <= n; ++k) s += (k == 0 || k == n ? 0.5 : 1.0) * lorentzian_delta(-100 * g + k * h, g);
  EXPECT_NEAR(s * h, 2 / std::numbers::pi * std::atan(100.0), 1e-7);
  EXPECT_NEAR(s * h, 0.9936, 1e-4);
}

TEST(Ldos, RindlerHorizonPeak) {
  const std::size_t L = 40;
  const auto spec = spectrum(Rindler{1.0 / (L - 1)}, L, 0.0);
  const auto g = ldos_real(spec, EnergyGrid{-0.2, 0.2, 41}, 0.01);
  const std::size_t zero = nearest_index(g.energies, 0.0);
  EXPECT_NEAR(g.at(0, zero), 1.0, 1e-12);
  EXPECT_TRUE(g.normalized);
}

TEST(Ldos, FlatMassGap) {
  const std::size_t L = 60;
  const auto spec = spectrum(Flat{}, L, 1.0);
  const auto g = ldos_real(spec, EnergyGrid{-2.0, 2.0, 401}, 0.01);
  const std::size_t zero = nearest_index(g.energies, 0.0);
  for (std::size_t n = 0; n < L; ++n) EXPECT_LT(g.at(n, zero), 1e-3);
}

TEST(Ldos, HermitianImaginaryAxisRidge) {
  const std::size_t L = 30;
  const auto spec = spectrum(Rindler{0.03}, L, 1.0);
  const auto g = ldos_imag(spec, EnergyGrid{-0.5, 0.5, 101}, 0.02);
  const std::size_t zero = nearest_index(g.energies, 0.0);
  for (std::size_t n = 0; n < L; ++n)
    for (std::size_t k = 0; k < g.energies.size(); ++k) EXPECT_LE(g.at(n, k), g.at(n, zero) + 1e-15);
}

TEST(Ldos, WeylImaginaryRidge) {
  const std::size_t L = 30;
  const auto spec = spectrum(Weyl{0.02, 0.5}, L, 1.0, 0.4);
  const auto g = ldos_imag(spec, EnergyGrid{-0.5, 0.0, 101}, 0.01);
  const std::size_t ridge = nearest_index(g.energies, -0.25);
  for (std::size_t n = 0; n < L; ++n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < g.energies.size(); ++k)
      if (g.at(n, k) > g.at(n, best)) best = k;
    EXPECT_EQ(best, ridge) << n;
  }
}

TEST(Ldos, SumRuleUnnormalized) {
  const std::size_t L = 24;
  const auto spec = spectrum(Rindler{0.05}, L, 0.5);
  const double gamma = 0.02;
  const auto g = ldos_real(spec, EnergyGrid{-4.0, 4.0, 8001}, gamma, {.normalize = false});
  const double de = g.energies[1] - g.energies[0];
  for (std::size_t n = 0; n < L; ++n) {
    double s = 0;
    for (std::size_t k = 0; k < g.energies.size(); ++k) s += g.at(n, k) * de;
    // orthonormal eigenvectors put weight 1 per spinor component on every site
    double w = 0;
    const auto weights = site_weights(spec);
    for (std::size_t j = 0; j < spec.size(); ++j) w += weights[j * L + n];
    EXPECT_NEAR(s, w, 0.02 * w) << n;
    EXPECT_NEAR(w, 2.0, 0.02);
  }
}

TEST(Ldos, ChiralMirrorSymmetry) {
  const std::size_t L = 20;
  const auto spec = spectrum(Rindler{0.05}, L, 0.8);
  const auto g = ldos_real(spec, EnergyGrid{-1.5, 1.5, 301}, 0.03);
  const std::size_t ne = g.energies.size();
  for (std::size_t n = 0; n < L; ++n)
    for (std::size_t k = 0; k < ne; ++k) EXPECT_NEAR(g.at(n, k), g.at(n, ne - 1 - k), 1e-10);
}

TEST(Ldos, NormalizationIdempotent) {
  const auto spec = spectrum(DeSitter{1.0 / 29}, 30, 1.0);
  auto g = ldos_real(spec, EnergyGrid{-1.0, 1.0, 81}, 0.05);
  EXPECT_DOUBLE_EQ(g.max_value(), 1.0);
  const auto before = g.values;
  normalize(g);
  EXPECT_EQ(g.values, before);
}

TEST(Ldos, DegenerateGridFlagged) {
  LdosGrid g;
  g.sites = 2;
  g.energies = {0.0, 1.0};
  g.values.assign(4, 0.0);
  normalize(g);
  EXPECT_TRUE(g.degenerate);
  EXPECT_FALSE(g.normalized);
}

TEST(Ldos, RejectsBadInput) {
  const auto spec = spectrum(Flat{}, 6, 0.0);
  EXPECT_THROW(ldos_real(spec, EnergyGrid{-1, 1, 11}, 0.0), error);
  EXPECT_THROW(ldos_real(spec, EnergyGrid{-1, 1, 0}, 0.1), error);
  const auto values_only = eig_auto(build(sample(MetricModel{Flat{}, 1.0, 6}, 0.0), 0.0, 1.0), {.vectors = false});
  EXPECT_THROW(ldos_real(values_only, EnergyGrid{-1, 1, 11}, 0.1), error);
}

TEST(DefaultGamma, ScalesWithSpan) {
  const auto spec = spectrum(Flat{}, 50, 0.0);
  double lo = INFINITY, hi = -INFINITY;
  for (auto e : spec.eigenvalues) lo = std::min(lo, e.real()), hi = std::max(hi, e.real());
  EXPECT_DOUBLE_EQ(default_gamma(spec, EnergyAxis::real), 20 * (hi - lo) / (100 * std::numbers::pi));
  // zero-width imaginary projection falls back to the real span
  EXPECT_DOUBLE_EQ(default_gamma(spec, EnergyAxis::imaginary), default_gamma(spec, EnergyAxis::real));
  const auto grid = default_grid(spec, EnergyAxis::real, 0.1);
  EXPECT_DOUBLE_EQ(grid.min, lo - 0.5);
  EXPECT_EQ(grid.count, 401u);
}

TEST(HorizonModes, RindlerAndAntiDeSitter) {
  const std::size_t L = 80;
  const auto modes = horizon_modes(spectrum(Rindler{1.0 / (L - 1)}, L, 1.0), 1e-10);
  ASSERT_EQ(modes.size(), 2u);
  for (const auto& m : modes) {
    EXPECT_EQ(m.site, 0u);
    EXPECT_NEAR(m.weight, 1.0, 1e-12);
  }
  EXPECT_TRUE(horizon_modes(spectrum(AntiDeSitter{1.0 / (L - 1)}, L, 1.0), 1e-3).empty());
}

TEST(HorizonModes, DeSitterFarEnd) {
  const std::size_t L = 80;
  const auto modes = horizon_modes(spectrum(DeSitter{1.0 / (L - 1)}, L, 1.0), 1e-10);
  ASSERT_EQ(modes.size(), 2u);
  for (const auto& m : modes) EXPECT_EQ(m.site, L - 1);
}
