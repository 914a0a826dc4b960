#pragma once

// Green's cubehelix colour scheme: a helix through the RGB cube whose
// perceived brightness grows monotonically from black to white.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace nhdirac {

struct CubehelixParams {
  double start = 0.5;
  double rotations = -1.5;
  double hue = 1.0;
  double gamma = 1.0;
};

using Rgb = std::array<std::uint8_t, 3>;

inline std::array<double, 3> cubehelix_unit(double v, const CubehelixParams& p = {}) {
  v = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
  const double lambda = std::pow(v, p.gamma);
  const double phi = 2.0 * std::numbers::pi * (p.start / 3.0 + 1.0 + p.rotations * v);
  const double amp = p.hue * lambda * (1.0 - lambda) / 2.0;
  const double c = std::cos(phi), s = std::sin(phi);
  return {lambda + amp * (-0.14861 * c + 1.78277 * s), lambda + amp * (-0.29227 * c - 0.90649 * s),
          lambda + amp * (1.97294 * c)};
}

inline Rgb cubehelix(double v, const CubehelixParams& p = {}) {
  const auto u = cubehelix_unit(v, p);
  Rgb out{};
  for (int i = 0; i < 3; ++i) out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(u[i], 0.0, 1.0) * 255.0));
  return out;
}

}  // namespace nhdirac
