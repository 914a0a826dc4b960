#pragma once

// Local density of states on the real and imaginary energy axes,
//   LDOS(n, E) = sum_j w_j(n) delta_G(E_j - E),   w_j(n) = sum_s |v_j[2n + s]|^2,
// with the Lorentzian delta_G(x) = (1/pi) G / (x^2 + G^2). Right eigenvectors are
// used as they are, without biorthogonal weighting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "spectral.hpp"

namespace nhdirac {

enum class EnergyAxis { real, imaginary };

inline const char* to_string(EnergyAxis a) { return a == EnergyAxis::real ? "real" : "imaginary"; }

struct EnergyGrid {
  double min = -1.0;
  double max = 1.0;
  std::size_t count = 201;

  std::vector<double> values() const {
    std::vector<double> e(count);
    if (count == 1) {
      e[0] = 0.5 * (min + max);
      return e;
    }
    const double step = (max - min) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) e[k] = min + step * static_cast<double>(k);
    e.back() = max;
    return e;
  }
};

struct LdosGrid {
  EnergyAxis axis = EnergyAxis::real;
  std::vector<double> energies;
  std::size_t sites = 0;
  std::vector<double> values;  // values[site * energies.size() + k]
  double gamma = 0.0;
  bool normalized = false;
  bool degenerate = false;  // all-zero grid, left unnormalized

  double& at(std::size_t site, std::size_t k) { return values[site * energies.size() + k]; }
  double at(std::size_t site, std::size_t k) const { return values[site * energies.size() + k]; }
  double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
};

inline double lorentzian_delta(double x, double gamma) {
  return gamma / (std::numbers::pi * (x * x + gamma * gamma));
}

// weights[j * L + n] = sum over spinor components of |v_j|^2 at site n
inline std::vector<double> site_weights(const SpectralDecomposition& spec) {
  if (!spec.has_vectors()) throw error("LDOS needs eigenvectors");
  const std::size_t dim = spec.eigenvectors.rows();
  const std::size_t L = dim / 2;
  const std::size_t nev = spec.size();
  std::vector<double> w(nev * L, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx* row = spec.eigenvectors.row(i);
    for (std::size_t j = 0; j < nev; ++j) w[j * L + i / 2] += std::norm(row[j]);
  }
  return w;
}

// Divides by the grid maximum; an all-zero grid is flagged and left as is.
inline void normalize(LdosGrid& g) {
  const double peak = g.max_value();
  if (!(peak > 0.0)) {
    g.degenerate = true;
    return;
  }
  for (auto& v : g.values) v /= peak;
  g.normalized = true;
}

struct LdosOptions {
  bool normalize = true;
};

inline LdosGrid ldos(const SpectralDecomposition& spec, EnergyAxis axis, const EnergyGrid& grid, double gamma,
                     LdosOptions opts = {}) {
  if (!(gamma > 0.0)) throw error("LDOS broadening must be positive");
  if (grid.count == 0) throw error("LDOS energy grid is empty");
  const auto w = site_weights(spec);
  LdosGrid g;
  g.axis = axis;
  g.energies = grid.values();
  g.sites = spec.eigenvectors.rows() / 2;
  g.gamma = gamma;
  const std::size_t ne = g.energies.size();
  g.values.assign(g.sites * ne, 0.0);
  std::vector<double> kernel(ne);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double e = axis == EnergyAxis::real ? spec.eigenvalues[j].real() : spec.eigenvalues[j].imag();
    for (std::size_t k = 0; k < ne; ++k) kernel[k] = lorentzian_delta(e - g.energies[k], gamma);
    const double* wj = w.data() + j * g.sites;
    for (std::size_t n = 0; n < g.sites; ++n) {
      if (wj[n] == 0.0) continue;
      double* row = g.values.data() + n * ne;
      for (std::size_t k = 0; k < ne; ++k) row[k] += wj[n] * kernel[k];
    }
  }
  if (opts.normalize) normalize(g);
  return g;
}

inline LdosGrid ldos_real(const SpectralDecomposition& spec, const EnergyGrid& grid, double gamma,
                          LdosOptions opts = {}) {
  return ldos(spec, EnergyAxis::real, grid, gamma, opts);
}

inline LdosGrid ldos_imag(const SpectralDecomposition& spec, const EnergyGrid& grid, double gamma,
                          LdosOptions opts = {}) {
  return ldos(spec, EnergyAxis::imaginary, grid, gamma, opts);
}

// 20 * span / (2 L pi): a few level spacings of the projected spectrum. Falls
// back to the spread of the other axis, then to 1e-3, when the projection is flat.
inline double default_gamma(const SpectralDecomposition& spec, EnergyAxis axis) {
  if (spec.size() == 0) throw error("default_gamma: empty spectrum");
  auto span_of = [&](bool real) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& e : spec.eigenvalues) {
      const double v = real ? e.real() : e.imag();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  double span = span_of(axis == EnergyAxis::real);
  if (span <= 0.0) span = span_of(axis != EnergyAxis::real);
  if (span <= 0.0) return 1e-3;
  return 20.0 * span / (static_cast<double>(spec.size()) * std::numbers::pi);
}

// Grid covering the projected spectrum with a margin of 5 gamma on each side.
inline EnergyGrid default_grid(const SpectralDecomposition& spec, EnergyAxis axis, double gamma,
                               std::size_t count = 401) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& e : spec.eigenvalues) {
    const double v = axis == EnergyAxis::real ? e.real() : e.imag();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo - 5 * gamma, hi + 5 * gamma, count};
}

struct HorizonMode {
  std::size_t eigenindex;
  std::size_t site;
  double weight;
};

// Eigenpairs with |E| <= tol_energy carrying at least tol_localization of their
// weight on a single site.
inline std::vector<HorizonMode> horizon_modes(const SpectralDecomposition& spec, double tol_energy,
                                              double tol_localization = 0.99) {
  const auto w = site_weights(spec);
  const std::size_t L = spec.eigenvectors.rows() / 2;
  std::vector<HorizonMode> out;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (std::abs(spec.eigenvalues[j]) > tol_energy) continue;
    const double* wj = w.data() + j * L;
    const auto it = std::max_element(wj, wj + L);
    if (*it >= tol_localization) out.push_back({j, static_cast<std::size_t>(it - wj), *it});
  }
  return out;
}

}  // namespace nhdirac
