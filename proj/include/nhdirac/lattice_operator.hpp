#pragma once

// Lattice Hamiltonian from the renormalized-derivative regularization
//
//   H psi_n = -(i sqrt(alpha_n) / (2 a beta_n)) g0^-1 g1 (sqrt(alpha_{n+1}) psi_{n+1}
//                                                     - sqrt(alpha_{n-1}) psi_{n-1})
//             + M alpha_n g0^-1 psi_n - (i/2) (d_t beta_n / beta_n) psi_n
//
// stored densely in site-major order: index = 2 n + spinor component.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "metric.hpp"

namespace nhdirac {

struct Mat2 {
  // row-major {m00, m01, m10, m11}
  std::array<cplx, 4> m{};

  cplx operator()(int i, int j) const { return m[2 * i + j]; }
  bool operator==(const Mat2&) const = default;

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
  }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {{a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]}};
  }
  friend Mat2 operator*(cplx s, const Mat2& a) { return {{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}}; }
  Mat2 adjoint() const { return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}}; }
};

inline Mat2 identity2() { return {{1.0, 0.0, 0.0, 1.0}}; }
inline Mat2 sigma_x() { return {{0.0, 1.0, 1.0, 0.0}}; }
inline Mat2 sigma_y() { return {{0.0, cplx(0, -1), cplx(0, 1), 0.0}}; }
inline Mat2 sigma_z() { return {{1.0, 0.0, 0.0, -1.0}}; }

struct GammaAlgebra {
  Mat2 gamma0, gamma1, gamma0_inv;
  Mat2 hop_kernel;   // gamma0^-1 gamma1
  Mat2 mass_kernel;  // gamma0^-1
};

// Weyl representation: gamma0 = sigma_x, gamma1 = i sigma_y.
inline GammaAlgebra gamma_algebra() {
  GammaAlgebra g;
  g.gamma0 = sigma_x();
  g.gamma1 = cplx(0, 1) * sigma_y();
  g.gamma0_inv = sigma_x();
  g.hop_kernel = g.gamma0_inv * g.gamma1;
  g.mass_kernel = g.gamma0_inv;
  return g;
}

enum class Boundary { open, periodic };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

struct LatticeOperator {
  CMatrix matrix;
  double t = 0.0;
  Boundary boundary = Boundary::open;
  double mass = 0.0;
  double spacing = 1.0;
  std::string provenance;

  std::size_t sites() const { return matrix.rows() / 2; }
  std::size_t dim() const { return matrix.rows(); }
};

// Per-site coefficients of the tight-binding form. Blocks are
//   H[n, n+1] = -(i / 2a) forward[n] K,   H[n, n-1] = +(i / 2a) backward[n] K,
//   H[n, n]   = mass[n] g0^-1 - (i/2) gain[n] I.
// For periodic chains forward[L-1] couples to site 0 and backward[0] to L-1.
struct HoppingTable {
  std::vector<double> forward, backward, mass, gain;
};

// sqrt(alpha_n alpha_m) / beta_n, taken as 0 whenever either alpha vanishes.
inline double guarded_hopping(double alpha_n, double alpha_m, double beta_n) {
  if (alpha_n == 0.0 || alpha_m == 0.0) return 0.0;
  return std::sqrt(alpha_n * alpha_m) / beta_n;
}

inline HoppingTable hopping_table(const SampledMetric& m, double mass, Boundary bc) {
  const std::size_t L = m.sites();
  if (L < 2) throw metric_error("operator needs at least 2 sites");
  HoppingTable h;
  h.forward.assign(L, 0.0);
  h.backward.assign(L, 0.0);
  h.mass.resize(L);
  h.gain.resize(L);
  const bool periodic = bc == Boundary::periodic;
  for (std::size_t n = 0; n < L; ++n) {
    if (n + 1 < L || periodic) h.forward[n] = guarded_hopping(m.alpha[n], m.alpha[(n + 1) % L], m.beta[n]);
    if (n > 0 || periodic) h.backward[n] = guarded_hopping(m.alpha[n], m.alpha[(n + L - 1) % L], m.beta[n]);
    h.mass[n] = mass * m.alpha[n];
    h.gain[n] = m.dlog_beta_dt[n];
    if (!std::isfinite(h.forward[n]) || !std::isfinite(h.backward[n]))
      throw metric_error("divergent hopping at site " + std::to_string(n) + " (beta vanishes off-horizon)",
                         static_cast<long>(n));
    if (!std::isfinite(h.mass[n])) throw metric_error("non-finite mass term at site " + std::to_string(n));
  }
  return h;
}

namespace detail {

inline void add_block(CMatrix& H, std::size_t row_site, std::size_t col_site, const Mat2& b) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) H(2 * row_site + i, 2 * col_site + j) += b(i, j);
}

}  // namespace detail

inline LatticeOperator assemble(const HoppingTable& h, double spacing, Boundary bc) {
  const std::size_t L = h.mass.size();
  const auto g = gamma_algebra();
  LatticeOperator op;
  op.matrix = CMatrix(2 * L, 2 * L);
  op.boundary = bc;
  op.spacing = spacing;
  const bool periodic = bc == Boundary::periodic;
  for (std::size_t n = 0; n < L; ++n) {
    if (n + 1 < L || periodic) {
      const double c = h.forward[n] / (2 * spacing);
      if (c != 0.0) detail::add_block(op.matrix, n, (n + 1) % L, cplx(0, -c) * g.hop_kernel);
    }
    if (n > 0 || periodic) {
      const double c = h.backward[n] / (2 * spacing);
      if (c != 0.0) detail::add_block(op.matrix, n, (n + L - 1) % L, cplx(0, c) * g.hop_kernel);
    }
    Mat2 onsite = cplx(h.mass[n]) * g.mass_kernel + cplx(0, -0.5 * h.gain[n]) * identity2();
    detail::add_block(op.matrix, n, n, onsite);
  }
  return op;
}

inline LatticeOperator build(const SampledMetric& metric, double mass, double spacing,
                             Boundary bc = Boundary::open, std::string provenance = {}) {
  if (!(spacing > 0.0)) throw metric_error("lattice spacing must be positive");
  LatticeOperator op = assemble(hopping_table(metric, mass, bc), spacing, bc);
  op.t = metric.t;
  op.mass = mass;
  op.provenance = std::move(provenance);
  if (!all_finite(op.matrix)) throw numerical_error("operator has non-finite entries");
  return op;
}

// Flat kinetic term with an arbitrary site-dependent mass; the field
// sqrt(alpha) psi evolves under this operator when alpha == beta.
inline LatticeOperator build_flat_with_mass(std::span<const double> site_mass, double spacing, Boundary bc,
                                            double t = 0.0) {
  const std::size_t L = site_mass.size();
  HoppingTable h;
  h.forward.assign(L, 1.0);
  h.backward.assign(L, 1.0);
  if (bc == Boundary::open) {
    h.forward[L - 1] = 0.0;
    h.backward[0] = 0.0;
  }
  h.mass.assign(site_mass.begin(), site_mass.end());
  h.gain.assign(L, 0.0);
  LatticeOperator op = assemble(h, spacing, bc);
  op.t = t;
  op.provenance = "flat kinetic, site-dependent mass";
  return op;
}

// Direct symmetric-difference discretization of
//   H = -i (alpha/beta) K d_x - (i/2) (d_x alpha / beta) K + M alpha g0^-1 - (i/2) d_t beta / beta
// with open boundaries; d_x alpha uses central differences (one-sided at the ends).
inline LatticeOperator naive_build(const SampledMetric& metric, double mass, double spacing) {
  const std::size_t L = metric.sites();
  if (L < 2) throw metric_error("operator needs at least 2 sites");
  const auto g = gamma_algebra();
  LatticeOperator op;
  op.matrix = CMatrix(2 * L, 2 * L);
  op.t = metric.t;
  op.mass = mass;
  op.spacing = spacing;
  op.provenance = "naive symmetric difference";
  for (std::size_t n = 0; n < L; ++n) {
    const double ratio = metric.alpha[n] == 0.0 ? 0.0 : metric.alpha[n] / metric.beta[n];
    const double c = ratio / (2 * spacing);
    if (n + 1 < L) detail::add_block(op.matrix, n, n + 1, cplx(0, -c) * g.hop_kernel);
    if (n > 0) detail::add_block(op.matrix, n, n - 1, cplx(0, c) * g.hop_kernel);
    double dalpha;
    if (n == 0) {
      dalpha = (metric.alpha[1] - metric.alpha[0]) / spacing;
    } else if (n + 1 == L) {
      dalpha = (metric.alpha[n] - metric.alpha[n - 1]) / spacing;
    } else {
      dalpha = (metric.alpha[n + 1] - metric.alpha[n - 1]) / (2 * spacing);
    }
    const double grad = metric.alpha[n] == 0.0 && !std::isfinite(metric.beta[n]) ? 0.0 : dalpha / metric.beta[n];
    Mat2 onsite = cplx(0, -0.5 * grad) * g.hop_kernel + cplx(mass * metric.alpha[n]) * g.mass_kernel +
                  cplx(0, -0.5 * metric.dlog_beta_dt[n]) * identity2();
    detail::add_block(op.matrix, n, n, onsite);
  }
  if (!all_finite(op.matrix)) throw numerical_error("operator has non-finite entries");
  return op;
}

}  // namespace nhdirac
