#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "dense.hpp"
#include "lattice_operator.hpp"
#include "metric.hpp"
#include "spectral.hpp"

namespace nhdirac {

enum class Classification { Hermitian, QuasiHermitian, PTPseudoHermitian, NonHermitian };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::Hermitian: return "Hermitian";
    case Classification::QuasiHermitian: return "QuasiHermitian";
    case Classification::PTPseudoHermitian: return "PTPseudoHermitian";
    case Classification::NonHermitian: return "NonHermitian";
  }
  return "?";
}

// Spinor factor of the parity operator P = (n -> L-1-n) (x) sigma_p.
enum class SpinorParity { identity, sigma_x, sigma_y, sigma_z };

inline std::string to_string(SpinorParity p) {
  switch (p) {
    case SpinorParity::identity: return "identity";
    case SpinorParity::sigma_x: return "sigma_x";
    case SpinorParity::sigma_y: return "sigma_y";
    case SpinorParity::sigma_z: return "sigma_z";
  }
  return "?";
}

inline Mat2 spinor_matrix(SpinorParity p) {
  switch (p) {
    case SpinorParity::identity: return identity2();
    case SpinorParity::sigma_x: return sigma_x();
    case SpinorParity::sigma_y: return sigma_y();
    case SpinorParity::sigma_z: return sigma_z();
  }
  return identity2();
}

struct SymmetryReport {
  double hermitian_residual = 0.0;
  double quasi_hermitian_residual = 0.0;
  double pt_residual = 0.0;
  SpinorParity pt_spinor = SpinorParity::identity;
  Classification classification = Classification::NonHermitian;
  bool spectrum_real = false;
  double tolerance = 1e-12;
};

namespace detail {

// S H S^-1 for diagonal S = diag(s_n) (x) I2, skipping structural zeros so that
// infinite or vanishing factors at decoupled horizon sites do not poison the
// result. A nonzero entry meeting a non-finite ratio is reported as such.
inline CMatrix diagonal_similarity(const CMatrix& h, std::span<const double> site_factor) {
  CMatrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const cplx v = h(i, j);
      if (v == cplx{}) continue;
      const double si = site_factor[i / 2], sj = site_factor[j / 2];
      out(i, j) = i / 2 == j / 2 ? v : v * (si / sj);
    }
  }
  return out;
}

}  // namespace detail

// S H S^-1 with S = diag(sqrt(beta_n)) (x) I2: isospectral to H but not
// unitarily equivalent.
inline LatticeOperator imaginary_gauge(const LatticeOperator& h, std::span<const double> beta) {
  if (beta.size() != h.sites()) throw error("imaginary_gauge: beta has wrong length");
  std::vector<double> s(beta.size());
  for (std::size_t n = 0; n < beta.size(); ++n) {
    if (!(beta[n] > 0.0)) throw metric_error("imaginary_gauge: beta must be positive", static_cast<long>(n));
    s[n] = std::sqrt(beta[n]);
  }
  LatticeOperator out = h;
  out.matrix = detail::diagonal_similarity(h.matrix, s);
  if (!all_finite(out.matrix)) throw numerical_error("imaginary_gauge: divergent similarity factor");
  out.provenance = h.provenance.empty() ? "imaginary gauge" : h.provenance + ", imaginary gauge";
  return out;
}

// ||eta H eta^-1 - H^H||_F / ||H||_F with eta = diag(beta_n) (x) I2.
inline double quasi_hermitian_residual(const CMatrix& h, std::span<const double> beta) {
  const double ref = frobenius_norm(h);
  if (ref == 0.0) return 0.0;
  const CMatrix t = detail::diagonal_similarity(h, beta);
  if (!all_finite(t)) return std::numeric_limits<double>::infinity();
  double diff = 0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) diff += std::norm(t(i, j) - std::conj(h(j, i)));
  return std::sqrt(diff) / ref;
}

// ||H - P H* P^-1||_F / ||H||_F for P = (site reversal) (x) sigma_p.
inline double pt_residual(const CMatrix& h, SpinorParity p) {
  const double ref = frobenius_norm(h);
  if (ref == 0.0) return 0.0;
  const std::size_t L = h.rows() / 2;
  const Mat2 sp = spinor_matrix(p);
  const Mat2 sp_inv = sp.adjoint();
  double diff = 0;
  for (std::size_t n = 0; n < L; ++n) {
    for (std::size_t m = 0; m < L; ++m) {
      const std::size_t rn = L - 1 - n, rm = L - 1 - m;
      // block (n, m) of P H* P^-1 is sp conj(H[rn, rm]) sp^-1
      Mat2 b;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) b.m[2 * i + j] = std::conj(h(2 * rn + i, 2 * rm + j));
      if (b == Mat2{} && h(2 * n, 2 * m) == cplx{} && h(2 * n, 2 * m + 1) == cplx{} &&
          h(2 * n + 1, 2 * m) == cplx{} && h(2 * n + 1, 2 * m + 1) == cplx{})
        continue;
      const Mat2 t = sp * b * sp_inv;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) diff += std::norm(h(2 * n + i, 2 * m + j) - t(i, j));
    }
  }
  return std::sqrt(diff) / ref;
}

// max_j |Im E_j| <= tol * max_j |E_j|
inline bool unbroken_pt(const SpectralDecomposition& spectrum, double tol) {
  if (spectrum.eigenvalues.empty()) throw error("unbroken_pt: empty spectrum");
  double im = 0, mag = 0;
  for (const auto& e : spectrum.eigenvalues) {
    im = std::max(im, std::abs(e.imag()));
    mag = std::max(mag, std::abs(e));
  }
  return im <= tol * mag;
}

inline bool unbroken_pt(const LatticeOperator& h, const SpectralDecomposition& spectrum, double tol) {
  if (spectrum.size() != h.dim()) throw error("unbroken_pt: spectrum does not belong to this operator");
  return unbroken_pt(spectrum, tol);
}

inline constexpr double kDefaultSymmetryTolerance = 1e-12;
// Tolerance on max|Im E| / max|E| for the real-spectrum flag.
inline constexpr double kRealSpectrumTolerance = 1e-8;

// Residuals and classification. When no spectrum is supplied one is computed
// (eigenvalues only) to fill spectrum_real.
inline SymmetryReport classify(const LatticeOperator& h, const SampledMetric& metric,
                               double tol = kDefaultSymmetryTolerance,
                               const SpectralDecomposition* spectrum = nullptr) {
  if (!(tol > 0.0)) throw error("classify: tolerance must be positive");
  if (metric.sites() != h.sites()) throw error("classify: metric and operator sizes differ");
  SymmetryReport r;
  r.tolerance = tol;
  r.hermitian_residual = hermitian_residual(h.matrix);
  r.quasi_hermitian_residual = quasi_hermitian_residual(h.matrix, metric.beta);
  r.pt_residual = std::numeric_limits<double>::infinity();
  for (auto p : {SpinorParity::identity, SpinorParity::sigma_x, SpinorParity::sigma_y, SpinorParity::sigma_z}) {
    const double res = pt_residual(h.matrix, p);
    if (res < r.pt_residual) {
      r.pt_residual = res;
      r.pt_spinor = p;
    }
  }
  if (r.hermitian_residual <= tol) {
    r.classification = Classification::Hermitian;
  } else if (r.quasi_hermitian_residual <= tol) {
    r.classification = Classification::QuasiHermitian;
  } else if (r.pt_residual <= tol) {
    r.classification = Classification::PTPseudoHermitian;
  } else {
    r.classification = Classification::NonHermitian;
  }
  if (spectrum) {
    r.spectrum_real = unbroken_pt(h, *spectrum, kRealSpectrumTolerance);
  } else {
    const auto s = eig_auto(h, {.vectors = false});
    r.spectrum_real = unbroken_pt(h, s, kRealSpectrumTolerance);
  }
  return r;
}

}  // namespace nhdirac
