#pragma once

// Dense eigensolvers and matrix exponentials.
//
// eig_hermitian: Householder reduction to a hermitian tridiagonal matrix, a
// diagonal phase that makes it real symmetric, then implicit-shift QL.
// eig_general: balancing (permutation + diagonal scaling), Householder
// Hessenberg reduction, single-shift complex QR to Schur form, triangular
// back-substitution for eigenvectors and back-transformation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "lattice_operator.hpp"

namespace nhdirac {

struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  CMatrix eigenvectors;  // column j belongs to eigenvalues[j]; empty when not requested
  std::vector<double> residuals;
  double matrix_norm = 0.0;  // Frobenius norm of the decomposed matrix

  std::size_t size() const { return eigenvalues.size(); }
  bool has_vectors() const { return eigenvectors.rows() != 0; }

  cvector eigenvector(std::size_t j) const {
    cvector v(eigenvectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eigenvectors(i, j);
    return v;
  }

  double max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  }

  // Every residual within rel_tol * ||H||.
  bool accepted(double rel_tol = 1e-8) const { return max_residual() <= rel_tol * std::max(matrix_norm, 1e-300); }
};

struct EigenOptions {
  bool vectors = true;
};

inline bool spectral_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

namespace detail {

inline void sort_decomposition(SpectralDecomposition& d) {
  const std::size_t n = d.eigenvalues.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return spectral_order(d.eigenvalues[i], d.eigenvalues[j]); });
  std::vector<cplx> ev(n);
  for (std::size_t k = 0; k < n; ++k) ev[k] = d.eigenvalues[order[k]];
  d.eigenvalues = std::move(ev);
  if (d.has_vectors()) {
    CMatrix v(d.eigenvectors.rows(), n);
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t k = 0; k < n; ++k) v(i, k) = d.eigenvectors(i, order[k]);
    d.eigenvectors = std::move(v);
  }
}

inline void normalize_columns(CMatrix& v) {
  std::vector<double> norms(v.cols(), 0.0);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) norms[j] += std::norm(v(i, j));
  for (auto& s : norms) s = s > 0 ? 1.0 / std::sqrt(s) : 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) v(i, j) *= norms[j];
}

inline void compute_residuals(const CMatrix& h, SpectralDecomposition& d) {
  d.matrix_norm = frobenius_norm(h);
  d.residuals.assign(d.size(), 0.0);
  if (!d.has_vectors()) return;
  const SparseRows sparse(h);
  const std::size_t n = h.rows();
  cvector v(n), hv(n);
  for (std::size_t j = 0; j < d.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) v[i] = d.eigenvectors(i, j);
    sparse.apply(v, hv);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(hv[i] - d.eigenvalues[j] * v[i]);
    d.residuals[j] = std::sqrt(s);
  }
}

// Indices whose row and column are zero off the diagonal; each one is an exact
// eigenpair (h_ii, e_i). Horizon sites produce these.
inline std::vector<bool> decoupled_indices(const CMatrix& h) {
  const std::size_t n = h.rows();
  std::vector<bool> iso(n, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && h(i, j) != cplx{}) iso[i] = iso[j] = false;
  return iso;
}

// Implicit QL on a real symmetric tridiagonal matrix (diagonal d, subdiagonal
// e[0..n-2]). zt holds eigenvectors as rows and is rotated in place.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* zt) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t total = 0;
  const std::size_t cap = 30 * std::max<std::size_t>(n, 1);
  double f = 0.0, tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      do {
        if (++total > cap)
          throw numerical_error("eig_hermitian: QL iteration did not converge at index " + std::to_string(l));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0, s = 0.0, s2 = 0.0;
        const double el1 = e[l + 1];
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (zt) {
            double* zi = zt->data() + i * n;
            double* zi1 = zt->data() + (i + 1) * n;
            for (std::size_t k = 0; k < n; ++k) {
              const double a = zi1[k];
              zi1[k] = s * zi[k] + c * a;
              zi[k] = c * zi[k] - s * a;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Hermitian eigensolver on a matrix without decoupled indices.
inline void hermitian_core(CMatrix a, bool want_vectors, std::vector<double>& values, CMatrix& vectors) {
  const std::size_t n = a.rows();
  std::vector<cvector> reflectors;  // u_k acting on indices k+1..n-1
  std::vector<double> taus;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    cvector u(m);
    double tail = 0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = a(k + 1 + i, k);
      if (i > 0) tail += std::norm(u[i]);
    }
    if (tail == 0.0) {
      reflectors.emplace_back();
      taus.push_back(0.0);
      continue;
    }
    const double xnorm = std::sqrt(tail + std::norm(u[0]));
    const cplx phase = u[0] == cplx{} ? cplx(1.0) : u[0] / std::abs(u[0]);
    u[0] += phase * xnorm;
    const double uu = 2.0 * xnorm * (xnorm + std::abs(a(k + 1, k)));
    const double tau = 2.0 / uu;

    // p = tau B u, q = p - (tau/2)(u^H p) u, B -= u q^H + q u^H
    cvector p(m);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx* bi = a.row(k + 1 + i) + k + 1;
      double re = 0, im = 0;
      for (std::size_t j = 0; j < m; ++j) {
        re += bi[j].real() * u[j].real() - bi[j].imag() * u[j].imag();
        im += bi[j].real() * u[j].imag() + bi[j].imag() * u[j].real();
      }
      p[i] = tau * cplx(re, im);
    }
    const double kcoef = 0.5 * tau * dot(u, p).real();
    for (std::size_t i = 0; i < m; ++i) p[i] -= kcoef * u[i];
    for (std::size_t i = 0; i < m; ++i) {
      cplx* bi = a.row(k + 1 + i) + k + 1;
      const cplx ui = u[i], qi = p[i];
      for (std::size_t j = 0; j < m; ++j) bi[j] -= ui * std::conj(p[j]) + qi * std::conj(u[j]);
    }
    const cplx beta = -phase * xnorm;
    a(k + 1, k) = beta;
    a(k, k + 1) = std::conj(beta);
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
    reflectors.push_back(std::move(u));
    taus.push_back(tau);
  }

  // Phases make the subdiagonal real and nonnegative.
  std::vector<double> d(n), e(n, 0.0);
  cvector phase(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx sub = a(i + 1, i);
    e[i] = std::abs(sub);
    phase[i + 1] = e[i] == 0.0 ? phase[i] : phase[i] * sub / e[i];
  }

  std::vector<double> zt;
  if (want_vectors) {
    zt.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) zt[i * n + i] = 1.0;
  }
  tridiagonal_ql(d, e, want_vectors ? &zt : nullptr);
  values = d;
  if (!want_vectors) return;

  // X = P_0 ... P_{n-3} diag(phase) Z
  vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) vectors(i, j) = phase[i] * zt[j * n + i];
  for (std::size_t k = reflectors.size(); k-- > 0;) {
    if (taus[k] == 0.0) continue;
    const cvector& u = reflectors[k];
    const std::size_t m = u.size();
    cvector s(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) detail::fma_row(s.data(), vectors.row(k + 1 + i), std::conj(u[i]), n);
    for (std::size_t i = 0; i < m; ++i) detail::fma_row(vectors.row(k + 1 + i), s.data(), -taus[k] * u[i], n);
  }
}

struct Balance {
  std::size_t ilo = 0, ihi = 0;
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  std::vector<double> scale;
};

inline void swap_index(CMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  std::swap_ranges(a.row(i), a.row(i) + a.cols(), a.row(j));
  for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
}

// Permutes isolated eigenvalues to the ends and scales [ilo, ihi] so that row
// and column 1-norms are comparable. Returns B = D^-1 P^T A P D.
inline Balance balance(CMatrix& a) {
  const std::size_t n = a.rows();
  Balance b;
  b.scale.assign(n, 1.0);
  std::size_t lo = 0, hi = n - 1;

  // rows with no off-diagonal coupling inside the window go to the bottom
  for (bool found = true; found && hi > 0;) {
    found = false;
    for (std::size_t j = hi + 1; j-- > lo;) {
      bool isolated = true;
      for (std::size_t i = lo; i <= hi && isolated; ++i)
        if (i != j && a(j, i) != cplx{}) isolated = false;
      if (isolated) {
        b.swaps.emplace_back(j, hi);
        swap_index(a, j, hi);
        found = true;
        if (hi == 0) break;
        --hi;
        break;
      }
    }
  }
  // columns likewise go to the left
  for (bool found = true; found && lo < hi;) {
    found = false;
    for (std::size_t j = lo; j <= hi; ++j) {
      bool isolated = true;
      for (std::size_t i = lo; i <= hi && isolated; ++i)
        if (i != j && a(i, j) != cplx{}) isolated = false;
      if (isolated) {
        b.swaps.emplace_back(j, lo);
        swap_index(a, j, lo);
        ++lo;
        found = true;
        break;
      }
    }
  }
  b.ilo = lo;
  b.ihi = hi;

  constexpr double radix = 2.0;
  for (bool noconv = true; noconv;) {
    noconv = false;
    for (std::size_t i = lo; i <= hi; ++i) {
      double c = 0, r = 0;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i).real()) + std::abs(a(j, i).imag());
        r += std::abs(a(i, j).real()) + std::abs(a(i, j).imag());
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        noconv = true;
        b.scale[i] *= f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return b;
}

// Reduces rows/cols [ilo, ihi] of a to upper Hessenberg form, rotating the
// rows of qt (Schur vectors stored as rows).
inline void hessenberg(CMatrix& a, std::size_t ilo, std::size_t ihi, CMatrix* qt) {
  const std::size_t n = a.rows();
  for (std::size_t c = ilo; c + 2 <= ihi; ++c) {
    const std::size_t m = ihi - c;  // rows c+1..ihi
    cvector u(m);
    double tail = 0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = a(c + 1 + i, c);
      if (i > 0) tail += std::norm(u[i]);
    }
    if (tail == 0.0) continue;
    const double xnorm = std::sqrt(tail + std::norm(u[0]));
    const cplx phase = u[0] == cplx{} ? cplx(1.0) : u[0] / std::abs(u[0]);
    u[0] += phase * xnorm;
    const double tau = 1.0 / (xnorm * (xnorm + std::abs(a(c + 1, c))));

    // left: rows c+1..ihi, columns c..n-1
    cvector s(n - c, 0.0);
    for (std::size_t i = 0; i < m; ++i) detail::fma_row(s.data(), a.row(c + 1 + i) + c, std::conj(u[i]), n - c);
    for (std::size_t i = 0; i < m; ++i) detail::fma_row(a.row(c + 1 + i) + c, s.data(), -tau * u[i], n - c);
    // right: rows 0..ihi, columns c+1..ihi
    for (std::size_t r = 0; r <= ihi; ++r) {
      cplx* ar = a.row(r) + c + 1;
      double re = 0, im = 0;
      for (std::size_t j = 0; j < m; ++j) {
        re += ar[j].real() * u[j].real() - ar[j].imag() * u[j].imag();
        im += ar[j].real() * u[j].imag() + ar[j].imag() * u[j].real();
      }
      const cplx f = -tau * cplx(re, im);
      for (std::size_t j = 0; j < m; ++j) ar[j] += f * std::conj(u[j]);
    }
    a(c + 1, c) = -phase * xnorm;
    for (std::size_t i = c + 2; i <= ihi; ++i) a(i, c) = 0.0;
    if (qt) {
      // Q <- Q P  is  Qt <- conj(P) Qt on rows c+1..ihi
      cvector w(n, 0.0);
      for (std::size_t i = 0; i < m; ++i) detail::fma_row(w.data(), qt->row(c + 1 + i), u[i], n);
      for (std::size_t i = 0; i < m; ++i) detail::fma_row(qt->row(c + 1 + i), w.data(), -tau * std::conj(u[i]), n);
    }
  }
}

struct Givens {
  double c;
  cplx s;
};

// [c s; -conj(s) c] [x; y] = [r; 0]
inline Givens make_givens(cplx x, cplx y, cplx& r) {
  if (y == cplx{}) {
    r = x;
    return {1.0, 0.0};
  }
  if (x == cplx{}) {
    r = std::abs(y);
    return {0.0, std::conj(y) / std::abs(y)};
  }
  const double ax = std::abs(x);
  const double rho = std::hypot(ax, std::abs(y));
  const cplx px = x / ax;
  r = px * rho;
  return {ax / rho, px * std::conj(y) / rho};
}

inline void rotate_rows(cplx* a, cplx* b, std::size_t len, const Givens& g) {
  const cplx cs = std::conj(g.s);
  for (std::size_t j = 0; j < len; ++j) {
    const cplx x = a[j], y = b[j];
    a[j] = g.c * x + g.s * y;
    b[j] = g.c * y - cs * x;
  }
}

// Complex Schur form of the Hessenberg window [ilo, ihi].
inline void schur_qr(CMatrix& h, std::size_t ilo, std::size_t ihi, bool want_t, CMatrix* zt) {
  const std::size_t n = h.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  const double smlnum = std::numeric_limits<double>::min() / eps;
  const std::size_t cap = 30 * std::max<std::size_t>(n, 1);
  std::size_t total = 0;

  auto negligible = [&](std::size_t i, std::size_t iu) {
    double tst = std::abs(h(i, i)) + std::abs(h(i - 1, i - 1));
    if (tst == 0.0) {
      if (i >= ilo + 2) tst += std::abs(h(i - 1, i - 2));
      if (i + 1 <= iu) tst += std::abs(h(i + 1, i));
    }
    return std::abs(h(i, i - 1)) <= std::max(eps * tst, smlnum);
  };

  std::size_t iu = ihi;
  int iter = 0;
  while (iu > ilo) {
    std::size_t il = iu;
    while (il > ilo && !negligible(il, iu)) --il;
    if (il > ilo) h(il, il - 1) = 0.0;
    if (il == iu) {
      --iu;
      iter = 0;
      continue;
    }
    if (++total > cap)
      throw numerical_error("eig_general: QR iteration did not converge at index " + std::to_string(iu));
    ++iter;

    cplx mu;
    if (iter % 20 == 10) {
      mu = h(il, il) + 0.75 * std::abs(h(il + 1, il).real());
    } else if (iter % 20 == 0) {
      mu = h(iu, iu) + 0.75 * std::abs(h(iu, iu - 1).real());
    } else {
      const cplx a = h(iu - 1, iu - 1), b = h(iu - 1, iu), c = h(iu, iu - 1), d = h(iu, iu);
      const cplx half = 0.5 * (a - d);
      const cplx disc = std::sqrt(half * half + b * c);
      const cplx mid = 0.5 * (a + d);
      const cplx e1 = mid + disc, e2 = mid - disc;
      mu = std::abs(e1 - d) < std::abs(e2 - d) ? e1 : e2;
    }

    const std::size_t col_end = want_t ? n : iu + 1;
    const std::size_t row_begin = want_t ? 0 : il;
    for (std::size_t i = il; i < iu; ++i) {
      Givens g;
      if (i == il) {
        cplx r;
        g = make_givens(h(il, il) - mu, h(il + 1, il), r);
      } else {
        cplx r;
        g = make_givens(h(i, i - 1), h(i + 1, i - 1), r);
        h(i, i - 1) = r;
        h(i + 1, i - 1) = 0.0;
      }
      rotate_rows(h.row(i) + i, h.row(i + 1) + i, col_end - i, g);
      const std::size_t row_end = std::min(i + 2, iu) + 1;
      const cplx cs = std::conj(g.s);
      for (std::size_t r = row_begin; r < row_end; ++r) {
        const cplx x = h(r, i), y = h(r, i + 1);
        h(r, i) = g.c * x + cs * y;
        h(r, i + 1) = g.c * y - g.s * x;
      }
      if (zt) {
        // Z <- Z G^H  is  Zt <- conj(G) Zt
        const Givens gc{g.c, std::conj(g.s)};
        rotate_rows(zt->row(i), zt->row(i + 1), n, gc);
      }
    }
  }
}

// Eigenvectors of upper-triangular t, columns of the returned matrix.
inline CMatrix triangular_eigenvectors(const CMatrix& t) {
  const std::size_t n = t.rows();
  double tnorm = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) tnorm = std::max(tnorm, std::abs(t(i, j)));
  const double eps = std::numeric_limits<double>::epsilon();
  const double smin = std::max(eps * tnorm, std::numeric_limits<double>::min() / eps);
  CMatrix y(n, n);
  cvector col(n);
  for (std::size_t k = n; k-- > 0;) {
    const cplx lambda = t(k, k);
    std::fill(col.begin(), col.end(), cplx{});
    col[k] = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      const cplx* ti = t.row(i);
      double re = 0, im = 0;
      for (std::size_t j = i + 1; j <= k; ++j) {
        re += ti[j].real() * col[j].real() - ti[j].imag() * col[j].imag();
        im += ti[j].real() * col[j].imag() + ti[j].imag() * col[j].real();
      }
      cplx denom = ti[i] - lambda;
      if (std::abs(denom) < smin) denom = smin;
      col[i] = -cplx(re, im) / denom;
      if (std::abs(col[i]) > 1e100) {
        for (std::size_t j = i; j <= k; ++j) col[j] *= 1e-100;
      }
    }
    for (std::size_t i = 0; i <= k; ++i) y(i, k) = col[i];
  }
  return y;
}

}  // namespace detail

inline SpectralDecomposition eig_hermitian(const CMatrix& h, EigenOptions opts = {}) {
  if (!h.square()) throw error("eig_hermitian: matrix must be square");
  if (hermitian_residual(h) > 1e-10) throw error("eig_hermitian: matrix is not hermitian");
  const std::size_t n = h.rows();
  SpectralDecomposition d;
  d.eigenvalues.assign(n, 0.0);
  if (opts.vectors) d.eigenvectors = CMatrix(n, n);

  const auto iso = detail::decoupled_indices(h);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (iso[i]) {
      d.eigenvalues[i] = h(i, i).real();
      if (opts.vectors) d.eigenvectors(i, i) = 1.0;
    } else {
      active.push_back(i);
    }
  }
  if (!active.empty()) {
    const std::size_t m = active.size();
    CMatrix sub(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sub(i, j) = h(active[i], active[j]);
    // exact hermitian copy of the lower triangle
    for (std::size_t i = 0; i < m; ++i) {
      sub(i, i) = sub(i, i).real();
      for (std::size_t j = 0; j < i; ++j) sub(j, i) = std::conj(sub(i, j));
    }
    std::vector<double> values;
    CMatrix vecs;
    detail::hermitian_core(std::move(sub), opts.vectors, values, vecs);
    // decoupled eigenpairs occupy their own columns; the rest fill the others
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t col = active[k];
      d.eigenvalues[col] = values[k];
      if (opts.vectors)
        for (std::size_t i = 0; i < m; ++i) d.eigenvectors(active[i], col) = vecs(i, k);
    }
  }
  if (opts.vectors) detail::normalize_columns(d.eigenvectors);
  detail::sort_decomposition(d);
  detail::compute_residuals(h, d);
  return d;
}

inline SpectralDecomposition eig_general(const CMatrix& h, EigenOptions opts = {}) {
  if (!h.square()) throw error("eig_general: matrix must be square");
  if (!all_finite(h)) throw numerical_error("eig_general: matrix has non-finite entries");
  const std::size_t n = h.rows();
  SpectralDecomposition d;
  if (n == 0) return d;

  CMatrix a = h;
  const auto bal = detail::balance(a);
  CMatrix zt;
  if (opts.vectors) zt = CMatrix::identity(n);
  detail::hessenberg(a, bal.ilo, bal.ihi, opts.vectors ? &zt : nullptr);
  detail::schur_qr(a, bal.ilo, bal.ihi, opts.vectors, opts.vectors ? &zt : nullptr);

  d.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.eigenvalues[i] = a(i, i);

  if (opts.vectors) {
    const CMatrix y = detail::triangular_eigenvectors(a);
    // X = Z Y with Z = Zt^T; Y is upper triangular
    CMatrix x(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const cplx z = zt(j, i);
        if (z != cplx{}) detail::fma_row(x.row(i) + j, y.row(j) + j, z, n - j);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) x(i, j) *= bal.scale[i];
    for (auto it = bal.swaps.rbegin(); it != bal.swaps.rend(); ++it)
      std::swap_ranges(x.row(it->first), x.row(it->first) + n, x.row(it->second));
    detail::normalize_columns(x);
    d.eigenvectors = std::move(x);
  }
  detail::sort_decomposition(d);
  detail::compute_residuals(h, d);
  return d;
}

inline SpectralDecomposition eig_hermitian(const LatticeOperator& h, EigenOptions opts = {}) {
  return eig_hermitian(h.matrix, opts);
}
inline SpectralDecomposition eig_general(const LatticeOperator& h, EigenOptions opts = {}) {
  return eig_general(h.matrix, opts);
}

// Hermitian fast path when H is exactly hermitian, general path otherwise.
inline SpectralDecomposition eig_auto(const CMatrix& h, EigenOptions opts = {}) {
  return hermitian_residual(h) == 0.0 ? eig_hermitian(h, opts) : eig_general(h, opts);
}
inline SpectralDecomposition eig_auto(const LatticeOperator& h, EigenOptions opts = {}) {
  return eig_auto(h.matrix, opts);
}

// Largest pair distance after matching a and b greedily, closest pairs first.
// Exact when the two spectra agree to better than their level spacing.
inline double nearest_match_distance(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pairs.emplace_back(std::abs(a[i] - b[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used_a(n, false), used_b(n, false);
  std::size_t matched = 0;
  double worst = 0;
  for (const auto& [dist, i, j] : pairs) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    worst = std::max(worst, dist);
    if (++matched == n) break;
  }
  return worst;
}

// exp(A) by scaling and squaring with a diagonal Pade approximant of degree
// 3, 5, 7, 9 or 13 chosen from ||A||_1.
inline CMatrix expm(const CMatrix& a) {
  if (!a.square()) throw error("expm: matrix must be square");
  const std::size_t n = a.rows();
  const CMatrix id = CMatrix::identity(n);
  const double norm = norm1(a);

  static constexpr double theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                     2.097847961257068e0, 5.371920351148152e0};
  static constexpr double b3[] = {120., 60., 12., 1.};
  static constexpr double b5[] = {30240., 15120., 3360., 420., 30., 1.};
  static constexpr double b7[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  static constexpr double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                  2162160.,     110880.,      3960.,        90.,        1.};
  static constexpr double b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                   1187353796428800.,  129060195264000.,   10559470521600.,
                                   670442572800.,      33522128640.,       1323241920.,
                                   40840800.,          960960.,            16380.,
                                   182.,               1.};

  auto pade_low = [&](const double* b, int m) {
    // U = A sum_{odd k} b_k A^{k-1}, V = sum_{even k} b_k A^k
    const CMatrix a2 = a * a;
    CMatrix power = id;
    CMatrix u_even = cplx(b[1]) * id;
    CMatrix v = cplx(b[0]) * id;
    for (int k = 2; k <= m; k += 2) {
      power = power * a2;
      u_even = u_even + cplx(b[k + 1]) * power;
      v = v + cplx(b[k]) * power;
    }
    return std::pair{a * u_even, v};
  };

  std::pair<CMatrix, CMatrix> uv;
  int squarings = 0;
  if (norm <= theta[0]) {
    uv = pade_low(b3, 3);
  } else if (norm <= theta[1]) {
    uv = pade_low(b5, 5);
  } else if (norm <= theta[2]) {
    uv = pade_low(b7, 7);
  } else if (norm <= theta[3]) {
    uv = pade_low(b9, 9);
  } else {
    if (!std::isfinite(norm)) throw numerical_error("expm: non-finite matrix");
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta[4]))));
    const CMatrix as = cplx(std::ldexp(1.0, -squarings)) * a;
    const CMatrix a2 = as * as, a4 = a2 * a2, a6 = a2 * a4;
    const CMatrix u_inner = a6 * (cplx(b13[13]) * a6 + cplx(b13[11]) * a4 + cplx(b13[9]) * a2) +
                            cplx(b13[7]) * a6 + cplx(b13[5]) * a4 + cplx(b13[3]) * a2 + cplx(b13[1]) * id;
    const CMatrix v = a6 * (cplx(b13[12]) * a6 + cplx(b13[10]) * a4 + cplx(b13[8]) * a2) + cplx(b13[6]) * a6 +
                      cplx(b13[4]) * a4 + cplx(b13[2]) * a2 + cplx(b13[0]) * id;
    uv = {as * u_inner, v};
  }
  CMatrix r = lu_solve(uv.second - uv.first, uv.second + uv.first);
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!all_finite(r)) throw numerical_error("expm: overflow");
  return r;
}

// exp(-i H dt) psi through the dense Pade exponential.
inline cvector expm_apply(const CMatrix& h, double dt, std::span<const cplx> psi) {
  if (!std::isfinite(dt)) throw error("expm_apply: dt must be finite");
  if (psi.size() != h.rows()) throw error("expm_apply: state has wrong length");
  const CMatrix prop = expm(cplx(0, -dt) * h);
  cvector out = prop * psi;
  for (const auto& v : out)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw numerical_error("expm_apply: overflow");
  return out;
}

inline cvector expm_apply(const LatticeOperator& h, double dt, std::span<const cplx> psi) {
  return expm_apply(h.matrix, dt, psi);
}

// exp(-i H dt) psi by a truncated Taylor series on sparse H, split into
// substeps with ||H dt_sub||_1 <= 1/2. Only matrix-vector products; used by
// the propagators where H changes every step.
inline cvector expm_action(const SparseRows& h, double dt, std::span<const cplx> psi) {
  const std::size_t n = h.rows();
  if (psi.size() != n) throw error("expm_action: state has wrong length");
  const double norm = h.norm1() * std::abs(dt);
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  const cplx factor(0, -dt / substeps);
  cvector v(psi.begin(), psi.end()), term(n), next(n);
  for (int s = 0; s < substeps; ++s) {
    term = v;
    const double vnorm = norm2(v);
    int small = 0;
    for (int k = 1; k <= 60 && small < 2; ++k) {
      h.apply(term, next);
      const cplx f = factor / static_cast<double>(k);
      for (std::size_t i = 0; i < n; ++i) {
        term[i] = f * next[i];
        v[i] += term[i];
      }
      small = norm2(term) <= 1e-18 * vnorm ? small + 1 : 0;
    }
    const double out = norm2(v);
    if (!std::isfinite(out) || out > 1e300) throw numerical_error("expm_action: overflow");
  }
  return v;
}

inline cvector expm_action(const CMatrix& h, double dt, std::span<const cplx> psi) {
  return expm_action(SparseRows(h), dt, psi);
}

}  // namespace nhdirac
