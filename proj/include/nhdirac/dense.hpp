#pragma once

// Minimal dense complex linear algebra: row-major matrices, products, norms and
// an LU solver. Hot loops spell complex arithmetic out on real/imaginary parts so
// they do not depend on -fcx-limited-range.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace nhdirac {

using cplx = std::complex<double>;
using cvector = std::vector<cplx>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  cplx* row(std::size_t i) { return data_.data() + i * cols_; }
  const cplx* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  bool operator==(const CMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

namespace detail {

inline void fma_row(cplx* __restrict y, const cplx* __restrict x, cplx s, std::size_t n) {
  const double sr = s.real(), si = s.imag();
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = xd[2 * j], xi = xd[2 * j + 1];
    yd[2 * j] += sr * xr - si * xi;
    yd[2 * j + 1] += sr * xi + si * xr;
  }
}

}  // namespace detail

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw error("matrix product: shape mismatch");
  CMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const cplx* ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (ai[k] == cplx{}) continue;
      detail::fma_row(c.row(i), b.row(k), ai[k], b.cols());
    }
  }
  return c;
}

inline CMatrix operator+(CMatrix a, const CMatrix& b) {
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
  return a;
}

inline CMatrix operator-(CMatrix a, const CMatrix& b) {
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] -= bd[i];
  return a;
}

inline CMatrix operator*(cplx s, CMatrix a) {
  for (auto& v : a.data()) v *= s;
  return a;
}

inline cvector operator*(const CMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw error("matrix-vector product: shape mismatch");
  cvector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const cplx* ai = a.row(i);
    double re = 0, im = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      re += ai[j].real() * x[j].real() - ai[j].imag() * x[j].imag();
      im += ai[j].real() * x[j].imag() + ai[j].imag() * x[j].real();
    }
    y[i] = {re, im};
  }
  return y;
}

inline CMatrix adjoint(const CMatrix& a) {
  CMatrix h(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = std::conj(a(i, j));
  return h;
}

inline CMatrix conjugate(CMatrix a) {
  for (auto& v : a.data()) v = std::conj(v);
  return a;
}

inline double frobenius_norm(const CMatrix& a) {
  double s = 0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

// Maximum absolute column sum.
inline double norm1(const CMatrix& a) {
  std::vector<double> col(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) col[j] += std::abs(a(i, j));
  return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
}

// ||A - A^H||_F / ||A||_F, zero for the zero matrix.
inline double hermitian_residual(const CMatrix& a) {
  double diff = 0, ref = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      diff += std::norm(a(i, j) - std::conj(a(j, i)));
      ref += std::norm(a(i, j));
    }
  }
  return ref == 0.0 ? 0.0 : std::sqrt(diff / ref);
}

inline cplx trace(const CMatrix& a) {
  cplx t{};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

inline bool all_finite(const CMatrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

inline double norm2(std::span<const cplx> x) {
  double s = 0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

inline cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  cplx s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

// Compressed-row copy of the nonzero entries; the lattice operators are
// block-tridiagonal so products against them are O(n) per vector.
class SparseRows {
 public:
  SparseRows() = default;
  explicit SparseRows(const CMatrix& a) : n_(a.rows()), start_(a.rows() + 1, 0) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (a(i, j) != cplx{}) {
          cols_.push_back(j);
          vals_.push_back(a(i, j));
        }
      }
      start_[i + 1] = cols_.size();
    }
  }

  std::size_t rows() const { return n_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double re = 0, im = 0;
      for (std::size_t k = start_[i]; k < start_[i + 1]; ++k) {
        const cplx a = vals_[k], b = x[cols_[k]];
        re += a.real() * b.real() - a.imag() * b.imag();
        im += a.real() * b.imag() + a.imag() * b.real();
      }
      y[i] = {re, im};
    }
  }

  double norm1() const {
    std::vector<double> col(n_, 0.0);
    for (std::size_t k = 0; k < vals_.size(); ++k) col[cols_[k]] += std::abs(vals_[k]);
    return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> cols_;
  std::vector<cplx> vals_;
};

// Solves A X = B by LU with partial pivoting. Throws on exactly singular A.
inline CMatrix lu_solve(CMatrix a, CMatrix b) {
  const std::size_t n = a.rows();
  if (!a.square() || b.rows() != n) throw error("lu_solve: shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best == 0.0) throw numerical_error("lu_solve: singular matrix");
    if (p != k) {
      std::swap_ranges(a.row(k), a.row(k) + n, a.row(p));
      std::swap_ranges(b.row(k), b.row(k) + b.cols(), b.row(p));
    }
    const cplx inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) * inv;
      if (f == cplx{}) continue;
      a(i, k) = 0.0;
      detail::fma_row(a.row(i) + k + 1, a.row(k) + k + 1, -f, n - k - 1);
      detail::fma_row(b.row(i), b.row(k), -f, b.cols());
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const cplx inv = 1.0 / a(k, k);
    for (std::size_t j = 0; j < b.cols(); ++j) b(k, j) *= inv;
    for (std::size_t i = 0; i < k; ++i) {
      if (a(i, k) == cplx{}) continue;
      detail::fma_row(b.row(i), b.row(k), -a(i, k), b.cols());
    }
  }
  return b;
}

}  // namespace nhdirac
