#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "nhdirac/lattice_operator.hpp"
#include "nhdirac/metric.hpp"
#include "nhdirac/spectral.hpp"

using namespace nhdirac;

namespace {

CMatrix from_mat2(const Mat2& m) {
  CMatrix a(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = m(i, j);
  return a;
}

cplx eigen_sum(const SpectralDecomposition& s) {
  cplx sum{};
  for (auto e : s.eigenvalues) sum += e;
  return sum;
}

}  // namespace

TEST(EigHermitian, SmallExamples) {
  const auto id = eig_hermitian(CMatrix::identity(2));
  EXPECT_EQ(id.eigenvalues, (std::vector<cplx>{1.0, 1.0}));
  const auto sz = eig_hermitian(from_mat2(sigma_z()));
  EXPECT_EQ(sz.eigenvalues, (std::vector<cplx>{-1.0, 1.0}));
  const auto sy = eig_hermitian(from_mat2(sigma_y()));
  EXPECT_NEAR(sy.eigenvalues[0].real(), -1.0, 1e-15);
  EXPECT_EQ(sy.eigenvalues[0].imag(), 0.0);
  EXPECT_LT(sy.max_residual(), 1e-15);
}

TEST(EigHermitian, FlatPeriodicChain) {
  const std::size_t L = 8;
  const auto h = build(sample(MetricModel{Flat{}, 1.0, L}, 0.0), 0.0, 1.0, Boundary::periodic);
  const auto s = eig_hermitian(h);
  std::vector<double> oracle;
  for (std::size_t j = 0; j < L; ++j) {
    oracle.push_back(std::sin(2 * std::numbers::pi * j / L));
    oracle.push_back(-oracle.back());
  }
  std::sort(oracle.begin(), oracle.end());
  for (std::size_t i = 0; i < 2 * L; ++i) {
    EXPECT_NEAR(s.eigenvalues[i].real(), oracle[i], 1e-14);
    EXPECT_EQ(s.eigenvalues[i].imag(), 0.0);
  }
}

TEST(EigHermitian, RejectsNonHermitian) {
  CMatrix a(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eig_hermitian(a), error);
}

TEST(EigHermitian, OrthonormalVectorsOnRandomMatrices) {
  gen::Rng rng(5);
  for (std::size_t n : {1u, 2u, 7u, 30u, 64u}) {
    const auto h = gen::hermitian_matrix(rng, n);
    const auto s = eig_hermitian(h);
    EXPECT_TRUE(s.accepted(1e-12));
    const CMatrix gram = adjoint(s.eigenvectors) * s.eigenvectors;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(eigen_sum(s) - trace(h)), 0.0, 1e-9 * s.matrix_norm);
    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(s.eigenvalues[i - 1].real(), s.eigenvalues[i].real());
  }
}

TEST(EigGeneral, DiagonalAndDefective) {
  CMatrix d(2, 2);
  d(0, 0) = cplx(1, 2);
  d(1, 1) = 3.0;
  const auto s = eig_general(d);
  EXPECT_EQ(s.eigenvalues, (std::vector<cplx>{cplx(1, 2), 3.0}));
  EXPECT_EQ(s.max_residual(), 0.0);

  CMatrix j(2, 2);
  j(0, 1) = 1.0;
  const auto sj = eig_general(j);
  EXPECT_EQ(sj.eigenvalues, (std::vector<cplx>{0.0, 0.0}));
  ASSERT_EQ(sj.residuals.size(), 2u);
  for (double r : sj.residuals) EXPECT_TRUE(std::isfinite(r));
  EXPECT_NEAR(std::abs(sj.eigenvectors(0, 0)), 1.0, 1e-15);
}

TEST(EigGeneral, RandomResidualsAndTrace) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = trial < 20 ? 8 : 1 + gen::pick(rng, 64);
    const auto a = gen::complex_matrix(rng, n);
    const auto s = eig_general(a);
    EXPECT_LT(s.max_residual(), 1e-10 * s.matrix_norm);
    EXPECT_LT(std::abs(eigen_sum(s) - trace(a)), 1e-9 * s.matrix_norm);
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(norm2(s.eigenvector(j)), 1.0, 1e-12);
    for (std::size_t i = 1; i < n; ++i) EXPECT_FALSE(spectral_order(s.eigenvalues[i], s.eigenvalues[i - 1]));
  }
}

TEST(EigGeneral, ValuesOnlyMatchesFullDecomposition) {
  gen::Rng rng(9);
  const auto a = gen::complex_matrix(rng, 40);
  const auto full = eig_general(a), values = eig_general(a, {.vectors = false});
  EXPECT_FALSE(values.has_vectors());
  EXPECT_LT(nearest_match_distance(full.eigenvalues, values.eigenvalues), 1e-12 * full.matrix_norm);
}

TEST(EigGeneral, AgreesWithHermitianPathOnCatalogOperators) {
  const std::size_t L = 200;
  const double q = 1.0 / (L - 1);
  const std::vector<MetricFamily> fams = {Flat{}, Rindler{q}, Custom::from_source("1 + 0.5*sin(x/7)", "1", {})};
  for (const auto& f : fams)
    for (double mass : {0.0, 1.0}) {
      const auto h = build(sample(MetricModel{f, 1.0, L}, 0.0), mass, 1.0);
      const auto eh = eig_hermitian(h, {.vectors = false});
      const auto eg = eig_general(h, {.vectors = false});
      double scale = 0;
      for (auto e : eh.eigenvalues) scale = std::max(scale, std::abs(e));
      double worst = 0;
      for (std::size_t i = 0; i < eh.size(); ++i) worst = std::max(worst, std::abs(eh.eigenvalues[i] - eg.eigenvalues[i].real()));
      EXPECT_LT(worst, 1e-9 * scale) << family_name(f);
      EXPECT_LT(std::abs(eigen_sum(eh) - trace(h.matrix)), 1e-9 * eh.matrix_norm);
      EXPECT_LT(std::abs(eigen_sum(eg) - trace(h.matrix)), 1e-9 * eg.matrix_norm);
    }
}

TEST(EigGeneral, Deterministic) {
  gen::Rng rng(10);
  const auto a = gen::complex_matrix(rng, 30);
  const auto s1 = eig_general(a), s2 = eig_general(a);
  EXPECT_EQ(s1.eigenvalues, s2.eigenvalues);
  EXPECT_EQ(s1.eigenvectors, s2.eigenvectors);
}

TEST(NearestMatch, Pairing) {
  const std::vector<cplx> a{0.0, 1.0, 1.001}, b{1.0005, 0.0, 1.0};
  EXPECT_NEAR(nearest_match_distance(a, b), 0.0005, 1e-15);
  EXPECT_TRUE(std::isinf(nearest_match_distance(a, std::vector<cplx>{0.0})));
}

TEST(Expm, Examples) {
  gen::Rng rng(3);
  const auto psi = gen::complex_vector(rng, 2);
  const auto same = expm_apply(CMatrix(2, 2), 0.7, psi);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(same[i], psi[i]);

  const auto rot = expm_apply(from_mat2(sigma_z()), std::numbers::pi, psi);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(rot[i] + psi[i]), 0.0, 1e-14);

  const double r = 0.8;
  const auto decay = expm_apply(cplx(0, -r / 2) * CMatrix::identity(2), 1.0, psi);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(decay[i] - std::exp(-r / 2) * psi[i]), 0.0, 1e-15);
}

TEST(Expm, CompositionOnRandomVectors) {
  gen::Rng rng(4);
  for (std::size_t n : {4u, 16u, 40u}) {
    const auto h = gen::complex_matrix(rng, n);
    const auto psi = gen::complex_vector(rng, n);
    for (double dt : {0.05, 0.3, 1.0}) {
      const auto twice = expm_apply(h, dt, expm_apply(h, dt, psi));
      const auto once = expm_apply(h, 2 * dt, psi);
      double diff = 0;
      for (std::size_t i = 0; i < n; ++i) diff += std::norm(twice[i] - once[i]);
      EXPECT_LT(std::sqrt(diff), 1e-9 * norm2(once));
    }
  }
}

TEST(Expm, MatchesSpectralSynthesisForHermitian) {
  gen::Rng rng(6);
  const std::size_t n = 24;
  const auto h = gen::hermitian_matrix(rng, n);
  const auto s = eig_hermitian(h);
  const auto psi = gen::complex_vector(rng, n);
  for (double dt : {0.1, 2.0}) {
    const double scale = frobenius_norm(h) * dt;
    if (scale > 10) continue;
    cvector expected(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = s.eigenvector(j);
      const cplx c = dot(v, psi) * std::exp(cplx(0, -dt) * s.eigenvalues[j]);
      for (std::size_t i = 0; i < n; ++i) expected[i] += c * v[i];
    }
    const auto got = expm_apply(h, dt, psi);
    double diff = 0;
    for (std::size_t i = 0; i < n; ++i) diff += std::norm(got[i] - expected[i]);
    EXPECT_LT(std::sqrt(diff), 1e-10 * norm2(expected));
  }
}

TEST(Expm, TaylorActionMatchesPade) {
  gen::Rng rng(12);
  const std::size_t L = 40;
  const auto h = build(sample(MetricModel{Weyl{0.05, 0.5}, 1.0, L}, 0.3), 1.0, 1.0);
  const auto psi = gen::complex_vector(rng, 2 * L);
  for (double dt : {1e-3, 0.1, 1.0, 5.0}) {
    const auto pade = expm_apply(h, dt, psi);
    const auto taylor = expm_action(h.matrix, dt, psi);
    double diff = 0;
    for (std::size_t i = 0; i < pade.size(); ++i) diff += std::norm(pade[i] - taylor[i]);
    EXPECT_LT(std::sqrt(diff), 1e-10 * norm2(pade)) << dt;
  }
}

TEST(Expm, OverflowIsReported) {
  const auto h = cplx(0, 1e3) * CMatrix::identity(2);  // exp(-i H dt) = e^{1000 dt}
  const cvector psi{1.0, 1.0};
  EXPECT_THROW(expm_apply(h, 1.0, psi), numerical_error);
  EXPECT_THROW(expm_action(h, 1.0, psi), numerical_error);
}
