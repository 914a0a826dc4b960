#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nhdirac/metric.hpp"

using namespace nhdirac;

namespace {

MetricModel make(MetricFamily f, std::size_t sites = 50, double a = 1.0) { return {std::move(f), a, sites}; }

}  // namespace

TEST(MetricSample, RindlerLapse) {
  const auto m = sample(make(Rindler{0.002}), 0.0);
  EXPECT_DOUBLE_EQ(m.alpha[3], 0.006);
  EXPECT_EQ(m.beta[3], 1.0);
  EXPECT_EQ(m.alpha[0], 0.0);
}

TEST(MetricSample, DeSitterOrigin) {
  for (double q : {0.001, 0.01, 0.02}) {
    const auto m = sample(make(DeSitter{q}), 0.0);
    EXPECT_EQ(m.alpha[0], 1.0);
    EXPECT_EQ(m.beta[0], 1.0);
  }
}

TEST(MetricSample, WeylLogDerivative) {
  const auto m = sample(make(Weyl{0.01, 0.5}), 0.0);
  for (double d : m.dlog_beta_dt) EXPECT_EQ(d, 0.5);
  for (std::size_t n = 0; n < m.sites(); ++n) EXPECT_DOUBLE_EQ(m.alpha[n], std::exp(0.01 * n));
}

TEST(MetricSample, LinearConformal) {
  const auto m = sample(make(LinearConformal{0.1, 0.5}), 2.0);
  for (std::size_t n = 0; n < m.sites(); ++n) {
    const double w = 0.5 * 2.0 + 0.1 * n;
    EXPECT_DOUBLE_EQ(m.alpha[n], w);
    EXPECT_DOUBLE_EQ(m.beta[n], w);
    EXPECT_DOUBLE_EQ(m.dlog_beta_dt[n], 0.5 / w);
  }
}

TEST(MetricSample, LinearConformalDomain) {
  EXPECT_THROW(sample(make(LinearConformal{0.1, 0.5}), -1.0), metric_error);  // w < 0 at n = 0
  EXPECT_THROW(sample(make(LinearConformal{0.1, 0.5}), 0.0), metric_error);   // w = 0 with r != 0
  EXPECT_NO_THROW(sample(make(LinearConformal{0.1, 0.0}), 0.0));
}

TEST(MetricSample, DeSitterHorizonPinnedToLastSite) {
  const std::size_t L = 500;
  const auto m = sample(make(DeSitter{1.0 / (L - 1)}, L), 0.0);
  EXPECT_EQ(m.alpha[L - 1], 0.0);
  EXPECT_TRUE(std::isinf(m.beta[L - 1]));
  EXPECT_EQ(horizon_sites(m), std::vector<std::size_t>{L - 1});
  EXPECT_THROW(sample(make(DeSitter{1.0 / (L - 2)}, L), 0.0), metric_error);
}

TEST(MetricSample, DeSitterProductIsOne) {
  const std::size_t L = 300;
  const auto m = sample(make(DeSitter{1.0 / (L - 1)}, L), 0.0);
  for (std::size_t n = 0; n + 1 < L; ++n) EXPECT_NEAR(m.alpha[n] * m.beta[n], 1.0, 2.3e-16) << n;
  const auto ads = sample(make(AntiDeSitter{0.01}, L), 0.0);
  for (std::size_t n = 0; n < L; ++n) EXPECT_NEAR(ads.alpha[n] * ads.beta[n], 1.0, 2.3e-16) << n;
}

TEST(MetricSample, Custom) {
  const auto c = Custom::from_source("q*x*(1 + t)", "1", {{"q", 0.1}});
  const auto m = sample(make(c, 10), 1.0);
  EXPECT_DOUBLE_EQ(m.alpha[4], 0.8);
  EXPECT_EQ(m.dlog_beta_dt[4], 0.0);
  const auto bad = Custom::from_source("x - 3", "1", {});
  EXPECT_THROW(sample(make(bad, 10), 0.0), metric_error);
  const auto unbound = Custom::from_source("p*x", "1", {});
  EXPECT_THROW(validate(make(unbound)), metric_error);
}

TEST(MetricModelChecks, InvalidParameters) {
  EXPECT_THROW(validate(make(Rindler{0.0})), metric_error);
  EXPECT_THROW(validate(make(Weyl{-1.0, 0.0})), metric_error);
  EXPECT_THROW(validate(make(Flat{}, 1)), metric_error);
  EXPECT_THROW(validate(make(Flat{}, 10, 0.0)), metric_error);
}

TEST(MetricDistance, Profiles) {
  for (double d : distance_profile(sample(make(Flat{}), 0.0))) EXPECT_EQ(d, 0.0);
  const double q = 0.02;
  const auto d = distance_profile(sample(make(Weyl{q, 0.0}), 0.0));
  for (std::size_t n = 0; n < d.size(); ++n) EXPECT_NEAR(d[n], -q * n, 1e-14);
  try {
    distance_profile(sample(make(Rindler{0.1}), 0.0));
    FAIL();
  } catch (const metric_error& e) {
    EXPECT_EQ(e.site, 0);
  }
}

TEST(MetricProperties, TimeDependenceMatchesFamily) {
  const std::vector<MetricModel> models = {
      make(Flat{}),
      make(Rindler{0.01}),
      make(DeSitter{0.01}),
      make(AntiDeSitter{0.01}),
      make(Weyl{0.01, 0.0}),
      make(Weyl{0.01, 0.5}),
      make(LinearConformal{0.01, 0.0}),
      make(LinearConformal{0.01, 0.5}),
      make(Custom::from_source("1 + x*t^2", "1", {})),
      make(Custom::from_source("1 + x", "2", {})),
  };
  for (const auto& m : models) {
    const auto a = sample(m, 1.0), b = sample(m, 2.5);
    const bool differs = a.alpha != b.alpha || a.beta != b.beta || a.dlog_beta_dt != b.dlog_beta_dt;
    EXPECT_EQ(differs, time_dependent(m)) << describe(m);
    if (!time_dependent(m)) {
      for (double d : a.dlog_beta_dt) EXPECT_EQ(d, 0.0);
    }
  }
}

TEST(MetricProperties, LogDerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  const std::vector<MetricModel> models = {
      make(Weyl{0.01, 0.5}), make(Weyl{0.02, -0.3}), make(LinearConformal{0.05, 0.5}),
      make(Custom::from_source("exp(r*t)*(1 + q*x)", "exp(r*t)*(1 + q*x)", {{"r", 0.4}, {"q", 0.1}})),
      make(Custom::from_source("1", "cosh(t) + x", {})),
  };
  for (const auto& m : models) {
    for (double t : {0.5, 1.0, 2.0}) {
      const auto s = sample(m, t), up = sample(m, t + h), down = sample(m, t - h);
      for (std::size_t n = 0; n < s.sites(); ++n) {
        const double fd = (std::log(up.beta[n]) - std::log(down.beta[n])) / (2 * h);
        ASSERT_NEAR(s.dlog_beta_dt[n], fd, 1e-6) << describe(m) << " site " << n;
      }
    }
  }
}

TEST(MetricProperties, ConformalFlatness) {
  EXPECT_TRUE(conformally_flat(make(Weyl{0.01, 0.5})));
  EXPECT_TRUE(conformally_flat(make(LinearConformal{0.01, 0.5})));
  EXPECT_FALSE(conformally_flat(make(DeSitter{0.01})));
  EXPECT_TRUE(conformally_flat(make(Custom::from_source("exp(x)", "exp(x)", {}))));
  EXPECT_FALSE(conformally_flat(make(Custom::from_source("exp(x)", "1", {}))));
}

TEST(MetricNames, ConfigStrings) {
  EXPECT_EQ(family_name(Flat{}), "flat");
  EXPECT_EQ(family_name(DeSitter{1}), "de_sitter");
  EXPECT_EQ(family_name(AntiDeSitter{1}), "anti_de_sitter");
  EXPECT_EQ(family_name(LinearConformal{1, 1}), "linear_conformal");
}
