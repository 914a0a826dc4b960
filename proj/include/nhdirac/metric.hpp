#pragma once

// Diagonal 1+1D metrics ds^2 = alpha(x,t)^2 dt^2 - beta(x,t)^2 dx^2 and their
// samples on the lattice x = n*a, n = 0..L-1.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"

namespace nhdirac {

struct Flat {};
// alpha = q x, beta = 1
struct Rindler {
  double q;
};
// alpha = 1/beta = sqrt(1 - (q x)^2), horizon at x = 1/q
struct DeSitter {
  double q;
};
// alpha = 1/beta = sqrt(1 + (q x)^2)
struct AntiDeSitter {
  double q;
};
// alpha = beta = exp(r t + q x)
struct Weyl {
  double q, r;
};
// alpha = beta = r t + q x
struct LinearConformal {
  double q, r;
};

struct Custom {
  std::string alpha_source, beta_source;
  expr::Ast alpha, beta, dbeta_dt;
  expr::ParamMap params;

  static Custom from_source(std::string alpha_src, std::string beta_src, expr::ParamMap params) {
    Custom c;
    c.alpha = expr::parse(alpha_src);
    c.beta = expr::parse(beta_src);
    c.dbeta_dt = expr::diff_t(c.beta);
    c.alpha_source = std::move(alpha_src);
    c.beta_source = std::move(beta_src);
    c.params = std::move(params);
    return c;
  }
};

using MetricFamily = std::variant<Flat, Rindler, DeSitter, AntiDeSitter, Weyl, LinearConformal, Custom>;

struct MetricModel {
  MetricFamily family;
  double spacing = 1.0;
  std::size_t sites = 2;
};

struct SampledMetric {
  double t = 0.0;
  std::vector<double> alpha, beta, dlog_beta_dt;

  std::size_t sites() const { return alpha.size(); }
};

inline std::string family_name(const MetricFamily& f) {
  struct {
    std::string operator()(const Flat&) const { return "flat"; }
    std::string operator()(const Rindler&) const { return "rindler"; }
    std::string operator()(const DeSitter&) const { return "de_sitter"; }
    std::string operator()(const AntiDeSitter&) const { return "anti_de_sitter"; }
    std::string operator()(const Weyl&) const { return "weyl"; }
    std::string operator()(const LinearConformal&) const { return "linear_conformal"; }
    std::string operator()(const Custom&) const { return "custom"; }
  } v;
  return std::visit(v, f);
}

// Short human-readable description used as operator provenance.
inline std::string describe(const MetricModel& m) {
  std::string s = family_name(m.family);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Rindler> || std::is_same_v<T, DeSitter> ||
                      std::is_same_v<T, AntiDeSitter>) {
          s += " q=" + expr::detail::format_number(f.q);
        } else if constexpr (std::is_same_v<T, Weyl> || std::is_same_v<T, LinearConformal>) {
          s += " q=" + expr::detail::format_number(f.q) + " r=" + expr::detail::format_number(f.r);
        } else if constexpr (std::is_same_v<T, Custom>) {
          s += " alpha=" + f.alpha_source + " beta=" + f.beta_source;
        }
      },
      m.family);
  return s;
}

inline void validate(const MetricModel& m) {
  if (!(m.spacing > 0.0) || !std::isfinite(m.spacing)) throw metric_error("lattice spacing must be positive");
  if (m.sites < 2) throw metric_error("lattice needs at least 2 sites");
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Custom>) {
          if (!f.alpha || !f.beta) throw metric_error("custom metric needs alpha and beta expressions");
          for (const auto& ast : {f.alpha, f.beta}) {
            for (const auto& p : expr::parameters(ast))
              if (!f.params.contains(p)) throw metric_error("unbound parameter '" + p + "' in custom metric");
          }
        } else if constexpr (!std::is_same_v<T, Flat>) {
          if (!(f.q > 0.0) || !std::isfinite(f.q)) throw metric_error("metric parameter q must be positive");
          if constexpr (std::is_same_v<T, Weyl> || std::is_same_v<T, LinearConformal>) {
            if (!std::isfinite(f.r)) throw metric_error("metric parameter r must be finite");
          }
        }
      },
      m.family);
}

inline bool time_dependent(const MetricModel& m) {
  return std::visit(
      [](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Weyl> || std::is_same_v<T, LinearConformal>) {
          return f.r != 0.0;
        } else if constexpr (std::is_same_v<T, Custom>) {
          return expr::depends_on_t(f.alpha) || expr::depends_on_t(f.beta);
        } else {
          return false;
        }
      },
      m.family);
}

// True for families with alpha == beta identically.
inline bool conformally_flat(const MetricModel& m) {
  return std::visit(
      [](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Flat> || std::is_same_v<T, Weyl> || std::is_same_v<T, LinearConformal>) {
          return true;
        } else if constexpr (std::is_same_v<T, Custom>) {
          return expr::structurally_equal(f.alpha, f.beta);
        } else {
          return false;
        }
      },
      m.family);
}

namespace detail {

inline void check_sample(double alpha, double beta, std::size_t n) {
  if (std::isnan(alpha) || alpha < 0.0)
    throw metric_error("negative metric sample alpha at site " + std::to_string(n), static_cast<long>(n));
  if (std::isnan(beta) || beta < 0.0)
    throw metric_error("negative metric sample beta at site " + std::to_string(n), static_cast<long>(n));
}

// (1 -+ u^2) with u = q x. For de Sitter, u within a few ulps of 1 is snapped
// onto the horizon so that a lattice sized with q = 1/((L-1)a) ends exactly on it.
inline double static_lapse_sq(double u, double sign) {
  if (sign < 0 && std::abs(1.0 - u) <= 4 * std::numeric_limits<double>::epsilon()) return 0.0;
  return 1.0 + sign * u * u;
}

}  // namespace detail

inline SampledMetric sample(const MetricModel& model, double t) {
  validate(model);
  const std::size_t L = model.sites;
  const double a = model.spacing;
  SampledMetric s;
  s.t = t;
  s.alpha.resize(L);
  s.beta.resize(L);
  s.dlog_beta_dt.assign(L, 0.0);

  for (std::size_t n = 0; n < L; ++n) {
    const double x = static_cast<double>(n) * a;
    double alpha = 1.0, beta = 1.0, dlog = 0.0;
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Rindler>) {
            alpha = f.q * x;
          } else if constexpr (std::is_same_v<T, DeSitter> || std::is_same_v<T, AntiDeSitter>) {
            const double lapse_sq = detail::static_lapse_sq(f.q * x, std::is_same_v<T, DeSitter> ? -1.0 : 1.0);
            if (lapse_sq < 0.0)
              throw metric_error("site " + std::to_string(n) + " lies beyond the de Sitter horizon",
                                 static_cast<long>(n));
            alpha = std::sqrt(lapse_sq);
            beta = alpha == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / alpha;
          } else if constexpr (std::is_same_v<T, Weyl>) {
            alpha = beta = std::exp(f.r * t + f.q * x);
            dlog = f.r;
          } else if constexpr (std::is_same_v<T, LinearConformal>) {
            const double w = f.r * t + f.q * x;
            if (w < 0.0)
              throw metric_error("r t + q x is negative at site " + std::to_string(n), static_cast<long>(n));
            alpha = beta = w;
            if (f.r != 0.0) {
              if (w == 0.0)
                throw metric_error("divergent log-derivative of beta at site " + std::to_string(n),
                                   static_cast<long>(n));
              dlog = f.r / w;
            }
          } else if constexpr (std::is_same_v<T, Custom>) {
            try {
              alpha = expr::eval(f.alpha, x, t, f.params);
              beta = expr::eval(f.beta, x, t, f.params);
              const double dbeta = expr::eval(f.dbeta_dt, x, t, f.params);
              if (beta > 0.0) {
                dlog = dbeta / beta;
              } else if (dbeta != 0.0) {
                throw metric_error("divergent log-derivative of beta at site " + std::to_string(n),
                                   static_cast<long>(n));
              }
            } catch (const evaluation_error& e) {
              throw metric_error("custom metric at site " + std::to_string(n) + ": " + e.what(),
                                 static_cast<long>(n));
            }
          }
        },
        model.family);
    detail::check_sample(alpha, beta, n);
    if (!std::isfinite(dlog))
      throw metric_error("non-finite log-derivative of beta at site " + std::to_string(n), static_cast<long>(n));
    s.alpha[n] = alpha;
    s.beta[n] = beta;
    s.dlog_beta_dt[n] = dlog;
  }
  return s;
}

// Sites where alpha vanishes (event horizons on the lattice).
inline std::vector<std::size_t> horizon_sites(const SampledMetric& m) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < m.sites(); ++n)
    if (m.alpha[n] == 0.0) out.push_back(n);
  return out;
}

// delta_n = -log(alpha_n); half the sum of neighbouring values reads as the
// distance between sites. Throws metric_error carrying the site at a horizon.
inline std::vector<double> distance_profile(const SampledMetric& m) {
  std::vector<double> d(m.sites());
  for (std::size_t n = 0; n < m.sites(); ++n) {
    if (!(m.alpha[n] > 0.0))
      throw metric_error("horizon at site " + std::to_string(n) + ": distance diverges", static_cast<long>(n));
    d[n] = -std::log(m.alpha[n]);
  }
  return d;
}

}  // namespace nhdirac
