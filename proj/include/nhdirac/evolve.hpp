#pragma once

// Time evolution with exponential midpoint steps
//   psi(t + dt) = exp(-i H(t + dt/2) dt) psi(t),
// H rebuilt from the metric sampled at the midpoint of every step. Exact for
// time-independent H and second order otherwise.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"
#include "lattice_operator.hpp"
#include "metric.hpp"
#include "spectral.hpp"

namespace nhdirac {

struct SpinorField {
  cvector values;  // site-major, index 2 n + s
  double t = 0.0;

  std::size_t sites() const { return values.size() / 2; }
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> norms;      // plain lattice 2-norm
  std::vector<double> eta_norms;  // sqrt(sum_n beta_n |psi_n|^2)
  std::vector<SpinorField> snapshots;
  std::vector<cvector> states;  // every recorded state, when requested
  SpinorField final_state;
  double dt = 0.0;
  std::string scheme = "exponential-midpoint";
};

// Propagation stopped early; partial holds everything recorded up to the failure.
struct evolution_error : numerical_error {
  evolution_error(const std::string& what, EvolutionTrace partial)
      : numerical_error(what), partial(std::move(partial)) {}
  EvolutionTrace partial;
};

struct EvolveOptions {
  Boundary boundary = Boundary::open;
  std::vector<double> snapshot_times;
  bool store_states = false;
};

// Eigenvectors of g0^-1 g1 = -sigma_z: +1 -> (0, 1), -1 -> (1, 0).
inline std::array<cplx, 2> chiral_spinor(int branch) {
  if (branch == 1) return {0.0, 1.0};
  if (branch == -1) return {1.0, 0.0};
  throw error("spinor branch must be +1 or -1");
}

// e^{i k n a} phi_branch / sqrt(L)
inline SpinorField plane_wave(double k, int branch, std::size_t sites, double spacing) {
  const double kmax = std::numbers::pi / spacing;
  if (!(k > -kmax && k <= kmax)) throw error("plane_wave: k must lie in (-pi/a, pi/a]");
  const auto phi = chiral_spinor(branch);
  SpinorField f;
  f.values.resize(2 * sites);
  const double norm = 1.0 / std::sqrt(static_cast<double>(sites));
  for (std::size_t n = 0; n < sites; ++n) {
    const cplx phase = std::polar(norm, k * static_cast<double>(n) * spacing);
    f.values[2 * n] = phase * phi[0];
    f.values[2 * n + 1] = phase * phi[1];
  }
  return f;
}

// Normalized Gaussian envelope exp(-(x - center)^2 / (2 width^2)) on a plane wave.
inline SpinorField gaussian_packet(double center, double width, double k, int branch, std::size_t sites,
                                   double spacing) {
  if (!(width > 0.0)) throw error("gaussian_packet: width must be positive");
  const auto phi = chiral_spinor(branch);
  SpinorField f;
  f.values.resize(2 * sites);
  for (std::size_t n = 0; n < sites; ++n) {
    const double x = static_cast<double>(n) * spacing;
    const double env = std::exp(-(x - center) * (x - center) / (2 * width * width));
    const cplx amp = std::polar(env, k * x);
    f.values[2 * n] = amp * phi[0];
    f.values[2 * n + 1] = amp * phi[1];
  }
  const double nrm = norm2(f.values);
  if (!(nrm > 0.0)) throw error("gaussian_packet: packet has no weight on the lattice");
  for (auto& v : f.values) v /= nrm;
  return f;
}

inline SpinorField site_kick(std::size_t site, int component, std::size_t sites) {
  if (site >= sites || (component != 0 && component != 1)) throw error("site_kick: index out of range");
  SpinorField f;
  f.values.assign(2 * sites, 0.0);
  f.values[2 * site + component] = 1.0;
  return f;
}

inline double eta_norm(std::span<const cplx> psi, std::span<const double> beta) {
  double s = 0;
  for (std::size_t n = 0; n < beta.size(); ++n) {
    const double w = std::norm(psi[2 * n]) + std::norm(psi[2 * n + 1]);
    if (w != 0.0) s += beta[n] * w;
  }
  return std::sqrt(s);
}

namespace detail {

inline std::size_t step_count(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw error("time step must be positive");
  if (!(t1 >= t0)) throw error("evolution window must satisfy t1 >= t0");
  const double steps = (t1 - t0) / dt;
  const double rounded = std::round(steps);
  return static_cast<std::size_t>(std::abs(steps - rounded) < 1e-9 * std::max(1.0, steps) ? rounded
                                                                                           : std::ceil(steps));
}

// Shared driver: step(t_mid, h, psi) advances psi in place, observe(t, psi)
// returns {norm, eta_norm, physical state}.
template <class Step, class Observe>
EvolutionTrace run_steps(double t0, double t1, double dt, cvector psi, const EvolveOptions& opts, Step&& step,
                         Observe&& observe) {
  EvolutionTrace trace;
  trace.dt = dt;
  const std::size_t nsteps = step_count(t0, t1, dt);
  std::size_t next_snapshot = 0;
  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  auto record = [&](double t) {
    auto [nrm, eta, state] = observe(t, psi);
    trace.times.push_back(t);
    trace.norms.push_back(nrm);
    trace.eta_norms.push_back(eta);
    while (next_snapshot < snaps.size() && snaps[next_snapshot] <= t + 0.5 * dt) {
      if (snaps[next_snapshot] >= t0 - 0.5 * dt) trace.snapshots.push_back({state, t});
      ++next_snapshot;
    }
    if (opts.store_states) trace.states.push_back(state);
    trace.final_state = {std::move(state), t};
  };

  record(t0);
  double t = t0;
  for (std::size_t k = 0; k < nsteps; ++k) {
    const double t_next = k + 1 == nsteps ? t1 : t0 + static_cast<double>(k + 1) * dt;
    const double h = t_next - t;
    try {
      step(t + 0.5 * h, h, psi);
      t = t_next;
      record(t);
    } catch (const error& e) {
      throw evolution_error("evolution stopped at t=" + std::to_string(t) + ": " + e.what(), std::move(trace));
    }
  }
  return trace;
}

}  // namespace detail

inline EvolutionTrace propagate(const MetricModel& model, double mass, const SpinorField& psi0, double t0,
                                double t1, double dt, const EvolveOptions& opts = {}) {
  validate(model);
  if (psi0.values.size() != 2 * model.sites) throw error("propagate: initial state has wrong length");
  sample(model, t0);
  sample(model, t1);
  auto step = [&](double t_mid, double h, cvector& psi) {
    const auto metric = sample(model, t_mid);
    const auto op = build(metric, mass, model.spacing, opts.boundary);
    psi = expm_action(op.matrix, h, psi);
  };
  auto observe = [&](double t, const cvector& psi) {
    const auto metric = sample(model, t);
    return std::tuple{norm2(psi), eta_norm(psi, metric.beta), psi};
  };
  return detail::run_steps(t0, t1, dt, psi0.values, opts, step, observe);
}

// Evolves psi~ = D psi with D = diag(sqrt(alpha_n)) (x) I2 under the flat
// kinetic operator with site mass M alpha_n(t), and reports psi = D^-1 psi~.
// Requires alpha == beta.
inline EvolutionTrace dual_propagate(const MetricModel& model, double mass, const SpinorField& psi0, double t0,
                                     double t1, double dt, const EvolveOptions& opts = {}) {
  validate(model);
  if (!conformally_flat(model)) throw error("dual_propagate: metric must have alpha == beta");
  if (psi0.values.size() != 2 * model.sites) throw error("dual_propagate: initial state has wrong length");
  auto scale_factors = [&](double t) {
    const auto metric = sample(model, t);
    std::vector<double> d(metric.sites());
    for (std::size_t n = 0; n < d.size(); ++n) {
      if (!(metric.alpha[n] > 0.0))
        throw metric_error("dual_propagate: alpha vanishes at site " + std::to_string(n), static_cast<long>(n));
      d[n] = std::sqrt(metric.alpha[n]);
    }
    return d;
  };
  const auto d0 = scale_factors(t0);
  scale_factors(t1);
  cvector tilde = psi0.values;
  for (std::size_t i = 0; i < tilde.size(); ++i) tilde[i] *= d0[i / 2];

  auto step = [&](double t_mid, double h, cvector& psi) {
    const auto metric = sample(model, t_mid);
    std::vector<double> site_mass(metric.sites());
    for (std::size_t n = 0; n < site_mass.size(); ++n) site_mass[n] = mass * metric.alpha[n];
    const auto op = build_flat_with_mass(site_mass, model.spacing, opts.boundary, t_mid);
    psi = expm_action(op.matrix, h, psi);
  };
  auto observe = [&](double t, const cvector& psi_tilde) {
    const auto d = scale_factors(t);
    cvector psi = psi_tilde;
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] /= d[i / 2];
    // beta == alpha, so the eta-norm of psi is the plain norm of psi~
    return std::tuple{norm2(psi), norm2(psi_tilde), std::move(psi)};
  };
  auto trace = detail::run_steps(t0, t1, dt, std::move(tilde), opts, step, observe);
  trace.scheme = "exponential-midpoint (flat dual)";
  return trace;
}

struct DualityCheck {
  EvolutionTrace curved, dual;
  std::vector<double> discrepancy;  // ||psi - psi_dual|| / ||psi|| per recorded time
  double max_discrepancy = 0.0;
};

inline DualityCheck check_duality(const MetricModel& model, double mass, const SpinorField& psi0, double t0,
                                  double t1, double dt, EvolveOptions opts = {}) {
  opts.store_states = true;
  DualityCheck c;
  c.curved = propagate(model, mass, psi0, t0, t1, dt, opts);
  c.dual = dual_propagate(model, mass, psi0, t0, t1, dt, opts);
  for (std::size_t k = 0; k < c.curved.states.size(); ++k) {
    const auto& a = c.curved.states[k];
    const auto& b = c.dual.states[k];
    double diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += std::norm(a[i] - b[i]);
    const double rel = std::sqrt(diff) / norm2(a);
    c.discrepancy.push_back(rel);
    c.max_discrepancy = std::max(c.max_discrepancy, rel);
  }
  return c;
}

}  // namespace nhdirac
