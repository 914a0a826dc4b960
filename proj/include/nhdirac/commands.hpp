#pragma once

// Command drivers behind the nhdirac executable. Each takes a validated
// RunConfig, writes its files under the output directory and returns their paths.

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "evolve.hpp"
#include "io.hpp"
#include "lattice_operator.hpp"
#include "metric.hpp"
#include "observables.hpp"
#include "spectral.hpp"
#include "symmetry.hpp"

namespace nhdirac {

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> messages;
};

namespace detail {

// "_t<time>" when the config asks for several slices, empty otherwise.
inline std::string slice_suffix(const RunConfig& c, double t) {
  return c.times.size() > 1 ? "_t" + expr::detail::format_number(t) : std::string{};
}

inline LatticeOperator operator_at(const RunConfig& c, const MetricModel& model, const SampledMetric& metric) {
  return build(metric, c.mass, c.spacing, c.boundary, describe(model));
}

template <class Fn>
void emit(CommandResult& out, const std::filesystem::path& path, Fn&& fn, bool binary = false) {
  io::write_file(path, fn, binary);
  out.files.push_back(path);
}

inline SpinorField initial_state(const RunConfig& c) {
  const auto& s = c.initial;
  if (s.kind == "plane_wave") return plane_wave(s.k, s.branch, c.sites, c.spacing);
  if (s.kind == "site_kick") return site_kick(s.site, s.component, c.sites);
  const double center = s.center ? *s.center : 0.5 * static_cast<double>(c.sites - 1) * c.spacing;
  return gaussian_packet(center, s.width, s.k, s.branch, c.sites, c.spacing);
}

}  // namespace detail

inline CommandResult cmd_spectrum(const RunConfig& c) {
  validate(c, false);
  const auto model = metric_model(c);
  const std::filesystem::path dir = c.output_dir;
  CommandResult out;
  for (double t : c.times) {
    const auto metric = sample(model, t);
    const auto op = detail::operator_at(c, model, metric);
    const auto spec = eig_auto(op);
    const auto report = classify(op, metric, c.tolerance, &spec);
    const auto sfx = detail::slice_suffix(c, t);
    detail::emit(out, dir / ("spectrum" + sfx + ".csv"), [&](std::ostream& os) { io::write_spectrum_csv(os, spec); });
    detail::emit(out, dir / ("symmetry" + sfx + ".json"),
                 [&](std::ostream& os) { os << io::to_json(report, t).dump(2) << '\n'; });
    out.messages.push_back("t=" + expr::detail::format_number(t) + ": " + to_string(report.classification) +
                           ", max residual " + io::format_double(spec.max_residual()));
  }
  return out;
}

inline CommandResult cmd_ldos(const RunConfig& c) {
  validate(c, false);
  const auto model = metric_model(c);
  const std::filesystem::path dir = c.output_dir;
  std::vector<EnergyAxis> axes;
  if (c.axis != "imaginary") axes.push_back(EnergyAxis::real);
  if (c.axis != "real") axes.push_back(EnergyAxis::imaginary);
  CommandResult out;
  for (double t : c.times) {
    const auto metric = sample(model, t);
    const auto spec = eig_auto(detail::operator_at(c, model, metric));
    const auto sfx = detail::slice_suffix(c, t);
    for (auto axis : axes) {
      const double gamma = c.gamma ? *c.gamma : default_gamma(spec, axis);
      EnergyGrid grid = default_grid(spec, axis, gamma, c.energy_count);
      if (c.energy_min) grid.min = *c.energy_min;
      if (c.energy_max) grid.max = *c.energy_max;
      if (!(grid.min < grid.max)) throw config_error("LDOS energy grid is empty");
      const auto g = ldos(spec, axis, grid, gamma);
      const std::string stem = std::string("ldos_") + (axis == EnergyAxis::real ? "real" : "imag") + sfx;
      detail::emit(out, dir / (stem + ".csv"), [&](std::ostream& os) { io::write_ldos_csv(os, g); });
      if (c.heatmap) detail::emit(out, dir / (stem + ".ppm"), [&](std::ostream& os) { io::write_ppm(os, g); }, true);
      json meta = {{"axis", to_string(axis)}, {"t", t},
                   {"gamma", gamma},          {"energy_min", grid.min},
                   {"energy_max", grid.max},  {"energy_count", grid.count},
                   {"sites", g.sites},        {"normalized", g.normalized},
                   {"degenerate", g.degenerate}};
      detail::emit(out, dir / (stem + ".json"), [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
      if (g.degenerate) out.messages.push_back(stem + ": all-zero LDOS grid, left unnormalized");
    }
  }
  return out;
}

inline CommandResult cmd_evolve(const RunConfig& c) {
  validate(c, true);
  const auto model = metric_model(c);
  const std::filesystem::path dir = c.output_dir;
  const auto psi0 = detail::initial_state(c);
  EvolveOptions opts;
  opts.boundary = c.boundary;
  opts.snapshot_times = c.snapshots;
  CommandResult out;

  auto write_trace = [&](const EvolutionTrace& tr, std::span<const double> disc) {
    detail::emit(out, dir / "trace.csv", [&](std::ostream& os) { io::write_trace_csv(os, tr, disc); });
    for (const auto& snap : tr.snapshots)
      detail::emit(out, dir / ("snapshot_t" + expr::detail::format_number(snap.t) + ".csv"),
                   [&](std::ostream& os) { io::write_snapshot_csv(os, snap); });
  };

  try {
    if (c.check_duality) {
      const auto check = check_duality(model, c.mass, psi0, c.t0, c.t1, c.dt, opts);
      write_trace(check.curved, check.discrepancy);
      out.messages.push_back("max duality discrepancy " + io::format_double(check.max_discrepancy));
    } else {
      const auto tr = propagate(model, c.mass, psi0, c.t0, c.t1, c.dt, opts);
      write_trace(tr, {});
      out.messages.push_back("final norm " + io::format_double(tr.norms.back()));
    }
  } catch (const evolution_error& e) {
    write_trace(e.partial, {});
    throw;
  }
  return out;
}

inline CommandResult cmd_classify(const RunConfig& c) {
  validate(c, false);
  const auto model = metric_model(c);
  const std::filesystem::path dir = c.output_dir;
  CommandResult out;
  for (double t : c.times) {
    const auto metric = sample(model, t);
    const auto report = classify(detail::operator_at(c, model, metric), metric, c.tolerance);
    detail::emit(out, dir / ("symmetry" + detail::slice_suffix(c, t) + ".json"),
                 [&](std::ostream& os) { os << io::to_json(report, t).dump(2) << '\n'; });
    out.messages.push_back("t=" + expr::detail::format_number(t) + ": " + to_string(report.classification));
  }
  return out;
}

inline CommandResult cmd_dump(const RunConfig& c) {
  validate(c, false);
  const auto model = metric_model(c);
  const std::filesystem::path dir = c.output_dir;
  CommandResult out;
  for (double t : c.times) {
    const auto metric = sample(model, t);
    const auto table = hopping_table(metric, c.mass, c.boundary);
    const auto op = detail::operator_at(c, model, metric);
    const auto sfx = detail::slice_suffix(c, t);
    detail::emit(out, dir / ("matrix" + sfx + ".csv"), [&](std::ostream& os) { io::write_matrix_csv(os, op.matrix); });
    detail::emit(out, dir / ("metric" + sfx + ".csv"),
                 [&](std::ostream& os) { io::write_metric_table(os, metric, table); });
  }
  return out;
}

}  // namespace nhdirac
