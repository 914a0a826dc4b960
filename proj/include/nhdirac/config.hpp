#pragma once

// Run configuration. The on-disk form is a JSON document with a schema_version
// field; every command-line flag is a patch of one JSON pointer in it, listed
// in kFlagTable.

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "expr.hpp"
#include "lattice_operator.hpp"
#include "metric.hpp"

namespace nhdirac {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "NHDIRAC_OUTPUT_DIR";

struct InitialStateConfig {
  std::string kind = "gaussian";  // gaussian | plane_wave | site_kick
  double k = 0.0;
  int branch = 1;
  std::optional<double> center;  // defaults to the lattice midpoint
  double width = 10.0;
  std::size_t site = 0;
  int component = 0;
};

struct RunConfig {
  int schema_version = kSchemaVersion;

  std::string family = "flat";
  std::optional<double> q;  // defaults to 1/((L-1) a)
  double r = 0.0;
  std::string alpha_expr, beta_expr;
  expr::ParamMap params;

  std::size_t sites = 500;
  double spacing = 1.0;
  double mass = 0.0;
  Boundary boundary = Boundary::open;

  double tolerance = 1e-12;
  std::vector<double> times{0.0};

  std::string axis = "real";  // real | imaginary | both
  std::optional<double> gamma;
  std::optional<double> energy_min, energy_max;
  std::size_t energy_count = 401;
  bool heatmap = true;

  double t0 = 0.0, t1 = 1.0, dt = 1e-3;
  InitialStateConfig initial;
  std::vector<double> snapshots;
  bool check_duality = false;

  std::string output_dir = "out";

  double q_value() const { return q ? *q : 1.0 / ((static_cast<double>(sites) - 1.0) * spacing); }
};

enum class FlagKind { number, integer, text, flag, number_list, param };

// Command-line flag and the config field it patches.
struct FlagSpec {
  const char* name;
  const char* pointer;
  FlagKind kind;
  const char* help;
};

inline constexpr FlagSpec kFlagTable[] = {
    {"--family", "/metric/family", FlagKind::text,
     "flat, rindler, de_sitter, anti_de_sitter, weyl, linear_conformal or custom"},
    {"--q", "/metric/q", FlagKind::number, "spatial metric parameter (default 1/((L-1)a))"},
    {"--r", "/metric/r", FlagKind::number, "expansion rate"},
    {"--alpha", "/metric/alpha", FlagKind::text, "custom alpha(x, t) expression"},
    {"--beta", "/metric/beta", FlagKind::text, "custom beta(x, t) expression"},
    {"--param", "/metric/params", FlagKind::param, "custom expression parameter name=value (repeatable)"},
    {"--sites", "/lattice/sites", FlagKind::integer, "number of lattice sites L"},
    {"--spacing", "/lattice/spacing", FlagKind::number, "lattice spacing a"},
    {"--mass", "/lattice/mass", FlagKind::number, "Dirac mass M"},
    {"--boundary", "/lattice/boundary", FlagKind::text, "open or periodic"},
    {"--tolerance", "/symmetry/tolerance", FlagKind::number, "classification tolerance"},
    {"--times", "/times", FlagKind::number_list, "comma-separated time slices"},
    {"--axis", "/ldos/axis", FlagKind::text, "real, imaginary or both"},
    {"--gamma", "/ldos/gamma", FlagKind::number, "Lorentzian broadening"},
    {"--emin", "/ldos/energy_min", FlagKind::number, "lower end of the energy grid"},
    {"--emax", "/ldos/energy_max", FlagKind::number, "upper end of the energy grid"},
    {"--ne", "/ldos/energy_count", FlagKind::integer, "number of energy grid points"},
    {"--heatmap", "/ldos/heatmap", FlagKind::text, "write PPM heatmaps (true/false)"},
    {"--t0", "/evolve/t0", FlagKind::number, "start time"},
    {"--t1", "/evolve/t1", FlagKind::number, "end time"},
    {"--dt", "/evolve/dt", FlagKind::number, "time step"},
    {"--init", "/evolve/initial/kind", FlagKind::text, "gaussian, plane_wave or site_kick"},
    {"--k", "/evolve/initial/k", FlagKind::number, "initial momentum"},
    {"--branch", "/evolve/initial/branch", FlagKind::integer, "spinor branch +1 or -1"},
    {"--center", "/evolve/initial/center", FlagKind::number, "packet center (position units)"},
    {"--width", "/evolve/initial/width", FlagKind::number, "packet width (position units)"},
    {"--site", "/evolve/initial/site", FlagKind::integer, "kicked site"},
    {"--component", "/evolve/initial/component", FlagKind::integer, "kicked spinor component 0 or 1"},
    {"--snapshots", "/evolve/snapshots", FlagKind::number_list, "comma-separated snapshot times"},
    {"--check-duality", "/evolve/check_duality", FlagKind::flag, "also run the flat dual and report discrepancy"},
    {"--output", "/output_dir", FlagKind::text, "output directory"},
};

namespace detail {

inline std::optional<Boundary> parse_boundary(std::string_view s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  return std::nullopt;
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, std::optional<double>>) {
      out = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw config_error("");
      out = v.get<std::size_t>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw config_error("");
      out = v.get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw config_error("");
      out = v.get<double>();
    } else {
      out = v.get<T>();
    }
  } catch (const std::exception&) {
    throw config_error("bad value for '" + std::string(key) + "' in " + where);
  }
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["metric"] = {{"family", c.family}, {"q", detail::optional_number(c.q)}, {"r", c.r},
                 {"alpha", c.alpha_expr}, {"beta", c.beta_expr},          {"params", params}};
  j["lattice"] = {
      {"sites", c.sites}, {"spacing", c.spacing}, {"mass", c.mass}, {"boundary", to_string(c.boundary)}};
  j["symmetry"] = {{"tolerance", c.tolerance}};
  j["times"] = c.times;
  j["ldos"] = {{"axis", c.axis},
               {"gamma", detail::optional_number(c.gamma)},
               {"energy_min", detail::optional_number(c.energy_min)},
               {"energy_max", detail::optional_number(c.energy_max)},
               {"energy_count", c.energy_count},
               {"heatmap", c.heatmap}};
  const auto& s = c.initial;
  j["evolve"] = {{"t0", c.t0},
                 {"t1", c.t1},
                 {"dt", c.dt},
                 {"initial",
                  {{"kind", s.kind},
                   {"k", s.k},
                   {"branch", s.branch},
                   {"center", detail::optional_number(s.center)},
                   {"width", s.width},
                   {"site", s.site},
                   {"component", s.component}}},
                 {"snapshots", c.snapshots},
                 {"check_duality", c.check_duality}};
  j["output_dir"] = c.output_dir;
  return j;
}

// Structural parse; semantic checks live in validate().
inline RunConfig from_json(const json& j) {
  using detail::read;
  RunConfig c;
  detail::reject_unknown(j, {"schema_version", "metric", "lattice", "symmetry", "times", "ldos", "evolve", "output_dir"},
                         "config");
  if (!j.contains("schema_version")) throw config_error("config is missing schema_version");
  read(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != kSchemaVersion)
    throw config_error("unsupported schema_version " + std::to_string(c.schema_version));
  if (j.contains("metric")) {
    const auto& m = j["metric"];
    detail::reject_unknown(m, {"family", "q", "r", "alpha", "beta", "params"}, "metric");
    read(m, "family", c.family, "metric");
    read(m, "q", c.q, "metric");
    read(m, "r", c.r, "metric");
    read(m, "alpha", c.alpha_expr, "metric");
    read(m, "beta", c.beta_expr, "metric");
    if (m.contains("params")) {
      if (!m["params"].is_object()) throw config_error("metric.params must be an object");
      for (const auto& [k, v] : m["params"].items()) {
        if (!v.is_number()) throw config_error("metric parameter '" + k + "' must be a number");
        c.params[k] = v.get<double>();
      }
    }
  }
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    detail::reject_unknown(l, {"sites", "spacing", "mass", "boundary"}, "lattice");
    read(l, "sites", c.sites, "lattice");
    read(l, "spacing", c.spacing, "lattice");
    read(l, "mass", c.mass, "lattice");
    std::string bc = to_string(c.boundary);
    read(l, "boundary", bc, "lattice");
    const auto b = detail::parse_boundary(bc);
    if (!b) throw config_error("boundary must be 'open' or 'periodic'");
    c.boundary = *b;
  }
  if (j.contains("symmetry")) {
    detail::reject_unknown(j["symmetry"], {"tolerance"}, "symmetry");
    read(j["symmetry"], "tolerance", c.tolerance, "symmetry");
  }
  read(j, "times", c.times, "config");
  if (j.contains("ldos")) {
    const auto& l = j["ldos"];
    detail::reject_unknown(l, {"axis", "gamma", "energy_min", "energy_max", "energy_count", "heatmap"}, "ldos");
    read(l, "axis", c.axis, "ldos");
    read(l, "gamma", c.gamma, "ldos");
    read(l, "energy_min", c.energy_min, "ldos");
    read(l, "energy_max", c.energy_max, "ldos");
    read(l, "energy_count", c.energy_count, "ldos");
    read(l, "heatmap", c.heatmap, "ldos");
  }
  if (j.contains("evolve")) {
    const auto& e = j["evolve"];
    detail::reject_unknown(e, {"t0", "t1", "dt", "initial", "snapshots", "check_duality"}, "evolve");
    read(e, "t0", c.t0, "evolve");
    read(e, "t1", c.t1, "evolve");
    read(e, "dt", c.dt, "evolve");
    read(e, "snapshots", c.snapshots, "evolve");
    read(e, "check_duality", c.check_duality, "evolve");
    if (e.contains("initial")) {
      const auto& s = e["initial"];
      detail::reject_unknown(s, {"kind", "k", "branch", "center", "width", "site", "component"}, "evolve.initial");
      read(s, "kind", c.initial.kind, "evolve.initial");
      read(s, "k", c.initial.k, "evolve.initial");
      read(s, "branch", c.initial.branch, "evolve.initial");
      read(s, "center", c.initial.center, "evolve.initial");
      read(s, "width", c.initial.width, "evolve.initial");
      read(s, "site", c.initial.site, "evolve.initial");
      read(s, "component", c.initial.component, "evolve.initial");
    }
  }
  read(j, "output_dir", c.output_dir, "config");
  return c;
}

inline json parse_config_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
}

// Parses a flag's string value into the JSON it stands for.
inline json flag_value(const FlagSpec& f, const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw config_error(std::string(f.name) + ": '" + s + "' is not a number");
    return v;
  };
  switch (f.kind) {
    case FlagKind::number: return number(text);
    case FlagKind::integer: {
      const double v = number(text);
      if (v != std::floor(v)) throw config_error(std::string(f.name) + ": expected an integer");
      return static_cast<long long>(v);
    }
    case FlagKind::text:
      if (std::string_view(f.pointer) == "/ldos/heatmap") {
        if (text == "true") return true;
        if (text == "false") return false;
        throw config_error("--heatmap expects true or false");
      }
      return text;
    case FlagKind::flag: return true;
    case FlagKind::number_list: {
      json arr = json::array();
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        arr.push_back(number(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return arr;
    }
    case FlagKind::param: break;
  }
  throw config_error("unsupported flag kind");
}

// Applies one flag to the config JSON; name=value for --param.
inline void apply_flag(json& doc, const FlagSpec& f, const std::string& text) {
  if (f.kind == FlagKind::param) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("--param expects name=value");
    const std::string name = text.substr(0, eq);
    FlagSpec num{f.name, f.pointer, FlagKind::number, f.help};
    doc[json::json_pointer(std::string(f.pointer) + "/" + name)] = flag_value(num, text.substr(eq + 1));
    return;
  }
  doc[json::json_pointer(f.pointer)] = flag_value(f, text);
}

inline MetricModel metric_model(const RunConfig& c) {
  MetricModel m;
  m.sites = c.sites;
  m.spacing = c.spacing;
  const double q = c.q_value();
  if (c.family == "flat") {
    m.family = Flat{};
  } else if (c.family == "rindler") {
    m.family = Rindler{q};
  } else if (c.family == "de_sitter") {
    m.family = DeSitter{q};
  } else if (c.family == "anti_de_sitter") {
    m.family = AntiDeSitter{q};
  } else if (c.family == "weyl") {
    m.family = Weyl{q, c.r};
  } else if (c.family == "linear_conformal") {
    m.family = LinearConformal{q, c.r};
  } else if (c.family == "custom") {
    if (c.alpha_expr.empty() || c.beta_expr.empty())
      throw config_error("custom metric needs both alpha and beta expressions");
    try {
      m.family = Custom::from_source(c.alpha_expr, c.beta_expr, c.params);
    } catch (const error& e) {
      throw config_error(std::string("custom metric: ") + e.what());
    }
  } else {
    throw config_error("unknown metric family '" + c.family + "'");
  }
  return m;
}

// Semantic checks, all done before any computation. Samples the metric at
// every time the command will touch so domain problems surface as config errors.
inline void validate(const RunConfig& c, bool evolution) {
  if (c.sites < 2) throw config_error("lattice.sites must be at least 2");
  if (!(c.spacing > 0.0) || !std::isfinite(c.spacing)) throw config_error("lattice.spacing must be positive");
  if (!std::isfinite(c.mass)) throw config_error("lattice.mass must be finite");
  if (!(c.tolerance > 0.0)) throw config_error("symmetry.tolerance must be positive");
  if (c.axis != "real" && c.axis != "imaginary" && c.axis != "both")
    throw config_error("ldos.axis must be real, imaginary or both");
  if (c.gamma && !(*c.gamma > 0.0)) throw config_error("ldos.gamma must be positive");
  if (c.energy_count < 2) throw config_error("ldos.energy_count must be at least 2");
  if (c.energy_min && c.energy_max && !(*c.energy_min < *c.energy_max))
    throw config_error("ldos.energy_min must be below ldos.energy_max");
  if (c.times.empty()) throw config_error("times must list at least one time slice");
  const MetricModel model = metric_model(c);
  try {
    validate(model);
    if (evolution) {
      if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw config_error("evolve.dt must be positive");
      if (!(c.t1 >= c.t0)) throw config_error("evolve.t1 must not precede evolve.t0");
      const auto& s = c.initial;
      if (s.kind != "gaussian" && s.kind != "plane_wave" && s.kind != "site_kick")
        throw config_error("evolve.initial.kind must be gaussian, plane_wave or site_kick");
      if (s.branch != 1 && s.branch != -1) throw config_error("evolve.initial.branch must be +1 or -1");
      if (s.kind == "site_kick" && (s.site >= c.sites || (s.component != 0 && s.component != 1)))
        throw config_error("evolve.initial site/component out of range");
      const double kmax = std::numbers::pi / c.spacing;
      if (s.kind == "plane_wave" && !(s.k > -kmax && s.k <= kmax))
        throw config_error("evolve.initial.k must lie in (-pi/a, pi/a]");
      if (s.kind == "gaussian" && !(s.width > 0.0)) throw config_error("evolve.initial.width must be positive");
      if (c.check_duality && !conformally_flat(model))
        throw config_error("--check-duality needs a metric with alpha == beta");
      sample(model, c.t0);
      sample(model, c.t1);
    } else {
      for (double t : c.times) sample(model, t);
    }
  } catch (const config_error&) {
    throw;
  } catch (const error& e) {
    throw config_error(e.what());
  }
}

}  // namespace nhdirac
