#pragma once

// CSV, JSON and PPM writers. Numbers are printed with 17 significant digits so
// outputs round-trip exactly and repeat byte for byte.

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "cubehelix.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "lattice_operator.hpp"
#include "metric.hpp"
#include "observables.hpp"
#include "spectral.hpp"
#include "symmetry.hpp"

namespace nhdirac::io {

// Equivalent to printf("%.17g").
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), end);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
    return *this;
  }

  template <class... T>
  CsvWriter& row(const T&... v) {
    bool first = true;
    ((put(v, first)), ...);
    os_ << '\n';
    return *this;
  }

 private:
  template <class T>
  void put(const T& v, bool& first) {
    if (!first) os_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      os_ << format_double(v);
    } else {
      os_ << v;
    }
  }

  std::ostream& os_;
};

inline void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& spec) {
  CsvWriter w(os);
  w.header({"index", "re_E", "im_E", "residual"});
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double res = spec.residuals.empty() ? 0.0 : spec.residuals[j];
    w.row(j, spec.eigenvalues[j].real(), spec.eigenvalues[j].imag(), res);
  }
}

inline void write_ldos_csv(std::ostream& os, const LdosGrid& g) {
  CsvWriter w(os);
  w.header({"site", "energy", "value"});
  for (std::size_t n = 0; n < g.sites; ++n)
    for (std::size_t k = 0; k < g.energies.size(); ++k) w.row(n, g.energies[k], g.at(n, k));
}

// Nonzero entries only.
inline void write_matrix_csv(std::ostream& os, const CMatrix& m) {
  CsvWriter w(os);
  w.header({"row", "col", "re", "im"});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != cplx{}) w.row(i, j, m(i, j).real(), m(i, j).imag());
}

// Hoppings are the dimensionless ratios sqrt(alpha_n alpha_m) / beta_n; the
// matrix blocks carry an extra 1/(2a) and the kernel g0^-1 g1.
inline void write_metric_table(std::ostream& os, const SampledMetric& m, const HoppingTable& h) {
  CsvWriter w(os);
  w.header({"site", "alpha", "beta", "dlog_beta_dt", "hop_forward", "hop_backward", "onsite_mass", "onsite_gain"});
  for (std::size_t n = 0; n < m.sites(); ++n)
    w.row(n, m.alpha[n], m.beta[n], m.dlog_beta_dt[n], h.forward[n], h.backward[n], h.mass[n], -0.5 * h.gain[n]);
}

inline void write_trace_csv(std::ostream& os, const EvolutionTrace& tr,
                            std::span<const double> discrepancy = {}) {
  CsvWriter w(os);
  if (discrepancy.empty()) {
    w.header({"t", "norm", "eta_norm"});
    for (std::size_t k = 0; k < tr.times.size(); ++k) w.row(tr.times[k], tr.norms[k], tr.eta_norms[k]);
  } else {
    w.header({"t", "norm", "eta_norm", "discrepancy"});
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      w.row(tr.times[k], tr.norms[k], tr.eta_norms[k], k < discrepancy.size() ? discrepancy[k] : 0.0);
  }
}

inline void write_snapshot_csv(std::ostream& os, const SpinorField& f) {
  CsvWriter w(os);
  w.header({"site", "re_psi0", "im_psi0", "re_psi1", "im_psi1"});
  for (std::size_t n = 0; n < f.sites(); ++n)
    w.row(n, f.values[2 * n].real(), f.values[2 * n].imag(), f.values[2 * n + 1].real(),
          f.values[2 * n + 1].imag());
}

// Binary P6 heatmap: column = site, row = energy with row 0 at the largest energy.
// Values are divided by the grid maximum first so unnormalized grids still span
// the colour range.
inline void write_ppm(std::ostream& os, const LdosGrid& g, const CubehelixParams& p = {}) {
  const std::size_t width = g.sites, height = g.energies.size();
  const double peak = g.max_value();
  os << "P6\n" << width << ' ' << height << "\n255\n";
  std::string row(3 * width, '\0');
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t k = height - 1 - y;
    for (std::size_t x = 0; x < width; ++x) {
      const double v = peak > 0.0 ? g.at(x, k) / peak : 0.0;
      const auto c = cubehelix(v, p);
      for (int ch = 0; ch < 3; ++ch) row[3 * x + ch] = static_cast<char>(c[ch]);
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

inline nlohmann::ordered_json to_json(const SymmetryReport& r, double t) {
  nlohmann::ordered_json j;
  j["hermitian_residual"] = r.hermitian_residual;
  j["quasi_hermitian_residual"] = r.quasi_hermitian_residual;
  j["pt_residual"] = r.pt_residual;
  j["pt_spinor"] = to_string(r.pt_spinor);
  j["classification"] = to_string(r.classification);
  j["spectrum_real"] = r.spectrum_real;
  j["t"] = t;
  j["tolerance"] = r.tolerance;
  return j;
}

// Opens path for writing, creating parent directories.
inline std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!os) throw error("cannot open '" + path.string() + "' for writing");
  return os;
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn, bool binary = false) {
  auto os = open_output(path, binary);
  fn(os);
  os.flush();
  if (!os) throw error("write to '" + path.string() + "' failed");
}

}  // namespace nhdirac::io
