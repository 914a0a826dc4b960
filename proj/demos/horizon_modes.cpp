// Zero modes pinned to the horizon site of Rindler and de Sitter lattices,
// compared with anti-de Sitter, which has none.
#include <cstdio>

#include "nhdirac/nhdirac.hpp"

using namespace nhdirac;

int main() {
  const std::size_t L = 200;
  const double q = 1.0 / (L - 1);
  const double mass = 1.0;
  const std::pair<const char*, MetricFamily> cases[] = {
      {"rindler", Rindler{q}}, {"de_sitter", DeSitter{q}}, {"anti_de_sitter", AntiDeSitter{q}}};

  for (const auto& [name, family] : cases) {
    const MetricModel model{family, 1.0, L};
    const auto metric = sample(model, 0.0);
    const auto op = build(metric, mass, 1.0);
    const auto spec = eig_auto(op);
    const auto report = classify(op, metric, kDefaultSymmetryTolerance, &spec);
    const auto modes = horizon_modes(spec, 1e-10);

    double gap = INFINITY;
    for (auto e : spec.eigenvalues) gap = std::min(gap, std::abs(e));
    std::printf("%-15s %-15s min|E| = %.3e  horizon modes: %zu", name, to_string(report.classification).c_str(), gap,
                modes.size());
    for (const auto& m : modes) std::printf("  [site %zu, weight %.6f]", m.site, m.weight);
    std::printf("\n");
  }
}
