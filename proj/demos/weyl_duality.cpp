// A wave packet on an expanding Weyl lattice, evolved directly and through the
// flat dual psi~ = sqrt(alpha) psi. The plain norm decays roughly as exp(-r t / 2) while
// the eta-norm stays put.
#include <cmath>
#include <cstdio>
#include <numbers>

#include "nhdirac/nhdirac.hpp"

using namespace nhdirac;

int main() {
  const std::size_t L = 100;
  const double r = 0.5;
  const MetricModel model{Weyl{0.01, r}, 1.0, L};
  const auto psi0 = gaussian_packet(49.5, 8.0, std::numbers::pi / 8, 1, L, 1.0);

  const auto check = check_duality(model, 1.0, psi0, 0.0, 2.0, 1e-2);
  const auto& tr = check.curved;
  std::printf("%6s %14s %14s %14s %12s\n", "t", "norm", "exp(-rt/2)", "eta_norm", "discrepancy");
  for (std::size_t k = 0; k < tr.times.size(); k += 25)
    std::printf("%6.2f %14.10f %14.10f %14.10f %12.3e\n", tr.times[k], tr.norms[k], std::exp(-r * tr.times[k] / 2),
                tr.eta_norms[k], check.discrepancy[k]);
  std::printf("max discrepancy %.3e\n", check.max_discrepancy);
}
