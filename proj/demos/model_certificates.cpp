// Well-posedness paperwork for the four named ionic models: growth caps,
// quartic dissipation, one-sided Lipschitz constants, and the admissibility
// of -c1 against the operator's alpha / C_p ratio, all on the default
// sampling box. The same checks gate the stochastic experiment drivers.

#include <bidosim/bidomain_operator.hpp>
#include <bidosim/ionic.hpp>
#include <bidosim/mesh.hpp>

#include <cstdio>
#include <numbers>

using namespace bidosim;

int main() {
  const auto grid = make_grid(1, std::numbers::pi, 129);
  const auto op =
      compose_bidomain(make_conductivity(grid, 1.0), make_conductivity(grid, 1.0), grid);
  const double alpha = op.constants.alpha;
  const double cp = op.constants.poincare_cp;
  std::printf("operator: alpha = %.6f, C_p = %.6f, alpha/C_p = %.6f\n\n", alpha, cp,
              alpha / cp);

  const IonicModel models[] = {
      make_fitzhugh_nagumo(0.8, 0.5, 1.0, 0.8),
      make_aliev_panfilov(1.5, 8.0, 0.15),
      make_rogers_mcculloch(2.0, 1.2, 0.3, 0.9, 0.4),
      make_allen_cahn(0.7),
  };
  std::printf("%-18s %7s %9s %9s %11s %9s  %s\n", "model", "growth", "quartic", "c1", "c2",
              "margin", "admissible");
  for (const auto& m : models) {
    const auto rep = check_model(m, alpha, cp);
    std::printf("%-18s %7s %9s %9.4f %11.4f %9.4f  %s\n", ionic_kind_name(m.kind),
                rep.growth.unbounded ? "FAIL" : "ok", rep.coercivity.violated ? "FAIL" : "ok",
                rep.monotonicity.c1, rep.monotonicity.c2, rep.coefficient.margin,
                rep.coefficient.satisfied ? "yes" : "no");
  }
  return 0;
}
