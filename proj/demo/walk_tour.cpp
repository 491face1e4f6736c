// Windings, classification and decay of survival amplitudes for the preset walks.

#include <cmath>
#include <cstdio>

#include "qwtime/qwtime.hpp"

using namespace qwtime;

int main() {
  const MomentumGrid grid(2048);

  struct Preset {
    const char* name;
    DiscreteWalk walk;
  };
  const Preset presets[] = {
      {"shift |a|=1", coined_walk(coin_from_parameters(1.0, 0.0, 0.0), grid)},
      {"hadamard", coined_walk(hadamard_coin(), grid, "hadamard")},
      {"three-step b^2=0.5", threestep_walk(std::sqrt(0.5), grid)},
      {"three-step b^2=0.09", threestep_walk(0.3, grid)},
  };

  std::printf("%-22s %8s %10s %12s %s\n", "walk", "winding", "zeros", "deficiency", "spectrum");
  for (const auto& p : presets) {
    const auto c = classify(p.walk.bands);
    std::printf("%-22s %3d,%-4d %4zu,%-5zu %5zu,%-6zu %s\n", p.name, p.walk.bands[0].winding,
                p.walk.bands[1].winding, p.walk.bands[0].zero_count(), p.walk.bands[1].zero_count(), c.d_plus,
                c.d_minus, c.spectrum.c_str());
  }

  // Survival amplitude of a bump between the two zeros of the Hadamard branch.
  const Band& band = presets[1].walk.bands[0];
  const Field psi = normalized(smooth_bump(grid, band.zeros[0].k + 0.2, band.zeros[1].k - 0.2));
  const double dt = uncertainty(psi, band);
  std::printf("\nhadamard branch 1, Delta T = %.6f\n%6s %14s %14s\n", dt, "t", "|<psi,U^t psi>|", "2 Delta T / t");
  const auto rs = survival_bound_check(psi, band, 200);
  for (const auto& r : rs) {
    if (r.t == 1 || r.t == 5 || std::fmod(r.t, 25.0) == 0.0) {
      std::printf("%6.0f %14.3e %14.3e\n", r.t, std::abs(r.amplitude), 2.0 * dt / r.t);
    }
  }
  std::printf("bound satisfied at every step: %s\n", all_satisfied(rs) ? "yes" : "no");
}
