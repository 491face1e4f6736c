#pragma once

#include <utility>
#include <vector>

#include "oracles.hpp"
#include "qwtime/dispersion.hpp"

namespace fixture {

using namespace qwtime;

/// Arcs between consecutive zeros of g', shrunk by `inset` on both ends.
inline std::vector<std::pair<double, double>> free_arcs(const Band& band, double inset = 0.1) {
  std::vector<std::pair<double, double>> arcs;
  if (band.zeros.empty()) {
    arcs.emplace_back(0.0, kTwoPi);
    return arcs;
  }
  for (std::size_t i = 0; i < band.zeros.size(); ++i) {
    const double lo = band.zeros[i].k;
    const double hi = i + 1 < band.zeros.size() ? band.zeros[i + 1].k : band.zeros[0].k + kTwoPi;
    arcs.emplace_back(lo + inset, hi - inset);
  }
  return arcs;
}

/// Normalized random combination of bumps, each inside one zero-free arc and
/// covering at least `min_fraction` of it.
inline Field random_admissible(oracle::Gen& gen, const Band& band, int bumps = 3, double inset = 0.1,
                               double min_fraction = 0.4) {
  const auto arcs = free_arcs(band, inset);
  Field out(band.grid, Representation::Momentum);
  for (int b = 0; b < bumps; ++b) {
    const auto& [lo, hi] = arcs[static_cast<std::size_t>(gen.integer(0, static_cast<int>(arcs.size()) - 1))];
    const double w = gen.uniform(min_fraction, std::max(min_fraction, 0.9)) * (hi - lo);
    const double a = gen.uniform(lo, hi - w);
    out += gen.cnormal() * smooth_bump(band.grid, a, a + w);
  }
  return normalized(out);
}

}  // namespace fixture
