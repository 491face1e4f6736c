#pragma once

// Transition amplitudes <phi, U^t psi> and the time-operator decay bounds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qwtime/dispersion.hpp"
#include "qwtime/parallel.hpp"
#include "qwtime/spectral.hpp"
#include "qwtime/time_operator.hpp"
#include "qwtime/walks.hpp"

namespace qwtime {

inline constexpr double kBoundSlack = 1e-10;

struct DecayRecord {
  double t = 0.0;
  cplx amplitude;
  double bound = 0.0;
  bool bound_applies = false;
  bool satisfied = true;
};

/// <phi, U^t psi> for t = 0..t_max on one branch (U^t = e^{-itg} for
/// Hamiltonian branches, sampled at integer t).
inline std::vector<cplx> amplitude_series(const Field& phi_in, const Field& psi_in, const Band& band, long t_max) {
  const Field phi = to_momentum(phi_in);
  const Field psi = to_momentum(psi_in);
  phi.require_compatible(psi);
  const std::size_t n = psi.size();
  const double s = band.dynamics == Dynamics::Unitary ? 1.0 : -1.0;
  CVec weight(n);
  for (std::size_t j = 0; j < n; ++j) weight[j] = std::conj(phi[j]) * psi[j];
  std::vector<cplx> out(static_cast<std::size_t>(t_max + 1));
  parallel_for(out.size(), [&](std::size_t t) {
    cplx acc{0.0, 0.0};
    const double tt = s * static_cast<double>(t);
    for (std::size_t j = 0; j < n; ++j) acc += weight[j] * std::polar(1.0, tt * band.phase[j]);
    out[t] = acc / static_cast<double>(n);
  });
  return out;
}

/// <phi, U^t psi> for a two-band walk via its eigenframe.
inline std::vector<cplx> amplitude_series(const SpinorField& phi_in, const SpinorField& psi_in,
                                          const DiscreteWalk& walk, long t_max) {
  const auto c = band_components(walk.frame, to_momentum(psi_in));
  const auto d = band_components(walk.frame, to_momentum(phi_in));
  const std::size_t n = c[0].size();
  CVec w0(n), w1(n);
  for (std::size_t j = 0; j < n; ++j) {
    w0[j] = std::conj(d[0][j]) * c[0][j];
    w1[j] = std::conj(d[1][j]) * c[1][j];
  }
  std::vector<cplx> out(static_cast<std::size_t>(t_max + 1));
  parallel_for(out.size(), [&](std::size_t t) {
    cplx acc{0.0, 0.0};
    const double tt = static_cast<double>(t);
    for (std::size_t j = 0; j < n; ++j) {
      acc += w0[j] * std::polar(1.0, tt * walk.bands[0].phase[j]) +
             w1[j] * std::polar(1.0, tt * walk.bands[1].phase[j]);
    }
    out[t] = acc / static_cast<double>(n);
  });
  return out;
}

/// Same series by repeated position-space steps.
inline std::vector<cplx> amplitude_series_position(const SpinorField& phi_in, const SpinorField& psi_in,
                                                   const DiscreteWalk& walk, long t_max,
                                                   Seam seam = Seam::Enforce) {
  const SpinorField phi = to_position(phi_in);
  SpinorField psi = to_position(psi_in);
  require_support_margin(psi, seam);
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(t_max + 1));
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) psi = walk.step(psi);
    out.push_back(inner(phi, psi));
  }
  require_support_margin(psi, seam);
  return out;
}

/// |<psi, U^t psi>|^2 <= 4 (Delta T)^2 / t^2 for t = 1..t_max.
inline std::vector<DecayRecord> survival_bound_check(const Field& psi_in, const Band& band, long t_max) {
  const Field psi = to_momentum(psi_in);
  const double dt = uncertainty(psi, band);
  const auto amps = amplitude_series(psi, psi, band, t_max);
  std::vector<DecayRecord> out;
  for (long t = 1; t <= t_max; ++t) {
    DecayRecord r;
    r.t = static_cast<double>(t);
    r.amplitude = amps[static_cast<std::size_t>(t)];
    r.bound = 4.0 * dt * dt / (r.t * r.t);
    r.bound_applies = true;
    r.satisfied = std::norm(r.amplitude) <= r.bound + kBoundSlack;
    out.push_back(r);
  }
  return out;
}

/// |<phi, U^t psi>| <= (||(T+S)phi|| ||psi|| + ||phi|| ||(T+S)psi||) / |t| for real scalar S.
inline std::vector<DecayRecord> transition_bound_check(const Field& phi_in, const Field& psi_in, const Band& band,
                                                       double S, long t_max) {
  const Field phi = to_momentum(phi_in);
  const Field psi = to_momentum(psi_in);
  const double a = norm(apply_T_band(phi, band) + cplx(S) * phi);
  const double b = norm(apply_T_band(psi, band) + cplx(S) * psi);
  const double c = a * norm(psi) + norm(phi) * b;
  const auto amps = amplitude_series(phi, psi, band, t_max);
  std::vector<DecayRecord> out;
  for (long t = 1; t <= t_max; ++t) {
    DecayRecord r;
    r.t = static_cast<double>(t);
    r.amplitude = amps[static_cast<std::size_t>(t)];
    r.bound = c / r.t;
    r.bound_applies = true;
    r.satisfied = std::abs(r.amplitude) <= r.bound + kBoundSlack;
    out.push_back(r);
  }
  return out;
}

inline bool all_satisfied(const std::vector<DecayRecord>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const DecayRecord& r) { return r.satisfied; });
}

struct HigherOrderResult {
  int order = 1;
  long t_max = 0;
  double sup_full = 0.0;  // sup over [1, t_max] of t^n |amp|
  double sup_half = 0.0;  // sup over [1, t_max / 2]
  double tail_sup = 0.0;  // sup over [t_max / 2, t_max]
  bool stable = false;    // sup_full <= 1.1 sup_half
  std::vector<double> weighted;
};

inline constexpr double kHigherOrderStability = 1.1;

/// sup |t|^n |<phi, U^t psi>| for psi in the domain of T^n.
inline HigherOrderResult higher_order_check(const Field& phi_in, const Field& psi_in, const Band& band, int order,
                                            long t_max) {
  if (order < 1 || order > 3) throw Error(ErrorCode::InvalidParameter, "order must be 1, 2 or 3");
  const Field phi = to_momentum(phi_in);
  const Field psi = to_momentum(psi_in);
  require_admissible(psi, band, kZeroMargin * order);
  Field power = psi;
  for (int i = 0; i < order; ++i) power = apply_T_band(power, band);
  const auto amps = amplitude_series(phi, psi, band, t_max);
  HigherOrderResult res;
  res.order = order;
  res.t_max = t_max;
  for (long t = 1; t <= t_max; ++t) {
    const double w = std::pow(static_cast<double>(t), order) * std::abs(amps[static_cast<std::size_t>(t)]);
    res.weighted.push_back(w);
    res.sup_full = std::max(res.sup_full, w);
    if (2 * t <= t_max) res.sup_half = std::max(res.sup_half, w);
    if (2 * t >= t_max) res.tail_sup = std::max(res.tail_sup, w);
  }
  res.stable = std::isfinite(res.sup_full) && res.sup_full <= kHigherOrderStability * res.sup_half;
  return res;
}

}  // namespace qwtime
