#pragma once

// Evolution operators: continuous-time walks on Z and Z^2, the coined walk
// U = SC, the three-step walk and the bilateral shift.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>

#include "qwtime/dispersion.hpp"
#include "qwtime/error.hpp"
#include "qwtime/parallel.hpp"
#include "qwtime/spectral.hpp"

namespace qwtime {

// ---------------------------------------------------------------------------
// Continuous-time walks

/// (H_1 psi)(x) = (psi(x-1) + psi(x+1)) / 2.
inline Field ctqw_apply_H(const Field& psi, Seam seam = Seam::Enforce) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "ctqw_apply_H expects a position field");
  }
  require_support_margin(psi, seam);
  const std::size_t n = psi.size();
  Field out(psi.grid(), Representation::Position);
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.5 * (psi[(j + n - 1) % n] + psi[(j + 1) % n]);
  return out;
}

/// (H_2 psi)(x) = (1/4) * sum over the four nearest neighbours.
inline TorusField ctqw_apply_H(const TorusField& psi, Seam seam = Seam::Enforce) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "ctqw_apply_H expects a position field");
  }
  require_support_margin(psi, seam);
  const std::size_t n = psi.side();
  TorusField out(psi.grid(), Representation::Position);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      out(r, c) = 0.25 * (psi((r + n - 1) % n, c) + psi((r + 1) % n, c) + psi(r, (c + n - 1) % n) +
                          psi(r, (c + 1) % n));
    }
  }
  return out;
}

/// e^{-itH_1}: multiplication by e^{-it cos k}. Output keeps the input representation.
inline Field ctqw_evolve(const Field& psi, double t, Seam seam = Seam::Enforce) {
  require_support_margin(psi, seam);
  Field f = to_momentum(psi);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::polar(1.0, -t * std::cos(f.grid().k(j)));
  Field out = psi.rep() == Representation::Momentum ? f : fourier_inverse(f);
  require_support_margin(out, seam);
  return out;
}

/// e^{-itH_2}: multiplication by e^{-it (cos k1 + cos k2)/2}.
inline TorusField ctqw_evolve(const TorusField& psi, double t, Seam seam = Seam::Enforce) {
  require_support_margin(psi, seam);
  TorusField f = to_momentum(psi);
  const std::size_t n = f.side();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double e = 0.5 * (std::cos(f.grid().k(r)) + std::cos(f.grid().k(c)));
      f(r, c) *= std::polar(1.0, -t * e);
    }
  }
  TorusField out = psi.rep() == Representation::Momentum ? f : fourier_inverse(f);
  require_support_margin(out, seam);
  return out;
}

// ---------------------------------------------------------------------------
// Shift and coin on the ring

/// (L psi)(x) = psi(x+1).
inline Field shift_L(const Field& psi) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "shift expects a position field");
  }
  const std::size_t n = psi.size();
  Field out(psi.grid(), Representation::Position);
  for (std::size_t j = 0; j < n; ++j) out[j] = psi[(j + 1) % n];
  return out;
}

/// (L* psi)(x) = psi(x-1).
inline Field shift_L_adjoint(const Field& psi) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "shift expects a position field");
  }
  const std::size_t n = psi.size();
  Field out(psi.grid(), Representation::Position);
  for (std::size_t j = 0; j < n; ++j) out[j] = psi[(j + n - 1) % n];
  return out;
}

inline SpinorField apply_coin(const SpinorField& psi, const Mat2& coin) {
  SpinorField out(psi.grid(), psi.rep());
  for (std::size_t j = 0; j < psi.upper.size(); ++j) {
    const cplx u = psi.upper[j];
    const cplx d = psi.lower[j];
    out.upper[j] = coin(0, 0) * u + coin(0, 1) * d;
    out.lower[j] = coin(1, 0) * u + coin(1, 1) * d;
  }
  return out;
}

/// S = diag(L, L*).
inline SpinorField shift_S(const SpinorField& psi) { return {shift_L(psi.upper), shift_L_adjoint(psi.lower)}; }

namespace detail {

inline void require_position(const SpinorField& psi) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "position-space step expects a position field");
  }
}

inline SpinorField threestep_step_unchecked(const SpinorField& psi, double b) {
  const double a = threestep_a(b);
  Mat2 c2, c3;
  c2 << b, a, -a, b;
  c3 << b, -a, a, b;
  return shift_S(shift_S(apply_coin(shift_S(apply_coin(psi, c3)), c2)));
}

}  // namespace detail

/// One step of U = SC in position space.
inline SpinorField dtqw_step(const SpinorField& psi, const CoinParams& coin, Seam seam = Seam::Enforce) {
  detail::require_position(psi);
  require_support_margin(psi, seam);
  return shift_S(apply_coin(psi, coin.matrix));
}

/// One step of U3 = S C1 S C2 S C3 in position space.
inline SpinorField threestep_step(const SpinorField& psi, double b, Seam seam = Seam::Enforce) {
  detail::require_position(psi);
  require_support_margin(psi, seam);
  return detail::threestep_step_unchecked(psi, b);
}

// ---------------------------------------------------------------------------
// Discrete-time walks as a bundle of symbol, bands and frame

struct DiscreteWalk {
  std::string name;
  MomentumGrid grid{16};
  std::function<Mat2(double)> symbol;
  std::function<SpinorField(const SpinorField&)> step;
  std::array<Band, 2> bands;
  Frame frame;
};

inline DiscreteWalk coined_walk(const CoinParams& coin, const MomentumGrid& grid, std::string name = "coined") {
  DiscreteWalk w;
  w.name = std::move(name);
  w.grid = grid;
  w.symbol = [coin](double k) { return coined_symbol_at(coin, k); };
  w.step = [coin](const SpinorField& psi) { return shift_S(apply_coin(psi, coin.matrix)); };
  w.bands = coined_bands(coin, grid);
  w.frame = eigenframe(w.symbol, w.bands, grid);
  return w;
}

inline DiscreteWalk threestep_walk(double b, const MomentumGrid& grid) {
  DiscreteWalk w;
  w.name = "threestep";
  w.grid = grid;
  w.symbol = [b](double k) { return threestep_symbol_at(b, k); };
  w.step = [b](const SpinorField& psi) { return detail::threestep_step_unchecked(psi, b); };
  w.bands = threestep_bands_any(b, grid);
  w.frame = eigenframe(w.symbol, w.bands, grid);
  return w;
}

/// Band components f_j = <v_j, psi> of a momentum spinor.
inline std::array<Field, 2> band_components(const Frame& frame, const SpinorField& psi) {
  if (psi.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "band components need a momentum field");
  }
  if (!(frame.grid == psi.grid())) throw Error(ErrorCode::GridMismatch, "frame and field grids differ");
  std::array<Field, 2> out{Field(psi.grid(), Representation::Momentum),
                           Field(psi.grid(), Representation::Momentum)};
  for (std::size_t j = 0; j < psi.upper.size(); ++j) {
    const Vec2 v(psi.upper[j], psi.lower[j]);
    const Vec2 c = frame.W[j].adjoint() * v;
    out[0][j] = c(0);
    out[1][j] = c(1);
  }
  return out;
}

/// psi = v_1 f_1 + v_2 f_2.
inline SpinorField from_band_components(const Frame& frame, const Field& f1, const Field& f2) {
  f1.require_compatible(f2);
  SpinorField out(f1.grid(), Representation::Momentum);
  for (std::size_t j = 0; j < f1.size(); ++j) {
    const Vec2 v = frame.W[j] * Vec2(f1[j], f2[j]);
    out.upper[j] = v(0);
    out.lower[j] = v(1);
  }
  return out;
}

inline SpinorField apply_symbol(const DiscreteWalk& walk, const SpinorField& psi) {
  if (psi.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "symbol multiplication needs a momentum field");
  }
  SpinorField out(psi.grid(), Representation::Momentum);
  for (std::size_t j = 0; j < psi.upper.size(); ++j) {
    const Vec2 v = walk.symbol(psi.grid().k(j)) * Vec2(psi.upper[j], psi.lower[j]);
    out.upper[j] = v(0);
    out.lower[j] = v(1);
  }
  return out;
}

inline SpinorField apply_symbol_adjoint(const DiscreteWalk& walk, const SpinorField& psi) {
  SpinorField out(psi.grid(), Representation::Momentum);
  for (std::size_t j = 0; j < psi.upper.size(); ++j) {
    const Vec2 v = walk.symbol(psi.grid().k(j)).adjoint() * Vec2(psi.upper[j], psi.lower[j]);
    out.upper[j] = v(0);
    out.lower[j] = v(1);
  }
  return out;
}

inline constexpr long kDirectPowerLimit = 8;

/// U^t in momentum space: repeated symbol products for 0 <= t <= 8, the
/// eigen-decomposition W diag(lambda^t) W^{-1} otherwise.
inline SpinorField evolve_momentum(const DiscreteWalk& walk, const SpinorField& psi, long t) {
  const SpinorField f = to_momentum(psi);
  if (t >= 0 && t <= kDirectPowerLimit) {
    SpinorField out = f;
    for (long s = 0; s < t; ++s) out = apply_symbol(walk, out);
    return out;
  }
  SpinorField out(f.grid(), Representation::Momentum);
  const double tt = static_cast<double>(t);
  parallel_for(f.upper.size(), [&](std::size_t j) {
    const Mat2& w = walk.frame.W[j];
    Vec2 c = w.adjoint() * Vec2(f.upper[j], f.lower[j]);
    c(0) *= std::polar(1.0, tt * walk.bands[0].phase[j]);
    c(1) *= std::polar(1.0, tt * walk.bands[1].phase[j]);
    const Vec2 v = w * c;
    out.upper[j] = v(0);
    out.lower[j] = v(1);
  });
  return out;
}

/// U^t by t position-space steps; the seam rule is checked before and after.
inline SpinorField evolve_position(const DiscreteWalk& walk, const SpinorField& psi, long t,
                                   Seam seam = Seam::Enforce) {
  if (t < 0) throw Error(ErrorCode::InvalidParameter, "position stepping needs t >= 0");
  SpinorField out = to_position(psi);
  require_support_margin(out, seam);
  for (long s = 0; s < t; ++s) out = walk.step(out);
  require_support_margin(out, seam);
  return out;
}

inline SpinorField dtqw_evolve_momentum(const SpinorField& psi, const CoinParams& coin, long t) {
  return evolve_momentum(coined_walk(coin, psi.grid()), psi, t);
}

// ---------------------------------------------------------------------------
// Bilateral shift L with position operator X on the ring

struct ToyModel {
  MomentumGrid grid{16};

  Field L(const Field& psi) const { return shift_L(psi); }
  Field L_adjoint(const Field& psi) const { return shift_L_adjoint(psi); }
  /// (X psi)(x) = x psi(x).
  Field X(const Field& psi) const {
    Field out = psi;
    for (std::size_t j = 0; j < psi.size(); ++j) out[j] *= static_cast<double>(grid.site(j));
    return out;
  }
  Band band() const { return shift_band(grid); }
};

inline ToyModel toy_pair(std::size_t n) { return ToyModel{MomentumGrid(n)}; }

/// Max over sites x with |x| < n/2 - seam width of |(L*(-X)L psi)(x) - (1 - x) psi(x)|.
inline double toy_identity_residual(const ToyModel& toy, const Field& psi) {
  Field lhs = toy.L_adjoint(toy.X(toy.L(psi)));
  lhs *= -1.0;
  const long half = static_cast<long>(toy.grid.size() / 2);
  double worst = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const long x = toy.grid.site(j);
    if (std::abs(x) >= half - kSeamWidth) continue;
    const cplx rhs = (1.0 - static_cast<double>(x)) * psi[j];
    worst = std::max(worst, std::abs(lhs[j] - rhs));
  }
  return worst;
}

}  // namespace qwtime
