#pragma once

// Coins, walk symbols, dispersion branches, winding numbers, zeros of the
// branch derivative and eigenvector frames.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qwtime/error.hpp"
#include "qwtime/spectral.hpp"

namespace qwtime {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline double wrap_angle(double x) noexcept {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Coins

/// Validated 2x2 unitary coin C = [[a, b], [c, d]] with
/// a = |a| e^{i alpha} and det C = e^{i delta}.
struct CoinParams {
  Mat2 matrix;
  double abs_a = 0.0;
  double alpha = 0.0;  // meaningful only when abs_a > 0
  double delta = 0.0;
  bool degenerate_alpha = false;

  cplx a() const { return matrix(0, 0); }
  cplx b() const { return matrix(0, 1); }
  cplx c() const { return matrix(1, 0); }
  cplx d() const { return matrix(1, 1); }
};

inline constexpr double kCoinUnitarityTolerance = 1e-10;
inline constexpr double kUnitAbsTolerance = 1e-12;

inline double unitarity_defect(const Mat2& m) {
  return (m.adjoint() * m - Mat2::Identity()).cwiseAbs().maxCoeff();
}

inline CoinParams coin_from_entries(const Mat2& m) {
  const double defect = unitarity_defect(m);
  if (!(defect < kCoinUnitarityTolerance)) {
    throw Error(ErrorCode::NotUnitary, "coin unitarity defect " + std::to_string(defect));
  }
  CoinParams p;
  p.matrix = m;
  p.abs_a = std::min(1.0, std::abs(m(0, 0)));
  p.degenerate_alpha = p.abs_a < kUnitAbsTolerance;
  p.alpha = p.degenerate_alpha ? 0.0 : wrap_angle(std::arg(m(0, 0)));
  p.delta = wrap_angle(std::arg(m.determinant()));
  return p;
}

/// C = [[|a| e^{i alpha}, b], [-conj(b) e^{i delta}, |a| e^{i(delta - alpha)}]].
inline CoinParams coin_from_parameters(double abs_a, double alpha, double delta, cplx b) {
  if (abs_a < 0.0 || abs_a > 1.0) {
    throw Error(ErrorCode::InvalidParameter, "|a| must lie in [0, 1]");
  }
  if (std::abs(abs_a * abs_a + std::norm(b) - 1.0) > kUnitAbsTolerance) {
    throw Error(ErrorCode::NotUnitary, "|a|^2 + |b|^2 must equal 1");
  }
  Mat2 m;
  m << std::polar(abs_a, alpha), b, -std::conj(b) * std::polar(1.0, delta),
      std::polar(abs_a, delta - alpha);
  return coin_from_entries(m);
}

inline CoinParams coin_from_parameters(double abs_a, double alpha, double delta) {
  return coin_from_parameters(abs_a, alpha, delta,
                              cplx(std::sqrt(std::max(0.0, 1.0 - abs_a * abs_a)), 0.0));
}

inline CoinParams hadamard_coin() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat2 m;
  m << r, r, r, -r;
  return coin_from_entries(m);
}

/// U(k) = [[e^{ik} a, e^{ik} b], [e^{-ik} c, e^{-ik} d]].
inline Mat2 coined_symbol_at(const CoinParams& coin, double k) {
  const cplx ep = std::polar(1.0, k);
  const cplx em = std::conj(ep);
  Mat2 u;
  u << ep * coin.a(), ep * coin.b(), em * coin.c(), em * coin.d();
  return u;
}

inline std::vector<Mat2> coined_symbol(const CoinParams& coin, const MomentumGrid& grid) {
  std::vector<Mat2> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = coined_symbol_at(coin, grid.k(j));
  return out;
}

/// Three-step walk U3 = S C1 S C2 S C3 with C1 = 1, C2 = [[b, a], [-a, b]],
/// C3 = [[b, -a], [a, b]] and a = +sqrt(1 - b^2).
inline double threestep_a(double b) {
  if (!std::isfinite(b) || b * b > 1.0) {
    throw Error(ErrorCode::InvalidParameter, "three-step walk needs b^2 <= 1");
  }
  return std::sqrt(std::max(0.0, 1.0 - b * b));
}

inline Mat2 threestep_symbol_at(double b, double k) {
  const double a = threestep_a(b);
  const cplx e1 = std::polar(1.0, k);
  const cplx e3 = std::polar(1.0, 3.0 * k);
  Mat2 u;
  u << a * a * e1 + b * b * e3, a * b * e1 - a * b * e3, -a * b * std::conj(e1) + a * b * std::conj(e3),
      a * a * std::conj(e1) + b * b * std::conj(e3);
  return u;
}

inline std::vector<Mat2> threestep_symbol(double b, const MomentumGrid& grid) {
  std::vector<Mat2> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = threestep_symbol_at(b, grid.k(j));
  return out;
}

// ---------------------------------------------------------------------------
// Bands

enum class Dynamics { Unitary, Hamiltonian };
enum class ZeroKind { SignChange, Tangential };

constexpr std::string_view to_string(ZeroKind kind) {
  return kind == ZeroKind::SignChange ? "sign-change" : "tangential";
}

struct DerivativeZero {
  double k = 0.0;
  ZeroKind kind = ZeroKind::SignChange;
};

/// One dispersion branch. For unitary dynamics lambda = e^{i g} is the
/// eigenvalue of the walk symbol; for Hamiltonian dynamics g is the energy and
/// the propagator symbol is e^{-i t g}.
struct Band {
  MomentumGrid grid{16};
  Dynamics dynamics = Dynamics::Unitary;
  std::string label;
  int winding = 0;
  bool constant = false;
  CVec lambda;
  CVec lambda_prime;
  std::vector<double> phase;
  std::vector<double> g_prime;
  std::vector<double> theta_prime;
  std::vector<DerivativeZero> zeros;
  std::function<double(double)> phase_fn;
  std::function<double(double)> g_prime_fn;

  double phase_at(double k) const { return phase_fn(k); }
  double g_prime_at(double k) const { return g_prime_fn(k); }
  cplx lambda_at(double k) const { return std::polar(1.0, phase_fn(k)); }
  std::size_t zero_count() const noexcept { return zeros.size(); }
  double max_abs_g_prime() const {
    double m = 0.0;
    for (double v : g_prime) m = std::max(m, std::abs(v));
    return m;
  }
};

inline constexpr double kWindingResidualTolerance = 1e-6;
inline constexpr double kTangentialRelativeThreshold = 1e-6;

/// Sum of principal arguments of consecutive ratios, divided by 2 pi.
inline double winding_sum(std::span<const cplx> lambda) {
  const std::size_t n = lambda.size();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx ratio = lambda[(j + 1) % n] / lambda[j];
    const double step = std::arg(ratio);
    if (std::abs(step) >= kPi * (1.0 - 1e-12)) {
      throw Error(ErrorCode::PhaseStepTooLarge,
                  "phase step between neighbouring samples reaches pi at j=" + std::to_string(j));
    }
    total += step;
  }
  return total / kTwoPi;
}

inline int winding_number(std::span<const cplx> lambda) {
  const double w = winding_sum(lambda);
  const double m = std::round(w);
  if (std::abs(w - m) > kWindingResidualTolerance) {
    throw Error(ErrorCode::PhaseStepTooLarge, "winding sum " + std::to_string(w) + " not integral");
  }
  return static_cast<int>(m);
}

namespace detail {

inline void require_unimodular(std::span<const cplx> lambda, double tol) {
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (std::abs(std::abs(lambda[j]) - 1.0) > tol) {
      throw Error(ErrorCode::NotUnimodular, "|lambda| != 1 at sample " + std::to_string(j));
    }
  }
}

inline void push_zero(std::vector<DerivativeZero>& zs, double k, ZeroKind kind) {
  k = wrap_angle(k);
  for (const auto& z : zs) {
    if (circular_distance(z.k, k) < 1e-9) return;
  }
  zs.push_back({k, kind});
}

}  // namespace detail

/// Distinct zeros of g' in [0, 2 pi): sign changes refined by TOMS 748,
/// tangential zeros by Brent minimisation of |g'|.
inline std::vector<DerivativeZero> find_derivative_zeros(const Band& band) {
  std::vector<DerivativeZero> zeros;
  if (band.constant) return zeros;
  const auto& gp = band.g_prime;
  const std::size_t n = gp.size();
  const double h = band.grid.spacing();
  const double gmax = band.max_abs_g_prime();
  const auto& f = band.g_prime_fn;
  auto sample_k = [&](std::size_t j) { return h * static_cast<double>(j); };
  auto at = [&](long j) { return gp[static_cast<std::size_t>((j % static_cast<long>(n) + n) % n)]; };

  for (std::size_t j = 0; j < n; ++j) {
    const double g0 = gp[j];
    const double g1 = gp[(j + 1) % n];
    if (g0 == 0.0) {
      const bool change = at(static_cast<long>(j) - 1) * g1 < 0.0;
      detail::push_zero(zeros, sample_k(j), change ? ZeroKind::SignChange : ZeroKind::Tangential);
      continue;
    }
    if (g0 * g1 < 0.0) {
      const double lo = sample_k(j);
      const double hi = lo + h;
      std::uintmax_t iters = 200;
      auto tol = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        return std::abs(f(mid)) < 1e-12 || std::abs(b - a) < 4e-16 * std::max(1.0, std::abs(mid));
      };
      const double flo = f(lo);
      const double fhi = f(hi);
      double root;
      if (flo == 0.0) {
        root = lo;
      } else if (fhi == 0.0) {
        root = hi;
      } else if (flo * fhi > 0.0) {
        root = std::abs(flo) < std::abs(fhi) ? lo : hi;
      } else {
        auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
        root = std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
      }
      detail::push_zero(zeros, root, ZeroKind::SignChange);
    }
  }

  const double threshold = kTangentialRelativeThreshold * gmax;
  for (std::size_t j = 0; j < n; ++j) {
    const long jj = static_cast<long>(j);
    const double gm = at(jj - 1), g0 = gp[j], gq = at(jj + 1);
    if (g0 == 0.0) continue;
    if (!(gm * g0 > 0.0 && g0 * gq > 0.0)) continue;
    if (!(std::abs(g0) <= std::abs(gm) && std::abs(g0) < std::abs(gq))) continue;
    const double lo = sample_k(j) - h;
    const double hi = sample_k(j) + h;
    auto r = boost::math::tools::brent_find_minima([&](double k) { return std::abs(f(k)); }, lo, hi,
                                                   std::numeric_limits<double>::digits / 2);
    if (r.second < threshold) detail::push_zero(zeros, r.first, ZeroKind::Tangential);
  }

  std::sort(zeros.begin(), zeros.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  for (std::size_t i = 0; zeros.size() > 1 && i < zeros.size(); ++i) {
    if (circular_distance(zeros[i].k, zeros[(i + 1) % zeros.size()].k) < 4.0 * h) {
      throw Error(ErrorCode::GridTooCoarse, "zeros of g' closer than four grid spacings");
    }
  }
  return zeros;
}

/// Builds a band from an analytic lift g of the phase and its derivative g'.
inline Band make_band(const MomentumGrid& grid, Dynamics dynamics, std::function<double(double)> phase,
                      std::function<double(double)> g_prime, std::string label = {}) {
  Band band;
  band.grid = grid;
  band.dynamics = dynamics;
  band.label = std::move(label);
  band.phase_fn = std::move(phase);
  band.g_prime_fn = std::move(g_prime);
  const std::size_t n = grid.size();
  band.lambda.resize(n);
  band.lambda_prime.resize(n);
  band.phase.resize(n);
  band.g_prime.resize(n);
  band.theta_prime.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid.k(j);
    band.phase[j] = band.phase_fn(k);
    band.g_prime[j] = band.g_prime_fn(k);
    band.lambda[j] = std::polar(1.0, band.phase[j]);
    band.lambda_prime[j] = cplx(0.0, band.g_prime[j]) * band.lambda[j];
  }
  band.winding = winding_number(band.lambda);
  for (std::size_t j = 0; j < n; ++j) band.theta_prime[j] = band.g_prime[j] - band.winding;
  band.constant = band.max_abs_g_prime() == 0.0;
  band.zeros = find_derivative_zeros(band);
  return band;
}

/// Band from unimodular samples alone; lambda' by spectral differentiation
/// unless supplied.
inline Band band_from_samples(const MomentumGrid& grid, CVec lambda,
                              std::optional<CVec> lambda_prime = std::nullopt,
                              Dynamics dynamics = Dynamics::Unitary) {
  if (lambda.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "sample count differs from grid");
  detail::require_unimodular(lambda, 1e-8);
  const std::size_t n = grid.size();
  const int m = winding_number(lambda);
  CVec lp;
  if (lambda_prime) {
    lp = std::move(*lambda_prime);
    if (lp.size() != n) throw Error(ErrorCode::GridMismatch, "derivative sample count differs");
  } else {
    lp = detail::spectral_P(lambda);
    for (auto& v : lp) v *= cplx(0.0, 1.0);
  }
  std::vector<double> theta(n), theta_p(n), g_p(n);
  double unwrapped = std::arg(lambda[0]);
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) unwrapped += std::arg(lambda[j] / lambda[j - 1]);
    theta[j] = unwrapped - m * grid.k(j);
    g_p[j] = (cplx(0.0, -1.0) * lp[j] / lambda[j]).real();
    theta_p[j] = g_p[j] - m;
  }
  auto theta_interp = std::make_shared<TrigInterpolant>(CVec(theta.begin(), theta.end()));
  auto theta_p_interp = std::make_shared<TrigInterpolant>(CVec(theta_p.begin(), theta_p.end()));
  Band band;
  band.grid = grid;
  band.dynamics = dynamics;
  band.label = "samples";
  band.winding = m;
  band.lambda = std::move(lambda);
  band.lambda_prime = std::move(lp);
  band.g_prime = std::move(g_p);
  band.theta_prime = std::move(theta_p);
  band.phase.resize(n);
  for (std::size_t j = 0; j < n; ++j) band.phase[j] = m * grid.k(j) + theta[j];
  band.phase_fn = [theta_interp, m](double k) { return m * k + (*theta_interp)(k).real(); };
  band.g_prime_fn = [theta_p_interp, m](double k) { return m + (*theta_p_interp)(k).real(); };
  band.constant = band.max_abs_g_prime() == 0.0;
  band.zeros = find_derivative_zeros(band);
  return band;
}

// Closed-form branches of the coined walk.
inline std::array<Band, 2> coined_bands(const CoinParams& coin, const MomentumGrid& grid) {
  const double alpha = coin.alpha;
  const double delta = coin.delta;
  if (coin.abs_a > 1.0 - kUnitAbsTolerance) {
    return {make_band(grid, Dynamics::Unitary, [alpha](double k) { return k + alpha; },
                      [](double) { return 1.0; }, "coined-1"),
            make_band(grid, Dynamics::Unitary, [alpha, delta](double k) { return -k + delta - alpha; },
                      [](double) { return -1.0; }, "coined-2")};
  }
  if (coin.abs_a < kUnitAbsTolerance) {
    return {make_band(grid, Dynamics::Unitary, [delta](double) { return 0.5 * (kPi + delta); },
                      [](double) { return 0.0; }, "coined-1"),
            make_band(grid, Dynamics::Unitary, [delta](double) { return 0.5 * (-kPi + delta); },
                      [](double) { return 0.0; }, "coined-2")};
  }
  const double abs_a = coin.abs_a;
  std::array<Band, 2> out;
  for (int j = 0; j < 2; ++j) {
    const double s = j == 0 ? 1.0 : -1.0;
    auto phase = [abs_a, alpha, delta, s](double k) {
      const double tau = abs_a * std::cos(k + alpha - 0.5 * delta);
      return 0.5 * delta + s * std::acos(std::clamp(tau, -1.0, 1.0));
    };
    auto g_prime = [abs_a, alpha, delta, s](double k) {
      const double arg = k + alpha - 0.5 * delta;
      const double tau = abs_a * std::cos(arg);
      return s * abs_a * std::sin(arg) / std::sqrt(1.0 - tau * tau);
    };
    out[static_cast<std::size_t>(j)] =
        make_band(grid, Dynamics::Unitary, phase, g_prime, j == 0 ? "coined-1" : "coined-2");
  }
  return out;
}

/// Closed-form eigenvalue branch lambda_1 of the three-step walk.
inline cplx threestep_lambda1(double b, double k) {
  const double b2 = b * b;
  const double c = std::cos(k);
  const double s = std::sin(k);
  const double beta = 1.0 + (8.0 * b2 - 16.0 * b2 * b2) * c * c + 16.0 * b2 * b2 * c * c * c * c;
  return {c * (1.0 - 4.0 * b2 * s * s), s * std::sqrt(beta)};
}

inline double threestep_g_prime1(double b, double k) {
  const double b2 = b * b;
  const double c = std::cos(k);
  const double s = std::sin(k);
  const double beta = 1.0 + (8.0 * b2 - 16.0 * b2 * b2) * c * c + 16.0 * b2 * b2 * c * c * c * c;
  return (1.0 + 8.0 * b2 - 12.0 * b2 * s * s) / std::sqrt(beta);
}

/// Continuous lift of arg lambda_1, increasing by 2 pi per period.
inline double threestep_phase1(double b, double k) {
  const double q = std::floor(k / kTwoPi);
  const double r = k - kTwoPi * q;
  const cplx l = threestep_lambda1(b, r);
  double g = std::atan2(l.imag(), l.real());
  if (r > kPi && g < 0.0) g += kTwoPi;
  return g + kTwoPi * q;
}

inline std::array<Band, 2> threestep_bands(double b, const MomentumGrid& grid) {
  threestep_a(b);
  if (!(b * b < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "closed-form three-step branches need b^2 < 1");
  }
  return {make_band(grid, Dynamics::Unitary, [b](double k) { return threestep_phase1(b, k); },
                    [b](double k) { return threestep_g_prime1(b, k); }, "threestep-1"),
          make_band(grid, Dynamics::Unitary, [b](double k) { return -threestep_phase1(b, k); },
                    [b](double k) { return -threestep_g_prime1(b, k); }, "threestep-2")};
}

/// Branches for any 0 <= b^2 <= 1; b^2 = 1 gives e^{+-3ik}.
inline std::array<Band, 2> threestep_bands_any(double b, const MomentumGrid& grid) {
  threestep_a(b);
  if (b * b < 1.0) return threestep_bands(b, grid);
  return {make_band(grid, Dynamics::Unitary, [](double k) { return 3.0 * k; }, [](double) { return 3.0; },
                    "threestep-1"),
          make_band(grid, Dynamics::Unitary, [](double k) { return -3.0 * k; }, [](double) { return -3.0; },
                    "threestep-2")};
}

/// Energy band g(k) = cos k of the one-dimensional continuous-time walk.
inline Band ctqw_band(const MomentumGrid& grid) {
  return make_band(grid, Dynamics::Hamiltonian, [](double k) { return std::cos(k); },
                   [](double k) { return -std::sin(k); }, "ctqw");
}

/// Band of the bilateral shift (L psi)(x) = psi(x+1): lambda = e^{ik}.
inline Band shift_band(const MomentumGrid& grid) {
  return make_band(grid, Dynamics::Unitary, [](double k) { return k; }, [](double) { return 1.0; }, "shift");
}

// ---------------------------------------------------------------------------
// Eigenvector frames

/// W(k_j) = (v1, v2) with unit eigenvectors of the symbol for (lambda_1, lambda_2).
struct Frame {
  MomentumGrid grid{16};
  std::vector<Mat2> W;

  cplx w11(std::size_t j) const { return W[j](0, 0); }
  cplx w12(std::size_t j) const { return W[j](0, 1); }
  cplx w21(std::size_t j) const { return W[j](1, 0); }
  cplx w22(std::size_t j) const { return W[j](1, 1); }
};

inline constexpr double kDegeneracyTolerance = 1e-10;

namespace detail {

inline Vec2 gauge_fix(Vec2 v) {
  v.normalize();
  const int i = std::abs(v(1)) > std::abs(v(0)) ? 1 : 0;
  const double mod = std::abs(v(i));
  if (mod > 0.0) v *= std::conj(v(i)) / mod;
  return v;
}

inline std::optional<Vec2> null_vector(const Mat2& u, cplx lam) {
  const Mat2 m = u - lam * Mat2::Identity();
  const Vec2 r0(-m(0, 1), m(0, 0));
  const Vec2 r1(-m(1, 1), m(1, 0));
  const Vec2& pick = r0.norm() >= r1.norm() ? r0 : r1;
  if (pick.norm() < kDegeneracyTolerance) return std::nullopt;
  return pick;
}

inline Mat2 frame_at(const Mat2& u, cplx lam1) {
  auto v = null_vector(u, lam1);
  if (!v) throw Error(ErrorCode::DegenerateEigenvalue, "symbol is scalar");
  const Vec2 v1 = gauge_fix(*v);
  const Vec2 v2 = gauge_fix(Vec2(-std::conj(v1(1)), std::conj(v1(0))));
  Mat2 w;
  w.col(0) = v1;
  w.col(1) = v2;
  return w;
}

}  // namespace detail

/// Eigenframe of a sampled symbol. At points where the symbol is scalar the
/// frame is taken from the symbol just to the right of the sample.
inline Frame eigenframe(const std::function<Mat2(double)>& symbol, const std::array<Band, 2>& bands,
                        const MomentumGrid& grid) {
  Frame fr;
  fr.grid = grid;
  fr.W.resize(grid.size());
  const double shift = 1e-4 * grid.spacing();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.k(j);
    const Mat2 u = symbol(k);
    const cplx l1 = bands[0].lambda[j];
    const cplx l2 = bands[1].lambda[j];
    if (std::abs(l1 - l2) < kDegeneracyTolerance) {
      const double scalar_defect = (u - l1 * Mat2::Identity()).cwiseAbs().maxCoeff();
      if (scalar_defect > 1e-8) {
        throw Error(ErrorCode::DegenerateEigenvalue,
                    "coincident eigenvalues at k=" + std::to_string(k) + " on a non-scalar symbol");
      }
      fr.W[j] = detail::frame_at(symbol(k + shift), bands[0].lambda_at(k + shift));
    } else {
      fr.W[j] = detail::frame_at(u, l1);
    }
  }
  return fr;
}

inline Frame eigenframe(const CoinParams& coin, const MomentumGrid& grid) {
  return eigenframe([coin](double k) { return coined_symbol_at(coin, k); }, coined_bands(coin, grid), grid);
}

inline Frame threestep_eigenframe(double b, const MomentumGrid& grid) {
  return eigenframe([b](double k) { return threestep_symbol_at(b, k); }, threestep_bands_any(b, grid), grid);
}

}  // namespace qwtime
