#pragma once

// Energy representation E = g(k) on monotone branches, deficiency vectors of
// branch time operators and the tensor deficiency family on Z^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qwtime/dispersion.hpp"
#include "qwtime/error.hpp"
#include "qwtime/spectral.hpp"
#include "qwtime/time_operator.hpp"

namespace qwtime {

inline constexpr double kEnergyMargin = 0.02;
inline constexpr double kInverseTolerance = 1e-12;

/// Monotone piece of a branch: g restricted to (k_lo, k_hi), with sampled
/// inverse on a uniform energy grid.
struct EnergyBranch {
  double k_lo = 0.0;
  double k_hi = 0.0;
  int sign = 1;          // sign of g' on the interval
  double e_min = 0.0;    // g over the closed interval
  double e_max = 0.0;
  std::vector<double> E;
  std::vector<double> k;  // g^{-1}(E)
  std::vector<double> abs_g_prime;
  double dE = 0.0;
};

/// Inverse of g on a monotone interval by bisection.
inline double inverse_phase(const Band& band, const EnergyBranch& br, double e) {
  double lo = br.k_lo;
  double hi = br.k_hi;
  for (int it = 0; it < 200 && hi - lo > kInverseTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = band.phase_at(mid);
    if ((gm < e) == (br.sign > 0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Source intervals between consecutive zeros of g' (one interval of length
/// 2 pi when g' has no zeros), each sampled on `samples` energies.
inline std::vector<EnergyBranch> energy_branches(const Band& band, std::size_t samples = 2001) {
  if (band.constant) throw Error(ErrorCode::BranchNotMonotone, "constant branch has no energy representation");
  if (samples < 5 || samples % 2 == 0) throw Error(ErrorCode::InvalidParameter, "energy samples must be odd and >= 5");
  std::vector<std::pair<double, double>> intervals;
  const auto& z = band.zeros;
  if (z.empty()) {
    intervals.emplace_back(0.0, kTwoPi);
  } else {
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double lo = z[i].k;
      const double hi = i + 1 < z.size() ? z[i + 1].k : z[0].k + kTwoPi;
      intervals.emplace_back(lo, hi);
    }
  }
  std::vector<EnergyBranch> out;
  for (auto [lo, hi] : intervals) {
    EnergyBranch br;
    br.k_lo = lo;
    br.k_hi = hi;
    const double mid = band.g_prime_at(0.5 * (lo + hi));
    br.sign = mid > 0.0 ? 1 : -1;
    const int probes = 64;
    for (int p = 1; p < probes; ++p) {
      const double kk = lo + (hi - lo) * p / probes;
      if (band.g_prime_at(kk) * br.sign <= 0.0) {
        throw Error(ErrorCode::BranchNotMonotone, "g' changes sign inside a branch interval");
      }
    }
    const double g_lo = band.phase_at(lo);
    const double g_hi = band.phase_at(hi);
    br.e_min = std::min(g_lo, g_hi);
    br.e_max = std::max(g_lo, g_hi);
    const double len = br.e_max - br.e_min;
    const double a = br.e_min + kEnergyMargin * len;
    const double b = br.e_max - kEnergyMargin * len;
    br.dE = (b - a) / static_cast<double>(samples - 1);
    br.E.resize(samples);
    br.k.resize(samples);
    br.abs_g_prime.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      br.E[i] = a + br.dE * static_cast<double>(i);
      br.k[i] = inverse_phase(band, br, br.E[i]);
      br.abs_g_prime[i] = std::abs(band.g_prime_at(br.k[i]));
    }
    out.push_back(std::move(br));
  }
  return out;
}

/// (V f)(E) = f(g^{-1}(E)) / sqrt(2 pi |g'(g^{-1}(E))|) on the branch energy grid.
inline CVec energy_transform(const std::function<cplx(double)>& f, const EnergyBranch& br) {
  CVec out(br.E.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(br.k[i]) / std::sqrt(kTwoPi * br.abs_g_prime[i]);
  return out;
}

inline CVec energy_transform(const Field& f, const EnergyBranch& br) {
  const TrigInterpolant interp(f);
  return energy_transform([&](double k) { return interp(k); }, br);
}

/// Composite Simpson rule for sum |v|^2 dE.
inline double energy_norm_squared(const CVec& v, double dE) {
  const std::size_t n = v.size();
  double acc = std::norm(v.front()) + std::norm(v.back());
  for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * std::norm(v[i]);
  return acc * dE / 3.0;
}

/// |sum_j ||V_j f||^2 - ||f||^2|.
inline double energy_unitarity_defect(const Field& f_in, const Band& band,
                                      const std::vector<EnergyBranch>& branches) {
  const Field f = to_momentum(f_in);
  double total = 0.0;
  for (const auto& br : branches) total += energy_norm_squared(energy_transform(f, br), br.dE);
  return std::abs(total - std::pow(norm(f), 2));
}

/// -i d/dE by fourth-order centred differences on interior samples.
inline CVec energy_derivative(const CVec& v, double dE) {
  const std::size_t n = v.size();
  CVec out(n, cplx{0.0, 0.0});
  const cplx mi(0.0, -1.0);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const cplx d = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * dE);
    out[i] = mi * d;
  }
  return out;
}

/// ||V(Tf) - s(-i d/dE)(Vf)|| / ||V(Tf)|| over interior energies, with s = +1
/// for unitary branches and -1 for Hamiltonian branches.
inline double energy_intertwining_defect(const Field& f_in, const Band& band,
                                         const std::vector<EnergyBranch>& branches) {
  const Field f = to_momentum(f_in);
  const Field tf = apply_T_band(f, band);
  const double s = time_operator_sign(band.dynamics);
  double num = 0.0;
  double den = 0.0;
  for (const auto& br : branches) {
    const CVec vf = energy_transform(f, br);
    const CVec vtf = energy_transform(tf, br);
    const CVec d = energy_derivative(vf, br.dE);
    for (std::size_t i = 2; i + 2 < vf.size(); ++i) {
      num += std::norm(vtf[i] - s * d[i]);
      den += std::norm(vtf[i]);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// Classical differential expression and deficiency vectors

/// Eighth-order centred first derivative.
template <class Fn>
cplx fd8_derivative(Fn&& f, double k, double step) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  cplx acc{0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    const double d = (i + 1) * step;
    acc += c[i] * (cplx(f(k + d)) - cplx(f(k - d)));
  }
  return acc / step;
}

inline constexpr double kClassicalStep = 1e-3;

/// (T psi)(k) = s (1/2)(h P psi + P(h psi))(k) with P = -i d/dk evaluated by
/// finite differences on an analytic psi.
inline cplx classical_T(const Band& band, const std::function<cplx(double)>& psi, double k,
                        double step = kClassicalStep) {
  auto h = [&](double x) { return 1.0 / band.g_prime_at(x); };
  const cplx dpsi = fd8_derivative(psi, k, step);
  const cplx dhpsi = fd8_derivative([&](double x) { return h(x) * psi(x); }, k, step);
  const cplx mi(0.0, -1.0);
  return time_operator_sign(band.dynamics) * 0.5 * mi * (h(k) * dpsi + dhpsi);
}

/// Max over grid points in (lo, hi) of |T psi - ev psi| / |psi|.
inline double eigenfunction_residual(const Band& band, const std::function<cplx(double)>& psi, cplx ev,
                                     double lo, double hi) {
  double worst = 0.0;
  const std::size_t n = band.grid.size();
  for (long q = -1; q <= 1; ++q) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = band.grid.k(j) + kTwoPi * static_cast<double>(q);
      if (!(k > lo && k < hi)) continue;
      const cplx p = psi(k);
      worst = std::max(worst, std::abs(classical_T(band, psi, k) - ev * p) / std::abs(p));
    }
  }
  return worst;
}

/// psi_+- = sqrt|g'| e^{-+ s g}; T psi_+- = +-i psi_+- on each monotone piece.
inline std::function<cplx(double)> deficiency_vector(const Band& band, int sign) {
  const double s = time_operator_sign(band.dynamics);
  return [&band, sign, s](double k) {
    return cplx(std::sqrt(std::abs(band.g_prime_at(k))) * std::exp(-sign * s * band.phase_at(k)));
  };
}

inline constexpr double kDeficiencyInterior = 0.1;

inline double deficiency_vector_residual(const Band& band, const EnergyBranch& br, int sign,
                                         double interior = kDeficiencyInterior) {
  return eigenfunction_residual(band, deficiency_vector(band, sign), cplx(0.0, sign), br.k_lo + interior,
                                br.k_hi - interior);
}

/// sqrt(sin k) e^{eps cos k} on (0, pi): T_1 psi = i eps psi for the cos k branch.
inline std::function<cplx(double)> continuous_deficiency_family(double eps) {
  return [eps](double k) { return cplx(std::sqrt(std::sin(k)) * std::exp(eps * std::cos(k))); };
}

/// Eigen-parameter of the second factor making 2(a1 eps + a2 mu) = 1.
inline double tensor_partner_parameter(double eps, double a1, double a2) {
  require_weights(a1, a2);
  if (a2 == 0.0) throw Error(ErrorCode::InvalidWeights, "second weight must be non-zero");
  return (1.0 - 2.0 * a1 * eps) / (2.0 * a2);
}

/// Max over grid points of (interior, pi - interior)^2 of |(T_2 -+ i) Psi| / |Psi|
/// for Psi = psi_{+-eps} (x) psi_{+-mu}.
inline double tensor_deficiency_residual(const MomentumGrid& grid, double eps, double a1, double a2, int sign,
                                         double interior = kDeficiencyInterior) {
  const double mu = tensor_partner_parameter(eps, a1, a2);
  const Band band = ctqw_band(grid);
  const auto f1 = continuous_deficiency_family(sign * eps);
  const auto f2 = continuous_deficiency_family(sign * mu);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.k(j);
    if (k > interior && k < kPi - interior) idx.push_back(j);
  }
  std::vector<cplx> v1, t1, v2, t2;
  for (std::size_t j : idx) {
    const double k = grid.k(j);
    v1.push_back(f1(k));
    t1.push_back(classical_T(band, f1, k));
    v2.push_back(f2(k));
    t2.push_back(classical_T(band, f2, k));
  }
  const cplx target(0.0, static_cast<double>(sign));
  double worst = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const cplx psi = v1[a] * v2[b];
      const cplx tpsi = 2.0 * (a1 * t1[a] * v2[b] + a2 * v1[a] * t2[b]);
      worst = std::max(worst, std::abs(tpsi - target * psi) / std::abs(psi));
    }
  }
  return worst;
}

}  // namespace qwtime
