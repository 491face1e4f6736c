#pragma once

// Time operators T = s (1/2)(h P + P h), h = 1/g', on dispersion branches,
// their commutation residuals, uncertainties, classification, truncated
// spectra, the two-eigenvalue construction and the tensor operator on Z^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwtime/dispersion.hpp"
#include "qwtime/error.hpp"
#include "qwtime/spectral.hpp"
#include "qwtime/walks.hpp"

namespace qwtime {

inline constexpr double kZeroMargin = 0.05;
inline constexpr double kDomainTolerance = 1e-12;

/// +1 for unitary dynamics, -1 for Hamiltonian dynamics.
inline double time_operator_sign(Dynamics d) noexcept { return d == Dynamics::Unitary ? 1.0 : -1.0; }

/// True where k lies within `margin` of a zero of g'.
inline std::vector<bool> excluded_mask(const Band& band, double margin = kZeroMargin) {
  std::vector<bool> mask(band.grid.size(), false);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    const double k = band.grid.k(j);
    for (const auto& z : band.zeros) {
      if (circular_distance(k, z.k) < margin) {
        mask[j] = true;
        break;
      }
    }
  }
  return mask;
}

inline bool is_admissible(const Field& f, const Band& band, double margin = kZeroMargin) {
  const Field m = to_momentum(f);
  const auto mask = excluded_mask(band, margin);
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] && std::abs(m[j]) >= kDomainTolerance) return false;
  }
  return true;
}

inline void require_admissible(const Field& f, const Band& band, double margin = kZeroMargin) {
  if (band.constant) {
    throw Error(ErrorCode::NoStrongTimeOperator, "constant branch carries no strong time operator");
  }
  const auto mask = excluded_mask(band, margin);
  if (std::all_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
    throw Error(ErrorCode::NoZeroFreeDomain, "zeros of g' leave no admissible support");
  }
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j] && std::abs(f[j]) >= kDomainTolerance) {
      throw Error(ErrorCode::DomainViolation,
                  "state has mass within the exclusion margin at k=" + std::to_string(band.grid.k(j)));
    }
  }
}

/// T f on one branch. Unitary: +(1/2)(hP + Ph); Hamiltonian: -(1/2)(hP + Ph).
inline Field apply_T_band(const Field& f_in, const Band& band) {
  const Field f = to_momentum(f_in);
  if (!(f.grid() == band.grid)) throw Error(ErrorCode::GridMismatch, "field and band grids differ");
  require_admissible(f, band);
  const auto mask = excluded_mask(band);
  const std::size_t n = f.size();
  CVec hf(n);
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    h[j] = mask[j] ? 0.0 : 1.0 / band.g_prime[j];
    hf[j] = h[j] * f[j];
  }
  const CVec pf = detail::spectral_P(f.values());
  const CVec phf = detail::spectral_P(hf);
  const double s = 0.5 * time_operator_sign(band.dynamics);
  Field out(f.grid(), Representation::Momentum);
  for (std::size_t j = 0; j < n; ++j) out[j] = mask[j] ? cplx{0.0, 0.0} : s * (h[j] * pf[j] + phf[j]);
  return f_in.rep() == Representation::Momentum ? out : fourier_inverse(out);
}

/// T = W diag(T_1, T_2) W^{-1} on momentum spinors.
inline SpinorField apply_T_full(const SpinorField& psi, const Frame& frame, const std::array<Band, 2>& bands) {
  const SpinorField m = to_momentum(psi);
  const auto comps = band_components(frame, m);
  SpinorField out = from_band_components(frame, apply_T_band(comps[0], bands[0]), apply_T_band(comps[1], bands[1]));
  return psi.rep() == Representation::Momentum ? out : fourier_inverse(out);
}

inline SpinorField apply_T_full(const SpinorField& psi, const DiscreteWalk& walk) {
  return apply_T_full(psi, walk.frame, walk.bands);
}

// ---------------------------------------------------------------------------
// Commutation residuals

/// Multiplies a momentum field by the propagator symbol of the branch at time t
/// (lambda^t for unitary bands, e^{-itg} for Hamiltonian bands).
inline Field propagate(const Field& f_in, const Band& band, double t) {
  Field f = to_momentum(f_in);
  const double s = band.dynamics == Dynamics::Unitary ? t : -t;
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::polar(1.0, s * band.phase[j]);
  return f;
}

/// ||U* T U f - T f - f|| / ||f||.
inline double commutation_residual_unitary(const Field& f, const Band& band) {
  if (band.dynamics != Dynamics::Unitary) {
    throw Error(ErrorCode::InvalidParameter, "unitary residual needs a unitary branch");
  }
  const Field m = to_momentum(f);
  const Field tf = apply_T_band(m, band);
  const Field tuf = apply_T_band(propagate(m, band, 1.0), band);
  Field r = propagate(tuf, band, -1.0) - tf - m;
  return norm(r) / norm(m);
}

inline double commutation_residual_unitary(const SpinorField& psi, const DiscreteWalk& walk) {
  const SpinorField m = to_momentum(psi);
  const SpinorField tpsi = apply_T_full(m, walk);
  const SpinorField tupsi = apply_T_full(apply_symbol(walk, m), walk);
  SpinorField r = apply_symbol_adjoint(walk, tupsi) - tpsi - m;
  return norm(r) / norm(m);
}

/// ||e^{itH} T e^{-itH} f - T f - t f|| / ||f|| for a Hamiltonian branch.
inline double commutation_residual_sa(const Field& f, const Band& band, double t) {
  if (band.dynamics != Dynamics::Hamiltonian) {
    throw Error(ErrorCode::InvalidParameter, "self-adjoint residual needs a Hamiltonian branch");
  }
  const Field m = to_momentum(f);
  const Field tf = apply_T_band(m, band);
  const Field conj = propagate(apply_T_band(propagate(m, band, t), band), band, -t);
  Field r = conj - tf - cplx(t) * m;
  return norm(r) / norm(m);
}

// ---------------------------------------------------------------------------
// Uncertainty

inline constexpr double kNormalizationTolerance = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-8;

inline double uncertainty(const Field& f_in, const Band& band) {
  const Field f = to_momentum(f_in);
  if (std::abs(norm(f) - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::NotNormalized, "uncertainty needs a unit vector");
  }
  const Field tf = apply_T_band(f, band);
  const cplx mean = inner(f, tf);
  if (std::abs(mean.imag()) > kSymmetryTolerance) {
    throw Error(ErrorCode::NotSymmetric, "<f, T f> has imaginary part " + std::to_string(mean.imag()));
  }
  return norm(tf - cplx(mean.real()) * f);
}

// ---------------------------------------------------------------------------
// Classification

enum class SpectrumKind { IntegersScaled, ComplexPlane, TwoPoint };

struct TimeOpClassification {
  std::size_t zero_count = 0;
  std::size_t d_plus = 0;
  std::size_t d_minus = 0;
  SpectrumKind spectrum = SpectrumKind::ComplexPlane;
  int denominator = 1;
  bool self_adjoint = false;
  int winding = 0;
  std::string note;
};

/// "Z", "Z/3", "C" or "two-point".
inline std::string spectrum_string(const TimeOpClassification& c) {
  switch (c.spectrum) {
    case SpectrumKind::ComplexPlane: return "C";
    case SpectrumKind::TwoPoint: return "two-point";
    case SpectrumKind::IntegersScaled:
      return c.denominator == 1 ? "Z" : "Z/" + std::to_string(c.denominator);
  }
  return "C";
}

inline constexpr const char* kNoStrongTimeOperatorNote =
    "bounded self-adjoint time operator exists, no strong time operator";

inline TimeOpClassification classify(const Band& band) {
  TimeOpClassification c;
  c.winding = band.winding;
  if (band.constant) {
    c.spectrum = SpectrumKind::TwoPoint;
    c.note = kNoStrongTimeOperatorNote;
    return c;
  }
  c.zero_count = band.zero_count();
  if (c.zero_count > 0) {
    c.d_plus = c.d_minus = c.zero_count;
    c.spectrum = SpectrumKind::ComplexPlane;
    return c;
  }
  if (band.winding == 0) {
    throw Error(ErrorCode::InvalidParameter, "zero-free branch with vanishing winding");
  }
  c.self_adjoint = true;
  c.spectrum = SpectrumKind::IntegersScaled;
  c.denominator = std::abs(band.winding);
  return c;
}

struct WalkClassification {
  std::array<TimeOpClassification, 2> bands;
  std::size_t d_plus = 0;
  std::size_t d_minus = 0;
  bool self_adjoint = false;
  std::string spectrum;
  std::string note;
};

/// T = W diag(T_1, T_2) W^{-1}: deficiency indices add over the two branches.
inline WalkClassification classify(const std::array<Band, 2>& bands) {
  WalkClassification w;
  w.bands = {classify(bands[0]), classify(bands[1])};
  const auto& a = w.bands[0];
  const auto& b = w.bands[1];
  w.d_plus = a.d_plus + b.d_plus;
  w.d_minus = a.d_minus + b.d_minus;
  if (a.spectrum == SpectrumKind::TwoPoint || b.spectrum == SpectrumKind::TwoPoint) {
    w.spectrum = "two-point";
    w.note = kNoStrongTimeOperatorNote;
  } else if (a.spectrum == SpectrumKind::ComplexPlane || b.spectrum == SpectrumKind::ComplexPlane) {
    w.spectrum = "C";
  } else {
    w.self_adjoint = true;
    w.spectrum = a.denominator == b.denominator ? spectrum_string(a)
                                                : spectrum_string(a) + " u " + spectrum_string(b);
  }
  return w;
}

/// Largest angular gap between sampled values of lambda on the unit circle.
inline double coverage_gap(const std::vector<const Band*>& bands) {
  std::vector<double> angles;
  for (const Band* b : bands) {
    for (const auto& z : b->lambda) {
      double a = std::arg(z);
      if (a < 0.0) a += kTwoPi;
      angles.push_back(a);
    }
  }
  if (angles.empty()) return kTwoPi;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + kTwoPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap;
}

inline double coverage_gap(const Band& band) { return coverage_gap(std::vector<const Band*>{&band}); }

/// 2 max|g'| (2 pi / n): the gap allowed for a band whose symbol covers the circle.
inline double coverage_gap_limit(const Band& band) { return 2.0 * band.max_abs_g_prime() * band.grid.spacing(); }

// ---------------------------------------------------------------------------
// Truncated spectra of self-adjoint time operators

struct TruncatedSpectrum {
  int cutoff = 0;
  std::vector<double> eigenvalues;
  std::vector<double> lattice_distance;  // distance to (1/|m|) Z
};

/// Matrix <e^{ipk}, T e^{iqk}> = ((p+q)/2) h_{p-q}, |p|,|q| <= M, with h_r the
/// quadrature Fourier coefficients of 1/g'.
inline Eigen::MatrixXcd time_operator_matrix(const Band& band, int cutoff) {
  const std::size_t n = band.grid.size();
  if (4 * static_cast<std::size_t>(cutoff) >= n) {
    throw Error(ErrorCode::GridTooCoarse, "mode cutoff needs 4M < n");
  }
  CVec h(n);
  for (std::size_t j = 0; j < n; ++j) h[j] = 1.0 / band.g_prime[j];
  const CVec c = detail::fft_forward(h);
  auto coeff = [&](long r) {
    const std::size_t idx = static_cast<std::size_t>((r % static_cast<long>(n) + static_cast<long>(n)) %
                                                     static_cast<long>(n));
    return c[idx] / static_cast<double>(n);
  };
  const int dim = 2 * cutoff + 1;
  const double s = time_operator_sign(band.dynamics);
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const long p = i - cutoff;
      const long q = j - cutoff;
      a(i, j) = s * 0.5 * static_cast<double>(p + q) * coeff(p - q);
    }
  }
  return a;
}

inline TruncatedSpectrum truncated_spectrum(const Band& band, int cutoff) {
  const Eigen::MatrixXcd a = time_operator_matrix(band, cutoff);
  const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  TruncatedSpectrum out;
  out.cutoff = cutoff;
  const double m = std::abs(band.winding);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    out.eigenvalues.push_back(e);
    out.lattice_distance.push_back(std::abs(e * m - std::round(e * m)) / m);
  }
  return out;
}

struct SpectrumStudy {
  TruncatedSpectrum coarse;
  TruncatedSpectrum fine;
  std::vector<double> window_eigenvalues;  // coarse eigenvalues whose nearest lattice point is inside the window
  std::vector<double> coarse_distance;
  std::vector<double> fine_distance;       // fine eigenvalue nearest to each coarse one
  std::size_t within_tolerance = 0;
  bool converged = false;
};

inline constexpr double kConvergenceFloor = 1e-10;

/// Eigenvalues near lattice points in [-window, window] at cutoffs M and 2M; converged when every
/// matched distance to the lattice does not grow under refinement.
inline SpectrumStudy self_adjoint_spectrum_check(const Band& band, int cutoff, double window = 10.0,
                                                 double tolerance = 0.05) {
  if (band.constant || band.winding == 0 || band.zero_count() > 0) {
    throw Error(ErrorCode::NotSelfAdjointCase, "truncated spectrum needs m != 0 and no zeros of g'");
  }
  SpectrumStudy s;
  s.coarse = truncated_spectrum(band, cutoff);
  s.fine = truncated_spectrum(band, 2 * cutoff);
  const double m = std::abs(band.winding);
  s.converged = true;
  for (std::size_t i = 0; i < s.coarse.eigenvalues.size(); ++i) {
    const double e = s.coarse.eigenvalues[i];
    const double target = std::round(e * m) / m;
    if (std::abs(target) > window) continue;
    double best = 1e300;
    for (double f : s.fine.eigenvalues) best = std::min(best, std::abs(f - target));
    const double d = s.coarse.lattice_distance[i];
    s.window_eigenvalues.push_back(e);
    s.coarse_distance.push_back(d);
    s.fine_distance.push_back(best);
    if (d <= tolerance) ++s.within_tolerance;
    if (!(best <= d || (best < kConvergenceFloor && d < kConvergenceFloor))) s.converged = false;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Time operator of a unitary with two distinct eigenvalues

struct TwoEigenvalueOperator {
  cplx lambda;
  cplx mu;
  Mat2 T;  // basis (xi, eta)
  Mat2 U;
  double commutator_residual = 0.0;  // ||[T,U](xi + i eta) - U(xi + i eta)||
  double hermiticity_defect = 0.0;   // max |T - T*|
};

inline TwoEigenvalueOperator two_eigenvalue_time_operator(cplx lambda, cplx mu) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12 || std::abs(std::abs(mu) - 1.0) > 1e-12) {
    throw Error(ErrorCode::NotUnimodular, "eigenvalues must be unimodular");
  }
  if (std::abs(lambda - mu) < 1e-12) {
    throw Error(ErrorCode::EigenvaluesCoincide, "the two eigenvalues coincide");
  }
  TwoEigenvalueOperator op;
  op.lambda = lambda;
  op.mu = mu;
  const cplx i(0.0, 1.0);
  op.T << 0.0, i * lambda / (lambda - mu), i * mu / (lambda - mu), 0.0;
  op.U << lambda, 0.0, 0.0, mu;
  const Vec2 v(1.0, i);
  const Vec2 lhs = op.T * (op.U * v) - op.U * (op.T * v);
  op.commutator_residual = (lhs - op.U * v).norm();
  op.hermiticity_defect = (op.T - op.T.adjoint()).cwiseAbs().maxCoeff();
  return op;
}

// ---------------------------------------------------------------------------
// Tensor time operator on Z^2

inline void require_weights(double a1, double a2) {
  if (std::abs(a1 + a2 - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidWeights, "weights must sum to one");
  }
}

/// Applies a one-dimensional branch operator along axis 0 (rows) or 1 (columns).
inline TorusField apply_T_axis(const TorusField& psi, const Band& band, int axis) {
  const std::size_t n = psi.side();
  TorusField out(psi.grid(), Representation::Momentum);
  Field line(psi.grid(), Representation::Momentum);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) line[b] = axis == 0 ? psi(b, a) : psi(a, b);
    const Field t = apply_T_band(line, band);
    for (std::size_t b = 0; b < n; ++b) (axis == 0 ? out(b, a) : out(a, b)) = t[b];
  }
  return out;
}

/// T_2 = 2(a1 T_1 (x) 1 + a2 1 (x) T_1) with T_1 the time operator of cos k.
inline TorusField tensor_time_apply(const TorusField& psi_in, double a1, double a2) {
  require_weights(a1, a2);
  const TorusField psi = to_momentum(psi_in);
  const Band band = ctqw_band(psi.grid());
  TorusField out(psi.grid(), Representation::Momentum);
  if (a1 != 0.0) out += cplx(2.0 * a1) * apply_T_axis(psi, band, 0);
  if (a2 != 0.0) out += cplx(2.0 * a2) * apply_T_axis(psi, band, 1);
  return out;
}

/// ||e^{itH_2} T_2 e^{-itH_2} Psi - T_2 Psi - t Psi|| / ||Psi||.
inline double tensor_commutation_residual(const TorusField& psi_in, double a1, double a2, double t) {
  const TorusField psi = to_momentum(psi_in);
  const TorusField tpsi = tensor_time_apply(psi, a1, a2);
  const TorusField evolved = ctqw_evolve(psi, t, Seam::Periodic);
  const TorusField back = ctqw_evolve(tensor_time_apply(evolved, a1, a2), -t, Seam::Periodic);
  TorusField r = back - tpsi - cplx(t) * psi;
  return norm(r) / norm(psi);
}

}  // namespace qwtime
