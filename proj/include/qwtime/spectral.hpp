#pragma once

// Momentum grids, fields on the ring Z_n and its dual circle, the discrete
// Fourier pair, spectral differentiation and the quadrature inner product.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qwtime/error.hpp"

namespace qwtime {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Sites closer than this to the ring seam must stay (numerically) empty.
inline constexpr long kSeamWidth = 10;
inline constexpr double kSeamTolerance = 1e-10;

/// Uniform grid k_j = 2*pi*j/n on [0, 2*pi). The same n labels the position
/// ring, whose sites are x = j - n/2, i.e. x in {-n/2, ..., n/2 - 1}.
class MomentumGrid {
 public:
  explicit MomentumGrid(std::size_t n) : n_(n) {
    if (n < 16 || n % 2 != 0) {
      throw Error(ErrorCode::InvalidGridSize,
                  "grid size must be even and >= 16, got " + std::to_string(n));
    }
  }

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return kTwoPi / static_cast<double>(n_); }
  double k(std::size_t j) const noexcept {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(n_);
  }
  std::vector<double> points() const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = k(j);
    return out;
  }

  long site(std::size_t j) const noexcept {
    return static_cast<long>(j) - static_cast<long>(n_ / 2);
  }
  /// Storage index of lattice site x, wrapping around the ring.
  std::size_t index_of_site(long x) const noexcept {
    const long n = static_cast<long>(n_);
    long j = (x + n / 2) % n;
    if (j < 0) j += n;
    return static_cast<std::size_t>(j);
  }

  friend bool operator==(const MomentumGrid&, const MomentumGrid&) = default;

 private:
  std::size_t n_;
};

inline MomentumGrid make_grid(std::size_t n) { return MomentumGrid(n); }

enum class Representation { Momentum, Position };

constexpr std::string_view to_string(Representation rep) {
  return rep == Representation::Momentum ? "momentum" : "position";
}

/// Samples of a one-component function either on the momentum grid or on the
/// position ring.
class Field {
 public:
  Field(MomentumGrid grid, Representation rep, CVec values)
      : grid_(grid), rep_(rep), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw Error(ErrorCode::GridMismatch, "field has " + std::to_string(values_.size()) +
                                               " values for a grid of size " +
                                               std::to_string(grid_.size()));
    }
  }
  Field(MomentumGrid grid, Representation rep)
      : Field(grid, rep, CVec(grid.size(), cplx{0.0, 0.0})) {}

  static Field momentum(MomentumGrid grid, CVec values) {
    return Field(grid, Representation::Momentum, std::move(values));
  }
  static Field position(MomentumGrid grid, CVec values) {
    return Field(grid, Representation::Position, std::move(values));
  }
  /// Momentum field with values fn(k_j).
  template <class Fn>
  static Field sample(MomentumGrid grid, Fn&& fn) {
    CVec v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = cplx(fn(grid.k(j)));
    return momentum(grid, std::move(v));
  }
  static Field delta(MomentumGrid grid, long site) {
    Field f(grid, Representation::Position);
    f.values_[grid.index_of_site(site)] = 1.0;
    return f;
  }

  const MomentumGrid& grid() const noexcept { return grid_; }
  Representation rep() const noexcept { return rep_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator[](std::size_t j) const noexcept { return values_[j]; }
  cplx& operator[](std::size_t j) noexcept { return values_[j]; }
  cplx at_site(long x) const noexcept { return values_[grid_.index_of_site(x)]; }
  cplx& at_site(long x) noexcept { return values_[grid_.index_of_site(x)]; }

  Field& operator+=(const Field& o) {
    require_compatible(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_compatible(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  Field& operator*=(cplx s) noexcept {
    for (auto& v : values_) v *= s;
    return *this;
  }

  void require_compatible(const Field& o) const {
    if (!(grid_ == o.grid_)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
    if (rep_ != o.rep_) {
      throw Error(ErrorCode::RepresentationMismatch, "fields carry different representations");
    }
  }

 private:
  MomentumGrid grid_;
  Representation rep_;
  CVec values_;
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(cplx s, Field a) { return a *= s; }

/// Element of l2(Z; C^2) = l2(Z) + l2(Z), or of its momentum image.
struct SpinorField {
  Field upper;
  Field lower;

  SpinorField(Field up, Field low) : upper(std::move(up)), lower(std::move(low)) {
    upper.require_compatible(lower);
  }
  SpinorField(MomentumGrid grid, Representation rep) : upper(grid, rep), lower(grid, rep) {}

  const MomentumGrid& grid() const noexcept { return upper.grid(); }
  Representation rep() const noexcept { return upper.rep(); }

  SpinorField& operator+=(const SpinorField& o) {
    upper += o.upper;
    lower += o.lower;
    return *this;
  }
  SpinorField& operator-=(const SpinorField& o) {
    upper -= o.upper;
    lower -= o.lower;
    return *this;
  }
  SpinorField& operator*=(cplx s) noexcept {
    upper *= s;
    lower *= s;
    return *this;
  }
};

inline SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
inline SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
inline SpinorField operator*(cplx s, SpinorField a) { return a *= s; }

/// Function on the n x n torus (position) or on [0,2pi)^2 (momentum), stored
/// row-major: index r*n + c, where r runs along the first axis.
class TorusField {
 public:
  TorusField(MomentumGrid grid, Representation rep, CVec values)
      : grid_(grid), rep_(rep), values_(std::move(values)) {
    if (values_.size() != grid_.size() * grid_.size()) {
      throw Error(ErrorCode::GridMismatch, "torus field needs n*n values");
    }
  }
  TorusField(MomentumGrid grid, Representation rep)
      : TorusField(grid, rep, CVec(grid.size() * grid.size(), cplx{0.0, 0.0})) {}

  template <class Fn>
  static TorusField sample(MomentumGrid grid, Fn&& fn) {
    const std::size_t n = grid.size();
    CVec v(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) v[r * n + c] = cplx(fn(grid.k(r), grid.k(c)));
    return TorusField(grid, Representation::Momentum, std::move(v));
  }

  const MomentumGrid& grid() const noexcept { return grid_; }
  Representation rep() const noexcept { return rep_; }
  std::size_t side() const noexcept { return grid_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * side() + c]; }
  cplx& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * side() + c]; }

  TorusField& operator+=(const TorusField& o) {
    require_compatible(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  TorusField& operator-=(const TorusField& o) {
    require_compatible(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  TorusField& operator*=(cplx s) noexcept {
    for (auto& v : values_) v *= s;
    return *this;
  }
  void require_compatible(const TorusField& o) const {
    if (!(grid_ == o.grid_)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
    if (rep_ != o.rep_) {
      throw Error(ErrorCode::RepresentationMismatch, "fields carry different representations");
    }
  }

 private:
  MomentumGrid grid_;
  Representation rep_;
  CVec values_;
};

inline TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
inline TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
inline TorusField operator*(cplx s, TorusField a) { return a *= s; }

namespace detail {

inline CVec fft_forward(std::span<const cplx> in) {
  Eigen::FFT<double> fft;
  CVec src(in.begin(), in.end());
  CVec out;
  fft.fwd(out, src);
  return out;
}

/// Inverse DFT including the 1/n factor.
inline CVec fft_inverse(std::span<const cplx> in) {
  Eigen::FFT<double> fft;
  CVec src(in.begin(), in.end());
  CVec out;
  fft.inv(out, src);
  return out;
}

/// Signed Fourier mode carried by DFT bin j; the unmatched Nyquist bin is
/// reported as -n/2.
inline long signed_mode(std::size_t j, std::size_t n) noexcept {
  const long jj = static_cast<long>(j);
  const long nn = static_cast<long>(n);
  return jj < nn / 2 ? jj : jj - nn;
}

inline double alternating_sign(std::size_t j) noexcept { return (j % 2 == 0) ? 1.0 : -1.0; }

/// (P f)(k_j) for periodic samples f(k_j): multiply mode e^{imk} by m, Nyquist by 0.
inline CVec spectral_P(std::span<const cplx> f) {
  const std::size_t n = f.size();
  CVec c = fft_forward(f);
  for (std::size_t j = 0; j < n; ++j) {
    const long m = signed_mode(j, n);
    c[j] *= (m == -static_cast<long>(n / 2)) ? 0.0 : static_cast<double>(m);
  }
  return fft_inverse(c);
}

inline CVec lattice_to_momentum(std::span<const cplx> psi) {
  CVec out = fft_forward(psi);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= alternating_sign(j);
  return out;
}

inline CVec momentum_to_lattice(std::span<const cplx> f) {
  CVec tmp(f.begin(), f.end());
  for (std::size_t j = 0; j < tmp.size(); ++j) tmp[j] *= alternating_sign(j);
  return fft_inverse(tmp);
}

template <class Transform>
void transform_torus(std::span<cplx> data, std::size_t n, Transform&& transform) {
  CVec line(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) line[c] = data[r * n + c];
    CVec out = transform(std::span<const cplx>(line));
    for (std::size_t c = 0; c < n; ++c) data[r * n + c] = out[c];
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) line[r] = data[r * n + c];
    CVec out = transform(std::span<const cplx>(line));
    for (std::size_t r = 0; r < n; ++r) data[r * n + c] = out[r];
  }
}

}  // namespace detail

/// (F psi)(k_j) = sum_x psi(x) e^{-i k_j x}.
inline Field fourier_forward(const Field& psi) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "fourier_forward expects a position field");
  }
  return Field::momentum(psi.grid(), detail::lattice_to_momentum(psi.values()));
}

inline Field fourier_inverse(const Field& f) {
  if (f.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "fourier_inverse expects a momentum field");
  }
  return Field::position(f.grid(), detail::momentum_to_lattice(f.values()));
}

inline SpinorField fourier_forward(const SpinorField& psi) {
  return {fourier_forward(psi.upper), fourier_forward(psi.lower)};
}
inline SpinorField fourier_inverse(const SpinorField& f) {
  return {fourier_inverse(f.upper), fourier_inverse(f.lower)};
}

inline TorusField fourier_forward(const TorusField& psi) {
  if (psi.rep() != Representation::Position) {
    throw Error(ErrorCode::RepresentationMismatch, "fourier_forward expects a position field");
  }
  TorusField out(psi.grid(), Representation::Momentum,
                 CVec(psi.values().begin(), psi.values().end()));
  detail::transform_torus(out.values(), psi.side(),
                          [](std::span<const cplx> v) { return detail::lattice_to_momentum(v); });
  return out;
}

inline TorusField fourier_inverse(const TorusField& f) {
  if (f.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "fourier_inverse expects a momentum field");
  }
  TorusField out(f.grid(), Representation::Position, CVec(f.values().begin(), f.values().end()));
  detail::transform_torus(out.values(), f.side(),
                          [](std::span<const cplx> v) { return detail::momentum_to_lattice(v); });
  return out;
}

inline Field to_momentum(const Field& f) {
  return f.rep() == Representation::Momentum ? f : fourier_forward(f);
}
inline Field to_position(const Field& f) {
  return f.rep() == Representation::Position ? f : fourier_inverse(f);
}
inline SpinorField to_momentum(const SpinorField& f) {
  return f.rep() == Representation::Momentum ? f : fourier_forward(f);
}
inline SpinorField to_position(const SpinorField& f) {
  return f.rep() == Representation::Position ? f : fourier_inverse(f);
}
inline TorusField to_momentum(const TorusField& f) {
  return f.rep() == Representation::Momentum ? f : fourier_forward(f);
}
inline TorusField to_position(const TorusField& f) {
  return f.rep() == Representation::Position ? f : fourier_inverse(f);
}

/// P f = -i f' by spectral differentiation.
inline Field apply_P(const Field& f) {
  if (f.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "apply_P expects a momentum field");
  }
  return Field::momentum(f.grid(), detail::spectral_P(f.values()));
}

/// Conjugate-linear in f. Momentum fields use the (1/n) sum matching dk/2pi.
inline cplx inner(const Field& f, const Field& g) {
  f.require_compatible(g);
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < f.size(); ++j) acc += std::conj(f[j]) * g[j];
  if (f.rep() == Representation::Momentum) acc /= static_cast<double>(f.size());
  return acc;
}

inline cplx inner(const SpinorField& f, const SpinorField& g) {
  return inner(f.upper, g.upper) + inner(f.lower, g.lower);
}

inline cplx inner(const TorusField& f, const TorusField& g) {
  f.require_compatible(g);
  cplx acc{0.0, 0.0};
  for (std::size_t j = 0; j < f.values().size(); ++j) acc += std::conj(f.values()[j]) * g.values()[j];
  if (f.rep() == Representation::Momentum) acc /= static_cast<double>(f.values().size());
  return acc;
}

inline double norm(const Field& f) { return std::sqrt(inner(f, f).real()); }
inline double norm(const SpinorField& f) { return std::sqrt(inner(f, f).real()); }
inline double norm(const TorusField& f) { return std::sqrt(inner(f, f).real()); }

/// Pointwise product with a sampled symbol.
inline Field multiply(const Field& f, std::span<const cplx> symbol) {
  if (f.rep() != Representation::Momentum) {
    throw Error(ErrorCode::RepresentationMismatch, "multiply expects a momentum field");
  }
  if (symbol.size() != f.size()) {
    throw Error(ErrorCode::GridMismatch, "symbol and field sample counts differ");
  }
  Field out = f;
  for (std::size_t j = 0; j < f.size(); ++j) out[j] *= symbol[j];
  return out;
}

inline Field multiply(const Field& f, std::span<const double> symbol) {
  CVec s(symbol.begin(), symbol.end());
  return multiply(f, std::span<const cplx>(s));
}

// ---------------------------------------------------------------------------
// Ring-seam bookkeeping.

inline double seam_mass(const Field& f) {
  const Field psi = to_position(f);
  const std::size_t n = psi.size();
  const auto w = static_cast<std::size_t>(kSeamWidth);
  double mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j < w || j >= n - w) mass += std::norm(psi[j]);
  }
  return mass;
}

inline double seam_mass(const SpinorField& f) { return seam_mass(f.upper) + seam_mass(f.lower); }

inline double seam_mass(const TorusField& f) {
  const TorusField psi = to_position(f);
  const std::size_t n = psi.side();
  const auto w = static_cast<std::size_t>(kSeamWidth);
  double mass = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const bool edge_r = r < w || r >= n - w;
    for (std::size_t c = 0; c < n; ++c) {
      if (edge_r || c < w || c >= n - w) mass += std::norm(psi(r, c));
    }
  }
  return mass;
}

/// Selects whether an operator enforces the ring-seam rule. Periodic treats
/// the ring as a genuine torus (plane waves, constant states).
enum class Seam { Enforce, Periodic };

template <class AnyField>
void require_support_margin(const AnyField& f, Seam seam = Seam::Enforce) {
  if (seam == Seam::Periodic) return;
  const double mass = seam_mass(f);
  if (mass > kSeamTolerance) {
    throw Error(ErrorCode::SupportMarginViolated,
                "mass " + std::to_string(mass) + " within " + std::to_string(kSeamWidth) +
                    " sites of the ring seam");
  }
}

// ---------------------------------------------------------------------------
// Off-grid evaluation and test functions.

/// Distance between two angles on the circle.
inline double circular_distance(double a, double b) noexcept {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return d > kPi ? kTwoPi - d : d;
}

/// Trigonometric interpolant through momentum samples (exact for fields
/// band-limited below the Nyquist mode).
class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const cplx> samples) : n_(samples.size()) {
    coeffs_ = detail::fft_forward(samples);
    for (auto& c : coeffs_) c /= static_cast<double>(n_);
  }
  explicit TrigInterpolant(const Field& f) : TrigInterpolant(to_momentum(f).values()) {}

  cplx operator()(double k) const {
    const std::size_t half = n_ / 2;
    const cplx w = std::polar(1.0, k);
    cplx acc = coeffs_[0];
    cplx z{1.0, 0.0};
    for (std::size_t m = 1; m < half; ++m) {
      z *= w;
      if (m % 64 == 0) z = std::polar(1.0, static_cast<double>(m) * k);
      acc += coeffs_[m] * z + coeffs_[n_ - m] * std::conj(z);
    }
    acc += coeffs_[half] * std::cos(static_cast<double>(half) * k);
    return acc;
  }

 private:
  std::size_t n_;
  CVec coeffs_;
};

/// Smooth bump exp(-a s^2/(1-s^2)) on the arc (lo, hi), s in (-1,1), zero
/// elsewhere. The arc may wrap (lo < 0 or hi > 2pi); width must be < 2pi.
inline double bump_value(double k, double lo, double hi, double sharpness = 8.0) {
  const double width = hi - lo;
  double shifted = std::fmod(k - lo, kTwoPi);
  if (shifted < 0.0) shifted += kTwoPi;
  if (shifted <= 0.0 || shifted >= width) return 0.0;
  const double s = 2.0 * shifted / width - 1.0;
  const double denom = 1.0 - s * s;
  return std::exp(-sharpness * s * s / denom);
}

inline Field smooth_bump(const MomentumGrid& grid, double lo, double hi, double sharpness = 8.0) {
  if (!(hi > lo) || hi - lo >= kTwoPi) {
    throw Error(ErrorCode::InvalidParameter, "bump arc must satisfy lo < hi < lo + 2pi");
  }
  return Field::sample(grid, [&](double k) { return bump_value(k, lo, hi, sharpness); });
}

inline Field normalized(Field f) {
  const double nrm = norm(f);
  if (nrm > 0.0) f *= 1.0 / nrm;
  return f;
}
inline SpinorField normalized(SpinorField f) {
  const double nrm = norm(f);
  if (nrm > 0.0) f *= 1.0 / nrm;
  return f;
}
inline TorusField normalized(TorusField f) {
  const double nrm = norm(f);
  if (nrm > 0.0) f *= 1.0 / nrm;
  return f;
}

}  // namespace qwtime
