#pragma once

// Independent reference computations and seeded generators used by the tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qwtime/spectral.hpp"

namespace oracle {

using qwtime::cplx;
using qwtime::CVec;

inline constexpr double kPi = 3.14159265358979323846;

/// (F psi)(k_j) = sum_x psi(x) e^{-i k_j x}, x = i - n/2, by the O(n^2) sum.
inline CVec direct_dft(const CVec& psi) {
  const std::size_t n = psi.size();
  CVec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) - static_cast<double>(n / 2);
      acc += psi[i] * std::polar(1.0, -k * x);
    }
    out[j] = acc;
  }
  return out;
}

inline CVec direct_idft(const CVec& f) {
  const std::size_t n = f.size();
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(n / 2);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double k = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
      acc += f[j] * std::polar(1.0, k * x);
    }
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

/// Periodic fourth-order centred difference on the grid.
inline CVec fd4_periodic(const CVec& f, double h) {
  const std::size_t n = f.size();
  CVec out(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto at = [&](long o) { return f[(j + n + o) % n]; };
    out[j] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
  }
  return out;
}

/// Classical RK4 for d psi/dt = -i H psi with H given as a linear map.
inline CVec rk4(const std::function<CVec(const CVec&)>& H, CVec psi, double t, int steps) {
  const double dt = t / steps;
  const cplx mi(0.0, -1.0);
  auto rhs = [&](const CVec& v) {
    CVec r = H(v);
    for (auto& z : r) z *= mi;
    return r;
  };
  auto axpy = [](const CVec& a, double s, const CVec& b) {
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  for (int s = 0; s < steps; ++s) {
    const CVec k1 = rhs(psi);
    const CVec k2 = rhs(axpy(psi, dt / 2, k1));
    const CVec k3 = rhs(axpy(psi, dt / 2, k2));
    const CVec k4 = rhs(axpy(psi, dt, k3));
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return psi;
}

/// Brute-force eigenvalues of a 2x2 matrix via the characteristic polynomial.
inline std::array<cplx, 2> eig2(const Eigen::Matrix2cd& m) {
  const cplx tr = m.trace();
  const cplx det = m.determinant();
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

inline double set_distance2(std::array<cplx, 2> a, std::array<cplx, 2> b) {
  const double d1 = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
  const double d2 = std::max(std::abs(a[0] - b[1]), std::abs(a[1] - b[0]));
  return std::min(d1, d2);
}

// ---------------------------------------------------------------------------
// Seeded generators

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  cplx cnormal() { return {normal(), normal()}; }
  cplx unimodular() { return std::polar(1.0, uniform(0.0, 2.0 * kPi)); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  CVec vector(std::size_t n) {
    CVec v(n);
    for (auto& z : v) z = cnormal();
    return v;
  }

  /// Random state supported on sites |x| <= radius.
  CVec localized(std::size_t n, long radius) {
    CVec v(n, cplx{0.0, 0.0});
    for (long x = -radius; x <= radius; ++x) v[static_cast<std::size_t>(x + static_cast<long>(n / 2))] = cnormal();
    return v;
  }

  /// Trigonometric polynomial samples with modes |m| <= max_mode.
  CVec band_limited(std::size_t n, int max_mode) {
    std::vector<cplx> c(2 * max_mode + 1);
    for (auto& z : c) z = cnormal();
    CVec v(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double k = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
      cplx acc{0.0, 0.0};
      for (int m = -max_mode; m <= max_mode; ++m) acc += c[m + max_mode] * std::polar(1.0, m * k);
      v[j] = acc;
    }
    return v;
  }

  Eigen::Matrix2cd unitary2() {
    Eigen::Matrix2cd m;
    m << cnormal(), cnormal(), cnormal(), cnormal();
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
    return qr.householderQ();
  }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2(const CVec& a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace oracle
