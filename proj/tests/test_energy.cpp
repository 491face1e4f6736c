#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qwtime/energy.hpp"

using namespace qwtime;
using fixture::random_admissible;

namespace {

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

struct Model {
  const char* name;
  Band band;
};

std::vector<Model> models(const MomentumGrid& g) {
  const auto had = coined_bands(hadamard_coin(), g);
  const auto ts5 = threestep_bands(std::sqrt(0.5), g);
  const auto ts09 = threestep_bands(0.3, g);
  return {{"ctqw", ctqw_band(g)},
          {"hadamard-1", had[0]},
          {"hadamard-2", had[1]},
          {"threestep-0.5", ts5[0]},
          {"threestep-0.09", ts09[0]}};
}

}  // namespace

TEST(EnergyBranches, HadamardImageIntervals) {
  const MomentumGrid g(2048);
  const auto bands = coined_bands(hadamard_coin(), g);
  std::vector<double> centres;
  for (const auto& b : bands) {
    const auto brs = energy_branches(b);
    ASSERT_EQ(brs.size(), 2u);
    for (const auto& br : brs) {
      EXPECT_NEAR(br.e_max - br.e_min, kPi / 2, 1e-6);
      centres.push_back(wrap_pi(0.5 * (br.e_min + br.e_max)));
    }
  }
  // Band 1 covers [3pi/4, 5pi/4] and band 2 covers [-pi/4, pi/4] on both branches.
  EXPECT_NEAR(std::abs(centres[0]), kPi, 1e-6);
  EXPECT_NEAR(std::abs(centres[1]), kPi, 1e-6);
  EXPECT_NEAR(centres[2], 0.0, 1e-6);
  EXPECT_NEAR(centres[3], 0.0, 1e-6);
}

TEST(EnergyBranches, InverseAndSigns) {
  const MomentumGrid g(1024);
  const Band b = ctqw_band(g);
  const auto brs = energy_branches(b, 101);
  ASSERT_EQ(brs.size(), 2u);
  for (const auto& br : brs) {
    ASSERT_EQ(br.E.size(), 101u);
    for (std::size_t i = 0; i < br.E.size(); ++i) {
      EXPECT_NEAR(b.phase_at(br.k[i]), br.E[i], 1e-11);
      EXPECT_GT(br.k[i], br.k_lo);
      EXPECT_LT(br.k[i], br.k_hi);
    }
    EXPECT_NEAR(br.E.front() - br.e_min, 0.02 * (br.e_max - br.e_min), 1e-12);
  }
  EXPECT_EQ(brs[0].sign * brs[1].sign, -1);
}

TEST(EnergyBranches, Errors) {
  Mat2 m;
  m << 0, 1, 1, 0;
  const Band flat = coined_bands(coin_from_entries(m), MomentumGrid(64))[0];
  try {
    energy_branches(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BranchNotMonotone);
  }
  EXPECT_THROW(energy_branches(ctqw_band(MomentumGrid(64)), 100), Error);
}

TEST(EnergyTransform, MultiplicationIntertwiningAtSamples) {
  const MomentumGrid g(512);
  for (const auto& m : models(g)) {
    for (const auto& br : energy_branches(m.band, 201)) {
      auto f = [](double k) { return std::polar(1.0 + 0.3 * std::cos(k), 2.0 * k); };
      const CVec vf = energy_transform(f, br);
      const CVec vgf = energy_transform([&](double k) { return m.band.phase_at(k) * f(k); }, br);
      for (std::size_t i = 0; i < vf.size(); ++i)
        EXPECT_LT(std::abs(vgf[i] - br.E[i] * vf[i]), 1e-10 * (1.0 + std::abs(vgf[i]))) << m.name;
    }
  }
}

TEST(EnergyTransform, SimpsonAgainstClosedForm) {
  // int_0^1 |e^{iE} sqrt(E)|^2 dE = 1/2.
  const std::size_t n = 1001;
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = static_cast<double>(i) / (n - 1);
    v[i] = std::polar(std::sqrt(e), e);
  }
  EXPECT_NEAR(energy_norm_squared(v, 1.0 / (n - 1)), 0.5, 1e-14);
}

TEST(EnergyTransform, UnitarityAndIntertwiningProperty) {
  oracle::Gen gen(401);
  const MomentumGrid g(2048);
  for (const auto& m : models(g)) {
    const auto brs = energy_branches(m.band);
    for (int rep = 0; rep < 3; ++rep) {
      const Field f = random_admissible(gen, m.band, 2, 0.15);
      EXPECT_LT(energy_unitarity_defect(f, m.band, brs), 1e-6) << m.name;
      EXPECT_LT(energy_intertwining_defect(f, m.band, brs), 1e-4) << m.name;
    }
  }
}

TEST(EnergyTransform, ContinuousCaseCarriesMinusSign) {
  const MomentumGrid g(2048);
  const Band b = ctqw_band(g);
  const Field f = smooth_bump(g, 0.5, 2.5);
  const Field tf = apply_T_band(f, b);
  for (const auto& br : energy_branches(b)) {
    const CVec vtf = energy_transform(tf, br);
    const CVec d = energy_derivative(energy_transform(f, br), br.dE);
    double minus = 0.0, plus = 0.0, ref = 0.0;
    for (std::size_t i = 2; i + 2 < d.size(); ++i) {
      minus += std::norm(vtf[i] + d[i]);
      plus += std::norm(vtf[i] - d[i]);
      ref += std::norm(vtf[i]);
    }
    if (ref < 1e-12) continue;
    EXPECT_LT(std::sqrt(minus / ref), 1e-4);
    EXPECT_GT(std::sqrt(plus / ref), 1.0);
  }
}

TEST(Deficiency, ContinuousSpanVectors) {
  const MomentumGrid g(4096);
  const Band b = ctqw_band(g);
  for (int sign : {+1, -1}) {
    const auto psi = [sign](double k) { return cplx(std::sqrt(std::sin(k)) * std::exp(sign * std::cos(k))); };
    EXPECT_LT(eigenfunction_residual(b, psi, cplx(0.0, sign), 0.1, kPi - 0.1), 1e-8);
  }
  const auto brs = energy_branches(b, 5);
  for (const auto& br : brs) {
    for (int sign : {+1, -1}) EXPECT_LT(deficiency_vector_residual(b, br, sign), 1e-8);
  }
}

TEST(Deficiency, ContinuousFamily) {
  const MomentumGrid g(4096);
  const Band b = ctqw_band(g);
  for (double eps : {0.1, 0.25, 1.0}) {
    EXPECT_LT(eigenfunction_residual(b, continuous_deficiency_family(eps), cplx(0.0, eps), 0.1, kPi - 0.1), 1e-8);
    // Not an eigenfunction for any other eigenvalue.
    EXPECT_GT(eigenfunction_residual(b, continuous_deficiency_family(eps), cplx(0.0, eps + 0.1), 0.1, kPi - 0.1),
              0.05);
  }
}

TEST(Deficiency, ClassicalExpressionAgainstSpectralOperator) {
  const MomentumGrid g(2048);
  const Band b = coined_bands(hadamard_coin(), g)[0];
  const Field f = smooth_bump(g, 0.5, 1.3);
  const Field tf = apply_T_band(f, b);
  const TrigInterpolant fi(f);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double k = g.k(j);
    if (k < 0.6 || k > 1.2) continue;
    worst = std::max(worst, std::abs(classical_T(b, [&](double x) { return fi(x); }, k) - tf[j]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Deficiency, PullbackVectorsOnUnitaryBands) {
  const MomentumGrid g(4096);
  std::vector<Band> bands;
  for (auto& b : coined_bands(hadamard_coin(), g)) bands.push_back(b);
  for (auto& b : threestep_bands(std::sqrt(0.5), g)) bands.push_back(b);
  for (const auto& b : bands) {
    for (const auto& br : energy_branches(b, 5)) {
      for (int sign : {+1, -1}) EXPECT_LT(deficiency_vector_residual(b, br, sign), 1e-6) << b.label;
    }
  }
}

TEST(Deficiency, TensorFamily) {
  const MomentumGrid g(1024);
  for (double eps : {0.1, 0.25}) {
    EXPECT_NEAR(2.0 * (0.5 * eps + 0.5 * tensor_partner_parameter(eps, 0.5, 0.5)), 1.0, 1e-15);
    for (int sign : {+1, -1}) EXPECT_LT(tensor_deficiency_residual(g, eps, 0.5, 0.5, sign), 1e-6);
  }
  EXPECT_LT(tensor_deficiency_residual(g, 0.25, 0.3, 0.7, +1), 1e-6);
  EXPECT_THROW(tensor_partner_parameter(0.1, 1.0, 0.0), Error);
}
