#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qwtime/time_operator.hpp"

using namespace qwtime;
using fixture::random_admissible;

namespace {

Field plane(const MomentumGrid& g, double m) {
  return Field::sample(g, [m](double k) { return std::polar(1.0, m * k); });
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST(BandOperator, ShiftBandIsP) {
  const MomentumGrid g(128);
  const Band b = coined_bands(coin_from_parameters(1.0, 0.0, 0.0), g)[0];
  const Field f = plane(g, 2.0);
  EXPECT_LT(max_diff(apply_T_band(f, b), 2.0 * f), 1e-12);
  oracle::Gen gen(301);
  for (int rep = 0; rep < 5; ++rep) {
    const Field r = Field::momentum(g, gen.vector(g.size()));
    EXPECT_LT(max_diff(apply_T_band(r, b), apply_P(r)), 1e-12);
  }
}

TEST(BandOperator, ThreeStepUnitLimitIsScaledP) {
  const MomentumGrid g(128);
  const auto bands = threestep_bands_any(1.0, g);
  const Field f = plane(g, 3.0);
  EXPECT_LT(max_diff(apply_T_band(f, bands[0]), f), 1e-12);
  EXPECT_LT(max_diff(apply_T_band(f, bands[1]), cplx(-1.0) * f), 1e-12);
}

TEST(BandOperator, HadamardLiteralFormula) {
  const MomentumGrid g(1024);
  const auto bands = coined_bands(hadamard_coin(), g);
  const Field f = smooth_bump(g, 0.7, kPi / 2 - 0.2);
  // h(k) = sqrt(1 + cos^2 k) / cos k with the literal (1/2)(hP + Ph).
  CVec h(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double c = std::cos(g.k(j));
    h[j] = std::abs(c) < 0.02 ? 0.0 : std::sqrt(1.0 + c * c) / c;
  }
  const Field lit = cplx(0.5) * (multiply(apply_P(f), h) + apply_P(multiply(f, h)));
  // The literal formula belongs to the branch with g' = cos k / sqrt(1 + cos^2 k).
  const Band& match = bands[0].g_prime[0] > 0.0 ? bands[0] : bands[1];
  EXPECT_LT(max_diff(apply_T_band(f, match), lit), 1e-10);
}

TEST(BandOperator, DomainViolation) {
  const MomentumGrid g(256);
  const Band b = coined_bands(hadamard_coin(), g)[0];
  try {
    apply_T_band(smooth_bump(g, 1.0, 2.0), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
  }
}

TEST(BandOperator, NoStrongOperatorForConstantBand) {
  Mat2 m;
  m << 0, 1, 1, 0;
  const Band b = coined_bands(coin_from_entries(m), MomentumGrid(64))[0];
  try {
    apply_T_band(plane(MomentumGrid(64), 1.0), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoStrongTimeOperator);
  }
}

TEST(BandOperator, NoZeroFreeDomain) {
  // g' = sin(40k) has 80 zeros; every sample lies within the margin of one of them.
  const MomentumGrid g(512);
  const Band b = make_band(g, Dynamics::Hamiltonian, [](double k) { return -std::cos(40 * k) / 40; },
                           [](double k) { return std::sin(40 * k); });
  EXPECT_EQ(b.zero_count(), 80u);
  try {
    apply_T_band(Field(g, Representation::Momentum), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoZeroFreeDomain);
  }
}

TEST(BandOperator, SymmetricOnAdmissiblePairsProperty) {
  oracle::Gen gen(302);
  const MomentumGrid g(1024);
  std::vector<Band> bands;
  for (auto& b : coined_bands(hadamard_coin(), g)) bands.push_back(b);
  for (auto& b : threestep_bands(std::sqrt(0.5), g)) bands.push_back(b);
  for (auto& b : threestep_bands(0.3, g)) bands.push_back(b);
  bands.push_back(ctqw_band(g));
  for (const auto& b : bands) {
    for (int rep = 0; rep < 5; ++rep) {
      const Field f = random_admissible(gen, b);
      const Field h = random_admissible(gen, b);
      EXPECT_LT(std::abs(inner(apply_T_band(f, b), h) - inner(f, apply_T_band(h, b))), 1e-9) << b.label;
    }
  }
}

TEST(FullOperator, DiagonalFrameGivesPlusMinusP) {
  oracle::Gen gen(303);
  const MomentumGrid g(128);
  const DiscreteWalk w = coined_walk(coin_from_parameters(1.0, 0.0, 0.0), g);
  const SpinorField psi{Field::momentum(g, gen.band_limited(g.size(), 20)),
                        Field::momentum(g, gen.band_limited(g.size(), 20))};
  const SpinorField t = apply_T_full(psi, w);
  EXPECT_LT(max_diff(t.upper, apply_P(psi.upper)), 1e-11);
  EXPECT_LT(max_diff(t.lower, cplx(-1.0) * apply_P(psi.lower)), 1e-11);
}

TEST(FullOperator, PreservesBandSubspaceAndLinearity) {
  oracle::Gen gen(304);
  const MomentumGrid g(1024);
  const DiscreteWalk w = coined_walk(hadamard_coin(), g);
  const Field f1 = random_admissible(gen, w.bands[0]);
  const Field zero(g, Representation::Momentum);
  const SpinorField psi = from_band_components(w.frame, f1, zero);
  const SpinorField t = apply_T_full(psi, w);
  const auto comps = band_components(w.frame, t);
  EXPECT_LT(norm(comps[1]), 1e-10);
  const Field f2 = random_admissible(gen, w.bands[1]);
  const SpinorField phi = from_band_components(w.frame, zero, f2);
  const cplx a = gen.cnormal(), b = gen.cnormal();
  const SpinorField lhs = apply_T_full(a * psi + b * phi, w);
  const SpinorField rhs = a * apply_T_full(psi, w) + b * apply_T_full(phi, w);
  EXPECT_LT(norm(lhs - rhs), 1e-10 * norm(lhs));
}

TEST(Commutation, HadamardBandBump) {
  const MomentumGrid g(1024);
  const Band b = coined_bands(hadamard_coin(), g)[0];
  EXPECT_LT(commutation_residual_unitary(smooth_bump(g, 0.7, kPi / 2 - 0.2), b), 1e-8);
}

TEST(Commutation, ThreeStepZeroFreeAnySmoothFunction) {
  oracle::Gen gen(305);
  const MomentumGrid g(1024);
  const auto bands = threestep_bands(0.3, g);
  for (int rep = 0; rep < 5; ++rep) {
    const Field f = Field::momentum(g, gen.band_limited(g.size(), 8));
    EXPECT_LT(commutation_residual_unitary(f, bands[0]), 1e-8);
    EXPECT_LT(commutation_residual_unitary(f, bands[1]), 1e-8);
  }
}

TEST(Commutation, FullWalkHadamard) {
  oracle::Gen gen(306);
  const MomentumGrid g(1024);
  const DiscreteWalk w = coined_walk(hadamard_coin(), g);
  const SpinorField psi = from_band_components(w.frame, random_admissible(gen, w.bands[0]),
                                               random_admissible(gen, w.bands[1]));
  EXPECT_LT(commutation_residual_unitary(psi, w), 1e-8);
}

TEST(Commutation, ToyShiftIsExactlyP) {
  oracle::Gen gen(307);
  const ToyModel toy = toy_pair(256);
  const Band b = toy.band();
  const Field f = Field::momentum(toy.grid, gen.band_limited(256, 30));
  EXPECT_LT(commutation_residual_unitary(f, b), 1e-12);
}

TEST(Commutation, ContinuousTime) {
  const MomentumGrid g(2048);
  const Band b = ctqw_band(g);
  const Field f = smooth_bump(g, 0.3, 2.8);
  EXPECT_EQ(commutation_residual_sa(f, b, 0.0), 0.0);
  for (double t : {0.5, 1.0, 2.0}) EXPECT_LT(commutation_residual_sa(f, b, t), 1e-8) << t;
  EXPECT_NEAR(commutation_residual_sa(f, b, -2.0), commutation_residual_sa(f, b, 2.0), 1e-10);
}

TEST(Uncertainty, ShiftBandExamples) {
  const MomentumGrid g(128);
  const Band b = coined_bands(coin_from_parameters(1.0, 0.0, 0.0), g)[0];
  EXPECT_NEAR(uncertainty(plane(g, 5.0), b), 0.0, 1e-12);
  const Field two = cplx(1.0 / std::sqrt(2.0)) * (plane(g, 4.0) + plane(g, 6.0));
  EXPECT_NEAR(uncertainty(two, b), 1.0, 1e-12);
  try {
    uncertainty(cplx(2.0) * two, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
}

TEST(Uncertainty, HadamardRefinementStable) {
  auto value = [](std::size_t n) {
    const MomentumGrid g(n);
    return uncertainty(normalized(smooth_bump(g, 0.7, kPi / 2 - 0.2)), coined_bands(hadamard_coin(), g)[0]);
  };
  const double a = value(1024);
  const double b = value(2048);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a, b, 1e-6);
}

TEST(Classify, Presets) {
  const MomentumGrid g(512);
  const auto ts = classify(threestep_bands(0.3, g));
  EXPECT_TRUE(ts.self_adjoint);
  EXPECT_EQ(ts.spectrum, "Z");
  EXPECT_EQ(ts.d_plus, 0u);
  const auto had = classify(coined_bands(hadamard_coin(), g));
  EXPECT_EQ(had.bands[0].d_plus, 2u);
  EXPECT_EQ(had.bands[1].d_minus, 2u);
  EXPECT_EQ(had.d_plus, 4u);
  EXPECT_EQ(had.spectrum, "C");
  EXPECT_FALSE(had.self_adjoint);
  const auto four = classify(threestep_bands(std::sqrt(0.5), g));
  EXPECT_EQ(four.d_plus, 8u);
  EXPECT_EQ(four.d_minus, 8u);
  EXPECT_EQ(four.spectrum, "C");
  const auto three = classify(threestep_bands_any(1.0, g));
  EXPECT_EQ(three.spectrum, "Z/3");
  Mat2 m;
  m << 0, 1, 1, 0;
  const auto zero = classify(coined_bands(coin_from_entries(m), g));
  EXPECT_EQ(zero.spectrum, "two-point");
  EXPECT_FALSE(zero.self_adjoint);
  EXPECT_FALSE(zero.note.empty());
  const auto c = classify(ctqw_band(g));
  EXPECT_EQ(c.d_plus, 2u);
  EXPECT_EQ(spectrum_string(c), "C");
}

TEST(Classify, InvariantsAndGridIndependenceProperty) {
  oracle::Gen gen(308);
  std::vector<std::function<std::array<Band, 2>(const MomentumGrid&)>> makers;
  for (double b2 : {0.0, 0.09, 0.25, 0.5, 0.8})
    makers.push_back([b2](const MomentumGrid& g) { return threestep_bands(std::sqrt(b2), g); });
  makers.push_back([](const MomentumGrid& g) { return coined_bands(hadamard_coin(), g); });
  for (int rep = 0; rep < 6; ++rep) {
    const CoinParams c = coin_from_entries(gen.unitary2());
    makers.push_back([c](const MomentumGrid& g) { return coined_bands(c, g); });
  }
  for (const auto& make : makers) {
    const auto a = make(MomentumGrid(512));
    const auto b = make(MomentumGrid(1024));
    for (int j = 0; j < 2; ++j) {
      const auto ca = classify(a[j]);
      const auto cb = classify(b[j]);
      EXPECT_EQ(ca.zero_count, cb.zero_count);
      EXPECT_EQ(ca.d_plus, cb.d_plus);
      EXPECT_EQ(spectrum_string(ca), spectrum_string(cb));
      EXPECT_EQ(ca.self_adjoint, cb.self_adjoint);
      if (ca.zero_count == 0 && ca.winding != 0) {
        EXPECT_TRUE(ca.self_adjoint);
        EXPECT_EQ(ca.denominator, std::abs(ca.winding));
      }
      if (ca.zero_count > 0) {
        EXPECT_EQ(ca.d_plus, ca.zero_count);
        EXPECT_EQ(ca.d_minus, ca.zero_count);
        EXPECT_EQ(ca.spectrum, SpectrumKind::ComplexPlane);
      }
    }
  }
}

TEST(Spectrum, ShiftBandIntegers) {
  const MomentumGrid g(256);
  const Band b = coined_bands(coin_from_parameters(1.0, 0.0, 0.0), g)[0];
  const TruncatedSpectrum s = truncated_spectrum(b, 20);
  ASSERT_EQ(s.eigenvalues.size(), 41u);
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) EXPECT_NEAR(s.eigenvalues[i], static_cast<double>(i) - 20, 1e-12);
}

TEST(Spectrum, ThreeStepUnitLimitThirds) {
  const MomentumGrid g(256);
  const TruncatedSpectrum s = truncated_spectrum(threestep_bands_any(1.0, g)[0], 20);
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    EXPECT_NEAR(s.eigenvalues[i], (static_cast<double>(i) - 20) / 3.0, 1e-12);
}

TEST(Spectrum, RejectsBandsWithZeros) {
  try {
    self_adjoint_spectrum_check(coined_bands(hadamard_coin(), MomentumGrid(256))[0], 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSelfAdjointCase);
  }
}

TEST(TwoEigenvalue, RealPair) {
  const auto op = two_eigenvalue_time_operator(1.0, -1.0);
  EXPECT_LT(op.commutator_residual, 1e-14);
  EXPECT_LT(op.hermiticity_defect, 1e-14);
  // T = (i/2)[[0, 1], [-1, 0]] in the basis (xi, eta).
  EXPECT_NEAR(std::abs(op.T(0, 1) - cplx(0.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(op.T(1, 0) - cplx(0.0, -0.5)), 0.0, 1e-15);
  EXPECT_THROW(two_eigenvalue_time_operator(1.0, 1.0), Error);
}

TEST(Tensor, WeightsAndReduction) {
  const MomentumGrid g(64);
  const TorusField psi = TorusField::sample(g, [](double a, double b) {
    return bump_value(a, 0.4, 2.7) * bump_value(b, 0.5, 2.6);
  });
  try {
    tensor_time_apply(psi, 0.6, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidWeights);
  }
  const TorusField full = tensor_time_apply(psi, 1.0, 0.0);
  const TorusField axis = cplx(2.0) * apply_T_axis(psi, ctqw_band(g), 0);
  EXPECT_LT(norm(full - axis), 1e-14);
}

TEST(Tensor, CommutationResidual) {
  const MomentumGrid g(256);
  const TorusField psi = TorusField::sample(g, [](double a, double b) {
    return bump_value(a, 0.4, 2.7) * bump_value(b, 3.5, 5.9);
  });
  EXPECT_LT(tensor_commutation_residual(psi, 0.5, 0.5, 1.0), 1e-6);
}

TEST(Coverage, SelfAdjointBandsCoverTheCircleProperty) {
  oracle::Gen gen(309);
  for (std::size_t n : {128u, 512u}) {
    const MomentumGrid g(n);
    for (int rep = 0; rep < 8; ++rep) {
      for (const auto& b : threestep_bands(std::sqrt(gen.uniform(0.0, 0.24)), g)) {
        ASSERT_TRUE(classify(b).self_adjoint);
        EXPECT_LT(coverage_gap(b), coverage_gap_limit(b));
      }
    }
    const Band shift = shift_band(g);
    EXPECT_NEAR(coverage_gap(shift), g.spacing(), 1e-12);
  }
}

TEST(Coverage, HadamardLeavesGaps) {
  const MomentumGrid g(512);
  const auto bands = coined_bands(hadamard_coin(), g);
  EXPECT_GT(coverage_gap({&bands[0], &bands[1]}), kPi / 2 - 0.01);
}
