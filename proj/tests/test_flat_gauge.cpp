#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "igauge/flat_gauge.hpp"
#include "igauge/generators.hpp"

using namespace igauge;

namespace {
const double kappa = 4 * std::numbers::pi * std::numbers::pi;
}

TEST(Interpolation, LagrangeWeightsReproduceQuintics) {
  for (double t : {0.0, 0.125, 0.5, 0.875}) {
    const auto w = detail::lagrange6(t);
    double s = 0, q = 0;
    for (int m = -2; m <= 3; ++m) {
      s += w[m + 2];
      q += w[m + 2] * std::pow(double(m), 5);
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(q, std::pow(t, 5), 1e-12);
  }
}

TEST(TemporalGauge, ConstantPsiGivesExponential) {
  const GridSpec g = grid3(16);
  Connection<SU2> B(g);
  const Vec3 psi{{0.2, -0.5, 0.3}};
  B.comp[0] = AlgebraField(g, psi);
  const GaugePath<SU2> path = temporal_gauge(B);
  for (std::size_t j = 0; j <= path.n_phi; j += 4) {
    const auto expect = SU2::exp(psi * (-path.h * double(j)));
    EXPECT_LT(SU2::distance(path.slices[j].data[5], expect), 1e-6);
  }
  EXPECT_LT(twisted_periodicity_residual(path), 1e-13);
  EXPECT_FALSE(path.under_resolved);
}

TEST(TemporalGauge, IsotropyHoldsForCommutingConstants) {
  const GridSpec g = grid3(12);
  const auto B = gen_flat<SU2>(g, 4);
  const GaugePath<SU2> path = temporal_gauge(B);
  AlgebraField ax(path.sigma, B.comp[1].data[0]), ay(path.sigma, B.comp[2].data[0]);
  EXPECT_LT(isotropy_check(path.holonomy(), ax, ay), 1e-12);
}

TEST(NormalizeFlat, UntwistedCorpusIsTrivial) {
  const auto B = gen_flat<SU2>(grid3(16), 5);
  const auto n = normalize_flat(B);
  EXPECT_LT(n.cs_residual, 1e-12);
  EXPECT_EQ(n.deg_w.rounded, 0);
  EXPECT_TRUE(n.consistent);
  EXPECT_LT(n.closure_residual, 1e-10);
  // xi = -Psi up to the branch of the logarithm
  EXPECT_LT(SU2::distance(SU2::exp(n.xi * (2 * std::numbers::pi)), SU2::exp(B.comp[0].data[0] * (-2 * std::numbers::pi))),
            1e-10);
}

TEST(NormalizeFlat, RecoversDegreeOfGaugedCorpus) {
  const GridSpec g = grid3(48);
  for (int d : {-2, 1}) {
    const auto B = gauge_apply(gen_bump_gauge<SU2>(g, standard_bumps(d)), gen_flat<SU2>(g, 6));
    const auto n = normalize_flat(B);
    EXPECT_EQ(n.deg_w.rounded, -d);
    EXPECT_TRUE(n.consistent);
    EXPECT_LT(n.cs_residual, 1e-3 * kappa);
    EXPECT_LT(n.twisted_periodicity, 1e-8);
    EXPECT_LT(std::abs(n.twist_term), 1e-10);
    EXPECT_EQ(n.w.data[0], SU2::identity());
  }
}

TEST(NormalizeFlat, NonConstantHolonomyIsUnsupported) {
  const auto B = gen_random_conn<SU2>(grid3(16), 7, 1, 0.8);
  EXPECT_THROW(normalize_flat(B), unsupported_input);
}

TEST(TwistCorrect, RejectsMismatchedGrid) {
  const GaugePath<SU2> path = temporal_gauge(gen_flat<SU2>(grid3(8), 1));
  EXPECT_THROW(twist_correct(path, grid3(10)), usage_error);
}
