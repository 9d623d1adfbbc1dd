#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "igauge/connection.hpp"
#include "igauge/generators.hpp"
#include "igauge/grid.hpp"

using namespace igauge;

namespace {

const double pi = std::numbers::pi;

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a.data[p] - b.data[p]));
  return m;
}

double derivative_error(std::size_t n, int order) {
  const GridSpec g = grid3(n);
  const auto f = make_scalar(g, [](auto x) { return std::sin(2 * x[1] + x[2]) * std::cos(x[0]); });
  const auto df = make_scalar(g, [](auto x) { return 2 * std::cos(2 * x[1] + x[2]) * std::cos(x[0]); });
  return max_abs_diff(partial(f, 1, order), df);
}

}  // namespace

TEST(Grid, ShapesAndStrides) {
  const GridSpec g = grid4(9, 8, 6, 5, 1.0, 2.0);
  EXPECT_EQ(g.points(), 9u * 8 * 6 * 5);
  EXPECT_EQ(g.stride(0), 240u);
  EXPECT_EQ(g.stride(3), 1u);
  EXPECT_EQ(g.index_along(241, 0), 1u);
  EXPECT_DOUBLE_EQ(g.axes[0].coord(8), 2.0);
  EXPECT_DOUBLE_EQ(g.axes[1].spacing(), 2 * pi / 8);
  EXPECT_THROW(grid3(4), usage_error);
  EXPECT_THROW(grid4(9, 8, 8, 8, 2.0, 1.0), usage_error);
}

TEST(Stencils, PeriodicConvergenceRates) {
  for (int order : {2, 4}) {
    const double e1 = derivative_error(16, order), e2 = derivative_error(32, order);
    EXPECT_NEAR(std::log2(e1 / e2), double(order), 0.2) << "order " << order;
  }
  EXPECT_THROW(derivative_error(16, 3), usage_error);
}

TEST(Stencils, RadialEndsExactOnPolynomials) {
  const GridSpec g = grid4(9, 5, 5, 5, 1.0, 2.0);
  const auto quartic = make_scalar(g, [](auto x) { return std::pow(x[0], 4) - 3 * x[0] * x[0] + x[0]; });
  const auto dq = make_scalar(g, [](auto x) { return 4 * std::pow(x[0], 3) - 6 * x[0] + 1; });
  EXPECT_LT(max_abs_diff(partial(quartic, 0, 4), dq), 1e-11);
  const auto quad = make_scalar(g, [](auto x) { return 2 * x[0] * x[0] - x[0]; });
  const auto dquad = make_scalar(g, [](auto x) { return 4 * x[0] - 1; });
  EXPECT_LT(max_abs_diff(partial(quad, 0, 2), dquad), 1e-12);
}

TEST(Stencils, TransposeIsAdjoint) {
  Rng rng(1);
  const GridSpec g = grid4(7, 6, 5, 6, 1.0, 2.0);
  AlgebraField a(g), b(g);
  for (auto& v : a.data) v = Vec3{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  for (auto& v : b.data) v = Vec3{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  for (std::size_t axis = 0; axis < 4; ++axis)
    for (int order : {2, 4}) {
      const auto da = partial(a, axis, order);
      const auto tb = partial_transpose(b, axis, order);
      double lhs = 0, rhs = 0;
      for (std::size_t p = 0; p < g.points(); ++p) {
        lhs += dot(da.data[p], b.data[p]);
        rhs += dot(a.data[p], tb.data[p]);
      }
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs) + 1e-10);
    }
}

TEST(Quadrature, VolumesAndGregoryWeights) {
  EXPECT_NEAR(integrate(ScalarField(grid3(12), 1.0)), std::pow(2 * pi, 3), 1e-11);
  const GridSpec g = grid4(9, 5, 5, 5, 1.0, 2.0);
  // integral of r^3 over [1,2] is 15/4; Gregory weights integrate cubics exactly
  const auto r3 = make_scalar(g, [](auto x) { return x[0] * x[0] * x[0]; });
  EXPECT_NEAR(integrate(r3), 3.75 * std::pow(2 * pi, 3), 1e-10);
  const auto trig = make_scalar(g, [](auto x) { return std::cos(x[1]) * std::cos(x[1]); });
  EXPECT_NEAR(integrate(trig), 1.0 * pi * 4 * pi * pi, 1e-10);
  const auto w = axis_weights(Axis{5, false, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(w.front(), 0.125);
}

TEST(Quadrature, PairwiseSumDependsOnlyOnLength) {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / double(i + 1);
  const double a = pairwise_sum(x), b = pairwise_sum(x);
  EXPECT_EQ(a, b);
  double h = 0;
  for (std::size_t i = x.size(); i-- > 0;) h += x[i];
  EXPECT_NEAR(a, h, 1e-13);
}

TEST(Curvature, ConstantConnectionIsBracket) {
  const GridSpec g = grid3(8);
  Connection<SU2> B(g);
  const Vec3 a{{0.3, -0.2, 0.5}}, b{{0.1, 0.7, -0.4}};
  B.comp[1] = AlgebraField(g, a);
  B.comp[2] = AlgebraField(g, b);
  const Curvature F = curvature(B);
  EXPECT_LT(norm(F(1, 2).data[17] - SU2::bracket(a, b)), 1e-15);
  EXPECT_LT(norm(F(0, 1).data[17]), 1e-15);
}

TEST(Curvature, PureGaugeIsFlatUnderRefinement) {
  double prev = 0;
  for (std::size_t n : {16, 32}) {
    const GridSpec g = grid3(n);
    const auto u = gen_random_gauge<SU2>(g, 4, 1, 0.8);
    const auto B = gauge_apply(u, Connection<SU2>(g));
    const double f = l2_norm2<SU2>(curvature(B));
    if (prev > 0) EXPECT_GT(prev / f, 100.0);  // |F|^2 at fourth order: ratio near 256
    prev = f;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(GaugeAction, CurvatureTransformsByAdjointUnderRefinement) {
  double prev = 0;
  for (std::size_t n : {16, 32}) {
    const GridSpec g = grid3(n);
    const auto u = gen_random_gauge<SU2>(g, 5, 1, 0.8);
    const auto B = gen_random_conn<SU2>(g, 6, 1, 0.5);
    const Curvature F = curvature(B), Fu = curvature(gauge_apply(u, B));
    double err = 0;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t p = 0; p < g.points(); ++p)
        err = std::max(err, norm(Fu.comp[k].data[p] - SU2::adjoint(SU2::inverse(u.data[p]), F.comp[k].data[p])));
    if (prev > 0) EXPECT_GT(prev / err, 10.0);
    prev = err;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(GaugeAction, ComposesAsRightAction) {
  const GridSpec g = grid3(24);
  const auto u = gen_random_gauge<SU2>(g, 7, 1, 0.6), v = gen_random_gauge<SU2>(g, 8, 1, 0.6);
  const auto B = gen_random_conn<SU2>(g, 9, 1, 0.5);
  const auto lhs = gauge_apply(v, gauge_apply(u, B));
  const auto rhs = gauge_apply(multiply(u, v), B);
  double err = 0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t p = 0; p < g.points(); ++p) err = std::max(err, norm(lhs.comp[k].data[p] - rhs.comp[k].data[p]));
  EXPECT_LT(err, 1e-3);
}

TEST(Generators, FlatCorpusIsDeterministicAndFlat) {
  const GridSpec g = grid3(8);
  const auto a = gen_flat<SU2>(g, 11), b = gen_flat<SU2>(g, 11), c = gen_flat<SU2>(g, 12);
  EXPECT_EQ(a.comp[1].data, b.comp[1].data);
  EXPECT_NE(a.comp[1].data, c.comp[1].data);
  EXPECT_LT(l2_norm2<SU2>(curvature(a)), 1e-28);
}

TEST(Generators, RandomConnectionIsDeterministicAndBandlimited) {
  const GridSpec g = grid3(8);
  EXPECT_EQ(gen_random_conn<SU2>(g, 3, 2, 0.5).comp[2].data, gen_random_conn<SU2>(g, 3, 2, 0.5).comp[2].data);
  EXPECT_THROW(gen_random_conn<SU2>(g, 3, 3, 0.5), usage_error);
}

TEST(Generators, BumpsValidateGeometry) {
  const GridSpec g = grid3(16);
  EXPECT_THROW(validate_bumps(g, {Bump{{pi, pi, pi}, 1.5, 1}, Bump{{pi, pi, pi + 2.0}, 1.5, 1}}), usage_error);
  EXPECT_THROW(validate_bumps(g, {Bump{{pi, pi, pi}, 3.2, 1}}), usage_error);
  EXPECT_NO_THROW(validate_bumps(g, standard_bumps(2)));
  const auto u = gen_bump_gauge<SU2>(g, standard_bumps(1));
  EXPECT_LT(SU2::distance(u.data[0], SU2::Element{{-1.0, 0.0, 0.0, 0.0}}), 1e-15);
  const auto v = gen_bump_gauge<SO3>(g, standard_bumps(1));
  EXPECT_LT(SO3::distance(v.data[0], SO3::identity()), 1e-12);
}
