#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include <gtest/gtest.h>

#include <trihelm/discretization.hpp>
#include <trihelm/source.hpp>

using namespace trihelm;

namespace
{

/// Full-length vector equal to 1 on every vertex value DOF.
Vector unit_value_field(const Discretization& d)
{
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d.dofmap.total()));
  for (std::size_t vtx = 0; vtx < d.mesh.num_vertices(); ++vtx)
    v(DofMap::vertex_dof(static_cast<int>(vtx), 0)) = 1.0;
  return v;
}

using Scalar = std::function<long double(long double, long double)>;

/// Sixth-order central second difference in one direction.
long double d2(const Scalar& f, long double x, long double y, long double h, bool along_x)
{
  static constexpr std::array<long double, 7> c{1.0L / 90, -3.0L / 20, 1.5L, -49.0L / 18,
                                                1.5L,      -3.0L / 20, 1.0L / 90};
  long double s = 0.0L;
  for (int k = -3; k <= 3; ++k)
    s += c[static_cast<std::size_t>(k + 3)] * (along_x ? f(x + k * h, y) : f(x, y + k * h));
  return s / (h * h);
}

Scalar fd_laplacian(Scalar f, long double h)
{
  return [f, h](long double x, long double y) {
    return d2(f, x, y, h, true) + d2(f, x, y, h, false);
  };
}

} // namespace

TEST(ApplyB, ConstantIsFixed)
{
  const Polynomial2D c = Polynomial2D::constant(3.5);
  const Polynomial2D r = apply_B(c, 2.0);
  EXPECT_DOUBLE_EQ(r(0.3, 0.8), 3.5);
  EXPECT_EQ(r.effective_degree(), 0);
}

TEST(ApplyB, X2Y)
{
  const Polynomial2D u = Polynomial2D::monomial(2, 1);
  const Polynomial2D r = apply_B(u, 1.0);
  const Polynomial2D expected = u - 6.0 * Polynomial2D::monomial(0, 1);
  for (double x : {0.0, 0.3, 1.2})
    for (double y : {-0.5, 0.25, 2.0})
      EXPECT_NEAR(r(x, y), expected(x, y), 1e-13);
}

TEST(ApplyB, Linearity)
{
  const Polynomial2D p = Polynomial2D::monomial(4, 2) + Polynomial2D::monomial(1, 3);
  const Polynomial2D q = Polynomial2D::monomial(6, 0) - 2.0 * Polynomial2D::monomial(2, 2);
  const Polynomial2D lhs = apply_B(2.0 * p + q, 0.3);
  const Polynomial2D rhs = 2.0 * apply_B(p, 0.3) + apply_B(q, 0.3);
  for (double x : {0.1, 0.7})
    for (double y : {0.2, 0.9})
      EXPECT_NEAR(lhs(x, y), rhs(x, y), 1e-12);
}

TEST(Manufactured, DegreesAndCentreValue)
{
  const ManufacturedCase mc = manufactured_case(1.0);
  EXPECT_EQ(mc.u.effective_degree(), 12);
  EXPECT_EQ(mc.f.effective_degree(), 12);
  EXPECT_NEAR(mc.u(0.5, 0.5), std::pow(1.0 / 16.0, 3), 1e-17);
}

TEST(Manufactured, SourceMatchesFiniteDifferenceOracle)
{
  // the nested stencil amplifies rounding by about h^-6, so the oracle runs
  // in extended precision on the closed form of u*
  const Scalar u = [](long double x, long double y) {
    const long double p = x * (1 - x) * y * (1 - y);
    return p * p * p;
  };
  const long double h = 1e-2L;
  const Scalar l1 = fd_laplacian(u, h);
  const Scalar l2 = fd_laplacian(l1, h);
  const Scalar l3 = fd_laplacian(l2, h);
  const long double x = 0.5L, y = 0.5L;
  const double fd = static_cast<double>(u(x, y) - 3 * l1(x, y) + 3 * l2(x, y) - l3(x, y));
  EXPECT_NEAR(manufactured_case(1.0).f(0.5, 0.5) / fd, 1.0, 1e-6);
}

TEST(Manufactured, VanishesToSecondOrderOnTheBoundary)
{
  const PolynomialJet u(manufactured_case(1.0).u);
  for (double s : {0.0, 0.2, 0.5, 0.9, 1.0})
    for (const Vec2& p : {Vec2(0, s), Vec2(s, 0), Vec2(1, s), Vec2(s, 1)})
    {
      const Jet j = u(p);
      EXPECT_NEAR(j.value, 0.0, 1e-15);
      for (double g : j.grad)
        EXPECT_NEAR(g, 0.0, 1e-14);
      for (double hh : j.hess)
        EXPECT_NEAR(hh, 0.0, 1e-14);
    }
}

TEST(Manufactured, IntegralMatchesBetaOracle)
{
  // (int_0^1 t^3 (1-t)^3 dt)^2 = B(4,4)^2 = (1/140)^2. The monomial sum
  // cancels by a factor of about 4e4, hence the relative tolerance.
  EXPECT_NEAR(manufactured_case(1.0).u.integrate_unit_square() * 140.0 * 140.0, 1.0, 1e-11);
}

TEST(Manufactured, RejectsNonPositiveB) { EXPECT_THROW(manufactured_case(0.0), Error); }

class CurveLoadTest : public ::testing::Test
{
protected:
  std::shared_ptr<const Discretization> d = build_discretization(8);
  EmbeddedCurve curve = embed_curve(d->mesh, 0.25, 0.75);

  ComponentLoads load(const CurveDensity& f, CurveSide side = CurveSide::inside) const
  {
    return curve_load(d->mesh, curve, d->bases, d->dofmap, f, side);
  }
};

TEST_F(CurveLoadTest, ZeroDensityGivesZeroLoad)
{
  const ComponentLoads l = load(CurveDensity::constant(0.0, 0.0));
  EXPECT_EQ(l[0].norm(), 0.0);
  EXPECT_EQ(l[1].norm(), 0.0);
}

TEST_F(CurveLoadTest, ConstantDensityAgainstUnitTrace)
{
  const Vector one = unit_value_field(*d);
  const ComponentLoads l = load(CurveDensity::constant(1.0, 0.0));
  EXPECT_NEAR(l[0].dot(one), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(l[1].dot(one), 0.0, 1e-12);
}

TEST_F(CurveLoadTest, SineDensityIntegratesToZero)
{
  const ComponentLoads l = load(CurveDensity::sine());
  EXPECT_NEAR(l[0].dot(unit_value_field(*d)), 0.0, 1e-12);
}

TEST_F(CurveLoadTest, SideIndependence)
{
  const CurveDensity f = CurveDensity::sine();
  const ComponentLoads in = load(f, CurveSide::inside);
  const ComponentLoads out = load(f, CurveSide::outside);
  EXPECT_LT((in[0] - out[0]).lpNorm<Eigen::Infinity>(), 1e-10);
  const ComponentLoads cin = load(CurveDensity::constant(1.0, 1.0), CurveSide::inside);
  const ComponentLoads cout = load(CurveDensity::constant(1.0, 1.0), CurveSide::outside);
  EXPECT_LT((cin[1] - cout[1]).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST_F(CurveLoadTest, Linearity)
{
  const double alpha = -2.5;
  const CurveDensity f1 = CurveDensity::sine();
  const CurveDensity f2 = CurveDensity::constant(0.3, -1.1);
  const CurveDensity mix{[&](double t) { return Vec2(alpha * f1(t) + f2(t)); }};
  const ComponentLoads l = load(mix), l1 = load(f1), l2 = load(f2);
  for (std::size_t c = 0; c < 2; ++c)
    EXPECT_LT((l[c] - (alpha * l1[c] + l2[c])).lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST_F(CurveLoadTest, BoundaryCurveEdgeIsRejected)
{
  EmbeddedCurve bad = curve;
  for (std::size_t e = 0; e < d->mesh.num_edges(); ++e)
    if (d->mesh.edges[e].boundary)
    {
      bad.segments[0] = static_cast<int>(e);
      break;
    }
  EXPECT_THROW(curve_load(d->mesh, bad, d->bases, d->dofmap, CurveDensity::constant(1, 1)),
               GeometryError);
}

TEST(VolumeLoad, ZeroAndUnitSources)
{
  const auto d = build_discretization(4);
  const ComponentLoads z
      = volume_load(d->mesh, d->bases, d->dofmap, [](const Vec2&) { return Vec2(0, 0); });
  EXPECT_EQ(z[0].norm() + z[1].norm(), 0.0);
  const ComponentLoads one
      = volume_load(d->mesh, d->bases, d->dofmap, [](const Vec2&) { return Vec2(1, 1); });
  const Vector u = unit_value_field(*d);
  EXPECT_NEAR(one[0].dot(u), 1.0, 1e-13);
  EXPECT_NEAR(one[1].dot(u), 1.0, 1e-13);
}

TEST(VolumeLoad, ManufacturedLoadIsExactAtDegree20)
{
  const auto d = build_discretization(8);
  const ManufacturedCase mc = manufactured_case(1.0);
  const auto f = [&](const Vec2& x) { return mc.source(x); };
  const ComponentLoads l20 = volume_load(d->mesh, d->bases, d->dofmap, f, 20);
  const ComponentLoads l22 = volume_load(d->mesh, d->bases, d->dofmap, f, 22);
  EXPECT_LE((l20[0] - l22[0]).lpNorm<Eigen::Infinity>(),
            1e-12 * l22[0].lpNorm<Eigen::Infinity>());
}
