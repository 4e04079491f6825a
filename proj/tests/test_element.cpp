#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <trihelm/checks.hpp>
#include <trihelm/element.hpp>

using namespace trihelm;

namespace
{

const std::array<Vec2, 3> reference{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};

struct SingleElement
{
  Mesh mesh;
  std::vector<Vec2> normals;
  DofFunctionals functionals;
  ElementBasis basis;

  explicit SingleElement(const std::array<Vec2, 3>& corners)
      : mesh(single_triangle_mesh(corners)), normals(global_edge_normals(mesh)),
        functionals(build_dof_functionals(mesh, 0, normals)),
        basis(build_nodal_basis(mesh, 0, functionals))
  {
  }

  /// Jet at x of the element interpolant of the polynomial p.
  Jet interpolant(const PolynomialJet& p, const Vec2& x) const
  {
    const LocalVector dofs = apply_functionals(functionals, [&](const Vec2& y) { return p(y); });
    return basis.eval_combination(dofs, x);
  }
};

Vec2 random_point_in(const std::array<Vec2, 3>& c, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a + b > 1.0)
  {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return c[0] + a * (c[1] - c[0]) + b * (c[2] - c[0]);
}

} // namespace

TEST(Bubble, ValuesAtCharacteristicPoints)
{
  const Vec2 centroid = (reference[0] + reference[1] + reference[2]) / 3.0;
  EXPECT_NEAR(bubble(reference, centroid).value, 1.0, 1e-14);
  for (int k = 0; k < 3; ++k)
  {
    const Vec2 a = reference[static_cast<std::size_t>(k)];
    const Vec2 b = reference[static_cast<std::size_t>((k + 1) % 3)];
    EXPECT_NEAR(bubble(reference, a).value, 0.0, 1e-14);
    EXPECT_NEAR(bubble(reference, 0.5 * (a + b)).value, 0.0, 1e-14);
  }
  EXPECT_NEAR(bubble(reference, Vec2(0.25, 0.25)).value, 27.0 / 32.0, 1e-14);
  // maximum at the centroid: gradient vanishes there
  EXPECT_NEAR(bubble(reference, centroid).gradient().norm(), 0.0, 1e-13);
}

TEST(Bubble, DegenerateTriangleThrows)
{
  const std::array<Vec2, 3> flat{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
  EXPECT_THROW(bubble(flat, Vec2(0.5, 0.0)), DegenerateTriangle);
}

TEST(Generators, RankFifteenAndContainP3)
{
  const Vec2 centre(1.0 / 3.0, 1.0 / 3.0);
  const auto g = shape_generators(reference, centre, std::sqrt(2.0));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  EXPECT_EQ(lu.rank(), 15);
  // the naive list with q * 1 included is rank deficient
  Eigen::MatrixXd naive(16, num_monomials);
  naive.topRows(15) = g;
  naive.row(15) = to_monomial_row(bubble_polynomial(reference, centre, std::sqrt(2.0)));
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(naive).rank(), 15);
}

TEST(Functionals, CountAndSharedEdgeFunctionals)
{
  const Mesh m = build_unit_square_mesh(4);
  const auto normals = global_edge_normals(m);
  for (const Edge& e : m.edges)
  {
    if (e.boundary)
      continue;
    const auto fa = build_dof_functionals(m, static_cast<std::size_t>(e.triangles[0]), normals);
    const auto fb = build_dof_functionals(m, static_cast<std::size_t>(e.triangles[1]), normals);
    EXPECT_EQ(fa.size(), 15u);
    int matched = 0;
    for (const DofFunctional& a : fa)
      for (const DofFunctional& b : fb)
      {
        if (a.kind != b.kind || a.kind < DofKind::edge_normal_mean)
          continue;
        const int edge = &e - m.edges.data();
        if (a.anchor != edge || b.anchor != edge)
          continue;
        ++matched;
        EXPECT_EQ(a.normal, b.normal);
        // same functional: equal values on a generic smooth function
        const auto f = [](const Vec2& x) {
          return PolynomialJet(Polynomial2D::monomial(3, 2) + Polynomial2D::monomial(1, 4))(x);
        };
        EXPECT_NEAR(a.apply(f), b.apply(f), 1e-14);
      }
    EXPECT_EQ(matched, 2);
  }
}

TEST(Functionals, GlobalNormalConvention)
{
  const Mesh m = build_unit_square_mesh(3);
  const auto normals = global_edge_normals(m);
  for (std::size_t e = 0; e < m.num_edges(); ++e)
  {
    const Vec2 t = (m.vertices[static_cast<std::size_t>(m.edges[e].vertices[1])]
                    - m.vertices[static_cast<std::size_t>(m.edges[e].vertices[0])])
                       .normalized();
    EXPECT_LT(m.edges[e].vertices[0], m.edges[e].vertices[1]);
    EXPECT_NEAR((normals[e] - Vec2(-t.y(), t.x())).norm(), 0.0, 1e-15);
  }
}

TEST(Functionals, AffineAndCoordinateExamples)
{
  const PolynomialJet affine(Polynomial2D::affine(0.7, -1.3, 2.1));
  const Mesh m = build_unit_square_mesh(2);
  const auto normals = global_edge_normals(m);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
  {
    const auto f = build_dof_functionals(m, t, normals);
    for (std::size_t k = 12; k < 15; ++k)
      EXPECT_NEAR(f[k].apply(affine), 0.0, 1e-14);
  }
  const PolynomialJet x(Polynomial2D::monomial(1, 0));
  const auto horizontal = detail::edge_functional(DofKind::edge_normal_mean, 0, Vec2(0, 0),
                                                  Vec2(1, 0), Vec2(0, 1));
  const auto vertical = detail::edge_functional(DofKind::edge_normal_mean, 0, Vec2(0, 0),
                                                Vec2(0, 1), Vec2(1, 0));
  EXPECT_NEAR(horizontal.apply(x), 0.0, 1e-15);
  EXPECT_NEAR(vertical.apply(x), 1.0, 1e-15);
}

TEST(NodalBasis, DualityOnReferenceTriangle)
{
  const SingleElement el(reference);
  EXPECT_LE(duality_error(el.functionals, el.basis), 1e-9);
}

TEST(NodalBasis, DualityOnRandomShapeRegularTriangles)
{
  EXPECT_LE(unisolvency_sweep(100, 7, {}), 1e-9);
}

TEST(NodalBasis, ReproducesRandomCubics)
{
  std::mt19937_64 rng(42);
  const SingleElement el(reference);
  for (int i = 0; i < 20; ++i)
  {
    const Polynomial2D p = random_cubic(rng);
    const PolynomialJet pj(p);
    for (int k = 0; k < 20; ++k)
    {
      const Vec2 x = random_point_in(reference, rng);
      EXPECT_NEAR(el.interpolant(pj, x).value, p(x.x(), x.y()), 1e-9);
    }
  }
}

TEST(NodalBasis, ConditionIsMeshSizeIndependent)
{
  const Mesh coarse = build_unit_square_mesh(8);
  const Mesh fine = build_unit_square_mesh(64);
  const double c8 = build_all_bases(coarse)[0].condition();
  const double c64 = build_all_bases(fine)[0].condition();
  EXPECT_LT(std::max(c8, c64) / std::min(c8, c64), 10.0);
}

TEST(NodalBasis, PartitionOfUnity)
{
  const SingleElement el(reference);
  const PolynomialJet one(Polynomial2D::constant(1.0));
  const LocalVector dofs = apply_functionals(el.functionals, [&](const Vec2& y) { return one(y); });
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k)
  {
    const Vec2 x = random_point_in(reference, rng);
    const auto phi = el.basis.eval(x);
    double s = 0.0;
    for (std::size_t i = 0; i < local_dofs; ++i)
      s += phi[i].value * dofs(static_cast<Eigen::Index>(i));
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(NodalBasis, ThirdDerivativesOfXCubed)
{
  const SingleElement el(reference);
  const PolynomialJet p(Polynomial2D::monomial(3, 0));
  const Jet j = el.interpolant(p, Vec2(0.2, 0.3));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        EXPECT_NEAR(j.third_tensor(a, b, c), (a + b + c == 0) ? 6.0 : 0.0, 1e-9);
}

TEST(NodalBasis, GradientOfX2Y)
{
  const SingleElement el(std::array<Vec2, 3>{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)});
  const PolynomialJet p(Polynomial2D::monomial(2, 1));
  const Jet j = el.interpolant(p, Vec2(0.5, 0.5));
  EXPECT_NEAR(j.grad[0], 0.5, 1e-10);
  EXPECT_NEAR(j.grad[1], 0.25, 1e-10);
}

TEST(NodalBasis, DerivativesMatchFiniteDifferences)
{
  const std::array<Vec2, 3> tri{Vec2(0.1, 0.2), Vec2(0.5, 0.15), Vec2(0.3, 0.6)};
  const SingleElement el(tri);
  const Vec2 x = (tri[0] + tri[1] + tri[2]) / 3.0;
  const double step = 1e-4;
  const auto at = [&](const Vec2& y) { return el.basis.eval(y); };
  const auto jx_p = at(x + Vec2(step, 0)), jx_m = at(x - Vec2(step, 0));
  const auto jy_p = at(x + Vec2(0, step)), jy_m = at(x - Vec2(0, step));
  const auto j = at(x);
  for (std::size_t k = 0; k < local_dofs; ++k)
  {
    double scale = 1.0;
    for (double c : j[k].components())
      scale = std::max(scale, std::abs(c));
    // grad from values
    EXPECT_NEAR((jx_p[k].value - jx_m[k].value) / (2 * step), j[k].grad[0], 1e-6 * scale);
    EXPECT_NEAR((jy_p[k].value - jy_m[k].value) / (2 * step), j[k].grad[1], 1e-6 * scale);
    // Hessian from gradients
    EXPECT_NEAR((jx_p[k].grad[0] - jx_m[k].grad[0]) / (2 * step), j[k].hess[0], 1e-5 * scale);
    EXPECT_NEAR((jy_p[k].grad[0] - jy_m[k].grad[0]) / (2 * step), j[k].hess[1], 1e-5 * scale);
    EXPECT_NEAR((jx_p[k].grad[1] - jx_m[k].grad[1]) / (2 * step), j[k].hess[1], 1e-5 * scale);
    // third tensor from Hessians: symmetric in every index permutation
    EXPECT_NEAR((jx_p[k].hess[0] - jx_m[k].hess[0]) / (2 * step), j[k].third[0], 1e-4 * scale);
    EXPECT_NEAR((jy_p[k].hess[0] - jy_m[k].hess[0]) / (2 * step), j[k].third[1], 1e-4 * scale);
    EXPECT_NEAR((jx_p[k].hess[1] - jx_m[k].hess[1]) / (2 * step), j[k].third[1], 1e-4 * scale);
    EXPECT_NEAR((jy_p[k].hess[1] - jy_m[k].hess[1]) / (2 * step), j[k].third[2], 1e-4 * scale);
    EXPECT_NEAR((jx_p[k].hess[2] - jx_m[k].hess[2]) / (2 * step), j[k].third[2], 1e-4 * scale);
    EXPECT_NEAR((jy_p[k].hess[2] - jy_m[k].hess[2]) / (2 * step), j[k].third[3], 1e-4 * scale);
  }
}
