#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "assembly.hpp"
#include "element.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace trihelm
{

inline constexpr int load_rule_degree = 20;

/// Density of the curve functional: theta in [0, 2pi] -> R^2. The evaluator
/// must be safe to call concurrently.
struct CurveDensity
{
  std::function<Vec2(double)> evaluate;

  static CurveDensity constant(double fx, double fy)
  {
    return {[fx, fy](double) { return Vec2(fx, fy); }};
  }
  static CurveDensity sine()
  {
    return {[](double theta) { return Vec2(std::sin(theta), 0.0); }};
  }

  Vec2 operator()(double theta) const { return evaluate(theta); }
};

/// Per-component load vectors over the full DOF numbering.
using ComponentLoads = std::array<Vector, 2>;

enum class CurveSide
{
  inside,
  outside
};

/// f(v) = int_{S^1} ftilde . v(g(theta)) dtheta, with g linear on each
/// segment's theta span. v is evaluated from one side of each curve edge;
/// by continuity of the space either side gives the same functional.
inline ComponentLoads curve_load(const Mesh& mesh, const EmbeddedCurve& curve,
                                 const std::vector<ElementBasis>& bases,
                                 const DofMap& dofmap, const CurveDensity& density,
                                 CurveSide side = CurveSide::inside)
{
  ComponentLoads load;
  for (Vector& l : load)
    l = Vector::Zero(static_cast<Eigen::Index>(dofmap.total()));
  const auto& rule = quadrature::segment_rule(7);
  for (std::size_t s = 0; s < curve.segments.size(); ++s)
  {
    const Edge& edge = mesh.edges[static_cast<std::size_t>(curve.segments[s])];
    if (edge.triangle_count() != 2)
      throw GeometryError("curve edge " + std::to_string(curve.segments[s])
                          + " lacks two adjacent triangles");
    const bool want_inside = side == CurveSide::inside;
    int tri = edge.triangles[0];
    if (curve.is_inside[static_cast<std::size_t>(tri)] != want_inside)
      tri = edge.triangles[1];
    const auto t = static_cast<std::size_t>(tri);
    const Vec2& p0 = mesh.vertices[static_cast<std::size_t>(curve.segment_vertices[s][0])];
    const Vec2& p1 = mesh.vertices[static_cast<std::size_t>(curve.segment_vertices[s][1])];
    const auto [theta0, theta1] = curve.theta_spans[s];
    const auto dofs = dofmap.cell_dofs(mesh, t);
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double u = rule.points[q][0];
      const double w = rule.weights[q] * (theta1 - theta0);
      const Vec2 f = density(theta0 + u * (theta1 - theta0));
      const auto phi = bases[t].eval(p0 + u * (p1 - p0), 0);
      for (std::size_t k = 0; k < local_dofs; ++k)
        for (std::size_t c = 0; c < 2; ++c)
          load[c](dofs[k]) += w * f(static_cast<Eigen::Index>(c)) * phi[k].value;
    }
  }
  return load;
}

/// Standard int_Omega f . v per component.
inline ComponentLoads volume_load(const Mesh& mesh, const std::vector<ElementBasis>& bases,
                                  const DofMap& dofmap,
                                  const std::function<Vec2(const Vec2&)>& f,
                                  int rule_degree = load_rule_degree)
{
  ComponentLoads load;
  for (Vector& l : load)
    l = Vector::Zero(static_cast<Eigen::Index>(dofmap.total()));
  const auto rule = quadrature::triangle_rule(rule_degree);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
  {
    LocalVector local[2] = {LocalVector::Zero(), LocalVector::Zero()};
    for (const auto& [x, weight] : mapped_rule(mesh, t, rule))
    {
      const Vec2 fx = f(x);
      const MonomialTable table = bases[t].physical_table(x);
      const LocalVector phi = bases[t].coefficients() * table.col(0);
      local[0] += weight * fx.x() * phi;
      local[1] += weight * fx.y() * phi;
    }
    const auto dofs = dofmap.cell_dofs(mesh, t);
    for (std::size_t k = 0; k < local_dofs; ++k)
      for (std::size_t c = 0; c < 2; ++c)
        load[c](dofs[k]) += local[c](static_cast<Eigen::Index>(k));
  }
  return load;
}

/// (id - b Laplacian)^3 u = u - 3b Lu + 3b^2 L^2 u - b^3 L^3 u.
inline Polynomial2D apply_B(const Polynomial2D& u, double b)
{
  const Polynomial2D l1 = u.laplacian();
  const Polynomial2D l2 = l1.laplacian();
  const Polynomial2D l3 = l2.laplacian();
  return u - (3.0 * b) * l1 + (3.0 * b * b) * l2 - (b * b * b) * l3;
}

/// u*(x, y) = [x(1-x) y(1-y)]^3, used for both components, and f* = B u*.
struct ManufacturedCase
{
  double b = 1.0;
  Polynomial2D u;
  Polynomial2D f;
  PolynomialJet u_jet;

  Jet solution(const Vec2& x) const { return u_jet(x); }
  Vec2 source(const Vec2& x) const
  {
    const double v = f(x.x(), x.y());
    return {v, v};
  }
};

inline ManufacturedCase manufactured_case(double b)
{
  if (!(b > 0.0))
    throw Error("b must be positive");
  const Polynomial2D sx = Polynomial2D::affine(0.0, 1.0, 0.0)
                          * Polynomial2D::affine(1.0, -1.0, 0.0);
  const Polynomial2D sy = Polynomial2D::affine(0.0, 0.0, 1.0)
                          * Polynomial2D::affine(1.0, 0.0, -1.0);
  ManufacturedCase mc;
  mc.b = b;
  mc.u = (sx * sy).pow(3);
  mc.f = apply_B(mc.u, b);
  mc.u_jet = PolynomialJet(mc.u);
  return mc;
}

} // namespace trihelm
