#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "jet.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace trihelm
{

inline constexpr int local_dofs = 15;
inline constexpr int shape_degree = 7;
inline constexpr int num_monomials = (shape_degree + 1) * (shape_degree + 2) / 2;

using LocalMatrix = Eigen::Matrix<double, local_dofs, local_dofs>;
using LocalVector = Eigen::Matrix<double, local_dofs, 1>;

/// One fixed unit normal per mesh edge: the edge vector from the lower to the
/// higher vertex index, rotated counterclockwise.
inline std::vector<Vec2> global_edge_normals(const Mesh& mesh)
{
  std::vector<Vec2> normals;
  normals.reserve(mesh.num_edges());
  for (const Edge& e : mesh.edges)
  {
    const Vec2 t = (mesh.vertices[static_cast<std::size_t>(e.vertices[1])]
                    - mesh.vertices[static_cast<std::size_t>(e.vertices[0])])
                       .normalized();
    normals.emplace_back(-t.y(), t.x());
  }
  return normals;
}

// ---------------------------------------------------------------------------
// Degree-of-freedom functionals

enum class DofKind
{
  vertex_value,
  vertex_gradient_x,
  vertex_gradient_y,
  edge_normal_mean,
  edge_second_normal_mean
};

/// A weighted combination of jet components (ordered as Jet::components())
/// at one point.
struct StencilPoint
{
  Vec2 point;
  std::array<double, 10> weights{};
};

struct DofFunctional
{
  DofKind kind = DofKind::vertex_value;
  int anchor = 0; ///< vertex or edge index
  Vec2 normal = Vec2::Zero();
  std::vector<StencilPoint> stencil;

  /// Derivative order (homogeneity degree) of the functional.
  int order() const
  {
    switch (kind)
    {
    case DofKind::vertex_value:
      return 0;
    case DofKind::edge_second_normal_mean:
      return 2;
    default:
      return 1;
    }
  }

  template <typename JetFn>
  double apply(JetFn&& jet) const
  {
    double s = 0.0;
    for (const StencilPoint& sp : stencil)
    {
      const auto c = jet(sp.point).components();
      for (std::size_t i = 0; i < 10; ++i)
        s += sp.weights[i] * c[i];
    }
    return s;
  }
};

using DofFunctionals = std::array<DofFunctional, local_dofs>;

namespace detail
{
inline DofFunctional vertex_functional(DofKind kind, int vertex, const Vec2& p)
{
  DofFunctional f;
  f.kind = kind;
  f.anchor = vertex;
  StencilPoint sp{p, {}};
  sp.weights[kind == DofKind::vertex_value        ? 0
             : kind == DofKind::vertex_gradient_x ? 1
                                                   : 2]
      = 1.0;
  f.stencil.push_back(sp);
  return f;
}

/// Length-normalised edge mean of the first or second normal derivative.
inline DofFunctional edge_functional(DofKind kind, int edge, const Vec2& p0,
                                     const Vec2& p1, const Vec2& normal)
{
  DofFunctional f;
  f.kind = kind;
  f.anchor = edge;
  f.normal = normal;
  const auto& rule = quadrature::edge_rule();
  const double nx = normal.x(), ny = normal.y();
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    const double s = rule.points[q][0];
    StencilPoint sp{p0 + s * (p1 - p0), {}};
    const double w = rule.weights[q];
    if (kind == DofKind::edge_normal_mean)
    {
      sp.weights[1] = w * nx;
      sp.weights[2] = w * ny;
    }
    else
    {
      sp.weights[3] = w * nx * nx;
      sp.weights[4] = w * 2.0 * nx * ny;
      sp.weights[5] = w * ny * ny;
    }
    f.stencil.push_back(sp);
  }
  return f;
}
} // namespace detail

/// The 15 functionals of triangle t in canonical order: 3 vertex values,
/// 6 vertex gradient components (x, y per vertex), 3 edge normal means,
/// 3 edge second-normal means. Local edge k joins local vertices k and k+1.
inline DofFunctionals build_dof_functionals(const Mesh& mesh, std::size_t t,
                                            const std::vector<Vec2>& global_normals)
{
  DofFunctionals f;
  const auto& tri = mesh.triangles[t];
  const auto c = mesh.corners(t);
  for (std::size_t k = 0; k < 3; ++k)
  {
    f[k] = detail::vertex_functional(DofKind::vertex_value, tri[k], c[k]);
    f[3 + 2 * k] = detail::vertex_functional(DofKind::vertex_gradient_x, tri[k], c[k]);
    f[4 + 2 * k] = detail::vertex_functional(DofKind::vertex_gradient_y, tri[k], c[k]);
    const int e = mesh.triangle_edges[t][k];
    const Vec2& nu = global_normals[static_cast<std::size_t>(e)];
    const Vec2& p0 = c[k];
    const Vec2& p1 = c[(k + 1) % 3];
    f[9 + k] = detail::edge_functional(DofKind::edge_normal_mean, e, p0, p1, nu);
    f[12 + k]
        = detail::edge_functional(DofKind::edge_second_normal_mean, e, p0, p1, nu);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Monomials and generators in centred, scaled coordinates

/// Index of x^p y^q among the monomials of degree <= 7, graded ordering.
constexpr int monomial_index(int p, int q)
{
  const int d = p + q;
  return d * (d + 1) / 2 + q;
}

using MonomialTable = Eigen::Matrix<double, num_monomials, 10>;

/// All partial derivatives up to order 3 of every monomial of degree <= 7 at
/// (x, y); column order as Jet::components().
inline MonomialTable monomial_table(double x, double y)
{
  std::array<double, shape_degree + 1> px{}, py{};
  px[0] = py[0] = 1.0;
  for (std::size_t i = 1; i <= shape_degree; ++i)
  {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
  }
  // falling factorial p (p-1) ... (p-a+1) * x^(p-a)
  const auto dpow = [](const std::array<double, shape_degree + 1>& pw, int p, int a) {
    if (a > p)
      return 0.0;
    double f = 1.0;
    for (int i = 0; i < a; ++i)
      f *= p - i;
    return f * pw[static_cast<std::size_t>(p - a)];
  };
  MonomialTable t;
  static constexpr std::array<std::array<int, 2>, 10> orders{
      {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};
  for (int d = 0; d <= shape_degree; ++d)
    for (int q = 0; q <= d; ++q)
    {
      const int p = d - q;
      const int m = monomial_index(p, q);
      for (int c = 0; c < 10; ++c)
      {
        const auto [a, b] = orders[static_cast<std::size_t>(c)];
        t(m, c) = dpow(px, p, a) * dpow(py, q, b);
      }
    }
  return t;
}

inline Eigen::Matrix<double, 1, num_monomials>
to_monomial_row(const Polynomial2D& p)
{
  Eigen::Matrix<double, 1, num_monomials> row
      = Eigen::Matrix<double, 1, num_monomials>::Zero();
  for (int d = 0; d <= std::min(p.degree(), shape_degree); ++d)
    for (int q = 0; q <= d; ++q)
      row(monomial_index(d - q, q)) = p.coeff(d - q, q);
  return row;
}

/// Barycentric coordinates as affine polynomials of the variables
/// xi = (x - centre) / scale.
inline std::array<Polynomial2D, 3> barycentric_polynomials(
    const std::array<Vec2, 3>& corners, const Vec2& centre, double scale)
{
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
  {
    const Vec2 xi = (corners[static_cast<std::size_t>(i)] - centre) / scale;
    m.row(i) << 1.0, xi.x(), xi.y();
  }
  const Eigen::Matrix3d inv = m.inverse();
  std::array<Polynomial2D, 3> lambda;
  for (int i = 0; i < 3; ++i)
    lambda[static_cast<std::size_t>(i)]
        = Polynomial2D::affine(inv(0, i), inv(1, i), inv(2, i));
  return lambda;
}

/// q = 27 l0 l1 l2 in the variables (x - centre) / scale.
inline Polynomial2D bubble_polynomial(const std::array<Vec2, 3>& corners,
                                      const Vec2& centre = Vec2::Zero(),
                                      double scale = 1.0)
{
  if (signed_area(corners) <= 0.0)
    throw DegenerateTriangle("triangle has non-positive signed area");
  const auto l = barycentric_polynomials(corners, centre, scale);
  return 27.0 * (l[0] * l[1] * l[2]);
}

/// Bubble value and derivatives (physical coordinates) at point.
inline Jet bubble(const std::array<Vec2, 3>& corners, const Vec2& point)
{
  return PolynomialJet(bubble_polynomial(corners))(point);
}

/// Generators of P3 + q P1 + q^2 P1 in local coordinates (q * 1 is a cubic
/// and therefore omitted): the 10 cubic monomials, q xi, q eta, q^2,
/// q^2 xi, q^2 eta. Rows are monomial coefficient vectors.
inline Eigen::Matrix<double, local_dofs, num_monomials>
shape_generators(const std::array<Vec2, 3>& corners, const Vec2& centre, double scale)
{
  Eigen::Matrix<double, local_dofs, num_monomials> g
      = Eigen::Matrix<double, local_dofs, num_monomials>::Zero();
  int row = 0;
  for (int d = 0; d <= 3; ++d)
    for (int q = 0; q <= d; ++q)
      g(row++, monomial_index(d - q, q)) = 1.0;
  const Polynomial2D bubble = bubble_polynomial(corners, centre, scale);
  const Polynomial2D bubble2 = bubble * bubble;
  const Polynomial2D xi = Polynomial2D::monomial(1, 0);
  const Polynomial2D eta = Polynomial2D::monomial(0, 1);
  g.row(row++) = to_monomial_row(bubble * xi);
  g.row(row++) = to_monomial_row(bubble * eta);
  g.row(row++) = to_monomial_row(bubble2);
  g.row(row++) = to_monomial_row(bubble2 * xi);
  g.row(row++) = to_monomial_row(bubble2 * eta);
  return g;
}

// ---------------------------------------------------------------------------
// Nodal basis

/// Nodal basis of one physical triangle, dual to its DOF functionals. Each
/// basis function is stored by its monomial coefficients in
/// xi = (x - centroid) / h_K.
class ElementBasis
{
public:
  ElementBasis() = default;

  ElementBasis(std::size_t triangle, Vec2 centre, double scale,
               Eigen::Matrix<double, local_dofs, num_monomials> coefficients,
               double condition)
      : _triangle(triangle), _centre(std::move(centre)), _scale(scale),
        _coefficients(std::move(coefficients)), _condition(condition)
  {
  }

  std::size_t triangle() const { return _triangle; }
  const Vec2& centre() const { return _centre; }
  double scale() const { return _scale; }
  double condition() const { return _condition; }
  const Eigen::Matrix<double, local_dofs, num_monomials>& coefficients() const
  {
    return _coefficients;
  }

  /// Physical derivatives up to order 3 of the monomials at x.
  MonomialTable physical_table(const Vec2& x) const
  {
    const Vec2 xi = (x - _centre) / _scale;
    MonomialTable t = monomial_table(xi.x(), xi.y());
    const double s1 = 1.0 / _scale;
    t.middleCols<2>(1) *= s1;
    t.middleCols<3>(3) *= s1 * s1;
    t.middleCols<4>(6) *= s1 * s1 * s1;
    return t;
  }

  /// Value and derivatives of all 15 basis functions at x. Derivatives above
  /// max_order are left zero.
  std::array<Jet, local_dofs> eval(const Vec2& x, int max_order = 3) const
  {
    const MonomialTable t = physical_table(x);
    const int ncols = max_order >= 3 ? 10 : max_order == 2 ? 6 : max_order == 1 ? 3 : 1;
    const Eigen::Matrix<double, local_dofs, Eigen::Dynamic> r
        = _coefficients * t.leftCols(ncols);
    std::array<Jet, local_dofs> out;
    for (int k = 0; k < local_dofs; ++k)
    {
      std::array<double, 10> c{};
      for (int j = 0; j < ncols; ++j)
        c[static_cast<std::size_t>(j)] = r(k, j);
      out[static_cast<std::size_t>(k)] = Jet::from_components(c);
    }
    return out;
  }

  /// Jet of sum_k coeffs[k] l_k at x.
  Jet eval_combination(const LocalVector& coeffs, const Vec2& x) const
  {
    const MonomialTable t = physical_table(x);
    const Eigen::Matrix<double, 1, 10> r = coeffs.transpose() * _coefficients * t;
    std::array<double, 10> c{};
    for (int j = 0; j < 10; ++j)
      c[static_cast<std::size_t>(j)] = r(j);
    return Jet::from_components(c);
  }

private:
  std::size_t _triangle = 0;
  Vec2 _centre = Vec2::Zero();
  double _scale = 1.0;
  Eigen::Matrix<double, local_dofs, num_monomials> _coefficients
      = Eigen::Matrix<double, local_dofs, num_monomials>::Zero();
  double _condition = 0.0;
};

inline constexpr double max_vandermonde_condition = 1e12;

/// Solves the generalised Vandermonde system (functional i applied to
/// generator k) in local coordinates, where every functional becomes
/// h_K-independent, and rescales to the physical dual basis.
inline ElementBasis build_nodal_basis(const Mesh& mesh, std::size_t t,
                                      const DofFunctionals& functionals)
{
  const auto corners = mesh.corners(t);
  if (signed_area(corners) <= 0.0)
    throw DegenerateTriangle("triangle " + std::to_string(t)
                             + " has non-positive signed area");
  const Vec2 centre = mesh.centroid(t);
  const double scale = diameter(corners);
  const auto gen = shape_generators(corners, centre, scale);

  // F(i, m): local-coordinate functional i applied to monomial m
  Eigen::Matrix<double, local_dofs, num_monomials> f
      = Eigen::Matrix<double, local_dofs, num_monomials>::Zero();
  for (int i = 0; i < local_dofs; ++i)
    for (const StencilPoint& sp : functionals[static_cast<std::size_t>(i)].stencil)
    {
      const Vec2 xi = (sp.point - centre) / scale;
      const MonomialTable table = monomial_table(xi.x(), xi.y());
      const Eigen::Map<const Eigen::Matrix<double, 10, 1>> w(sp.weights.data());
      f.row(i) += (table * w).transpose();
    }
  const LocalMatrix vandermonde = f * gen.transpose();
  const Eigen::PartialPivLU<LocalMatrix> lu(vandermonde);
  const LocalMatrix inverse = lu.inverse();
  const double condition = vandermonde.cwiseAbs().colwise().sum().maxCoeff()
                           * inverse.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(condition) || condition > max_vandermonde_condition)
    throw UnisolvencyError("Vandermonde matrix of triangle " + std::to_string(t)
                           + " is numerically singular (condition "
                           + std::to_string(condition) + ")");
  Eigen::Matrix<double, local_dofs, num_monomials> coeffs = inverse.transpose() * gen;
  for (int k = 0; k < local_dofs; ++k)
    coeffs.row(k) *= std::pow(scale, functionals[static_cast<std::size_t>(k)].order());
  return ElementBasis(t, centre, scale, std::move(coeffs), condition);
}

/// Bases for every triangle of the mesh.
inline std::vector<ElementBasis> build_all_bases(const Mesh& mesh,
                                                 const std::vector<Vec2>& normals)
{
  std::vector<ElementBasis> bases;
  bases.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    bases.push_back(build_nodal_basis(mesh, t, build_dof_functionals(mesh, t, normals)));
  return bases;
}

inline std::vector<ElementBasis> build_all_bases(const Mesh& mesh)
{
  return build_all_bases(mesh, global_edge_normals(mesh));
}

/// Applies all 15 functionals of triangle t to a field given by its jet.
template <typename JetFn>
LocalVector apply_functionals(const DofFunctionals& functionals, JetFn&& jet)
{
  LocalVector v;
  for (int i = 0; i < local_dofs; ++i)
    v(i) = functionals[static_cast<std::size_t>(i)].apply(jet);
  return v;
}

} // namespace trihelm
