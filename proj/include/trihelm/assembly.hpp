#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "element.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"

namespace trihelm
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Global numbering: vertex v owns 3v (value), 3v+1 (d/dx), 3v+2 (d/dy);
/// edge e owns 3V+2e (normal mean) and 3V+2e+1 (second normal mean).
struct DofMap
{
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  std::vector<bool> constrained;
  std::vector<int> free_index; ///< global -> reduced, -1 when constrained
  std::vector<int> free_to_global;

  std::size_t total() const { return constrained.size(); }
  std::size_t free_count() const { return free_to_global.size(); }
  std::size_t constrained_count() const { return total() - free_count(); }

  static int vertex_dof(int v, int component) { return 3 * v + component; }
  int edge_dof(int e, int moment) const
  {
    return static_cast<int>(3 * num_vertices) + 2 * e + moment;
  }

  /// Global indices of the 15 local DOFs of triangle t, in the local order of
  /// build_dof_functionals.
  std::array<int, local_dofs> cell_dofs(const Mesh& mesh, std::size_t t) const
  {
    std::array<int, local_dofs> d{};
    const auto& tri = mesh.triangles[t];
    for (std::size_t k = 0; k < 3; ++k)
    {
      d[k] = vertex_dof(tri[k], 0);
      d[3 + 2 * k] = vertex_dof(tri[k], 1);
      d[4 + 2 * k] = vertex_dof(tri[k], 2);
      d[9 + k] = edge_dof(mesh.triangle_edges[t][k], 0);
      d[12 + k] = edge_dof(mesh.triangle_edges[t][k], 1);
    }
    return d;
  }

  /// Full-length vector from a reduced one (constrained entries zero).
  Vector expand(const Vector& reduced) const
  {
    if (static_cast<std::size_t>(reduced.size()) != free_count())
      throw DimensionMismatch("reduced vector has " + std::to_string(reduced.size())
                              + " entries, expected " + std::to_string(free_count()));
    Vector full = Vector::Zero(static_cast<Eigen::Index>(total()));
    for (std::size_t i = 0; i < free_count(); ++i)
      full(free_to_global[i]) = reduced(static_cast<Eigen::Index>(i));
    return full;
  }

  Vector restrict(const Vector& full) const
  {
    if (static_cast<std::size_t>(full.size()) != total())
      throw DimensionMismatch("full vector has " + std::to_string(full.size())
                              + " entries, expected " + std::to_string(total()));
    Vector reduced(static_cast<Eigen::Index>(free_count()));
    for (std::size_t i = 0; i < free_count(); ++i)
      reduced(static_cast<Eigen::Index>(i)) = full(free_to_global[i]);
    return reduced;
  }
};

inline DofMap build_dofmap(const Mesh& mesh)
{
  DofMap map;
  map.num_vertices = mesh.num_vertices();
  map.num_edges = mesh.num_edges();
  map.constrained.assign(3 * map.num_vertices + 2 * map.num_edges, false);
  for (std::size_t v = 0; v < map.num_vertices; ++v)
    if (mesh.boundary_vertex[v])
      for (int c = 0; c < 3; ++c)
        map.constrained[static_cast<std::size_t>(DofMap::vertex_dof(static_cast<int>(v), c))]
            = true;
  for (std::size_t e = 0; e < map.num_edges; ++e)
    if (mesh.edges[e].boundary)
      for (int m = 0; m < 2; ++m)
        map.constrained[static_cast<std::size_t>(map.edge_dof(static_cast<int>(e), m))]
            = true;
  map.free_index.assign(map.total(), -1);
  for (std::size_t g = 0; g < map.total(); ++g)
    if (!map.constrained[g])
    {
      map.free_index[g] = static_cast<int>(map.free_to_global.size());
      map.free_to_global.push_back(static_cast<int>(g));
    }
  return map;
}

/// Weights C(3, j) b^j of the derivative pairings of order j = 0..3.
inline std::array<double, 4> pairing_weights(double b)
{
  return {1.0, 3.0 * b, 3.0 * b * b, b * b * b};
}

/// sum_j C(3,j) b^j <D^j u, D^j v> with full Frobenius pairings.
inline double energy_density(const Jet& u, const Jet& v, double b)
{
  const auto w = pairing_weights(b);
  double s = 0.0;
  for (int j = 0; j <= 3; ++j)
    s += w[static_cast<std::size_t>(j)] * frobenius(u, v, j);
  return s;
}

/// Quadrature points and weights of a reference rule mapped to triangle t.
inline std::vector<std::pair<Vec2, double>>
mapped_rule(const Mesh& mesh, std::size_t t, const quadrature::TriangleRule& rule)
{
  const auto c = mesh.corners(t);
  const double jac = 2.0 * std::abs(signed_area(c));
  std::vector<std::pair<Vec2, double>> pts;
  pts.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    const auto& p = rule.points[q];
    pts.emplace_back(c[0] + p[0] * (c[1] - c[0]) + p[1] * (c[2] - c[0]),
                     rule.weights[q] * jac);
  }
  return pts;
}

/// Local matrix of the broken form: mass + 3b grad + 3b^2 Hessian + b^3 third.
inline LocalMatrix local_stiffness(const Mesh& mesh, const ElementBasis& basis,
                                   double b,
                                   const quadrature::TriangleRule& rule
                                   = quadrature::assembly_rule())
{
  const auto w = pairing_weights(b);
  LocalMatrix a = LocalMatrix::Zero();
  for (const auto& [x, weight] : mapped_rule(mesh, basis.triangle(), rule))
  {
    const MonomialTable table = basis.physical_table(x);
    // derivative components of all basis functions, Frobenius-weighted
    Eigen::Matrix<double, local_dofs, 10> d = basis.coefficients() * table;
    Eigen::Matrix<double, local_dofs, 10> dw = d;
    dw.col(0) *= w[0];
    dw.middleCols<2>(1) *= w[1];
    dw.col(3) *= w[2];
    dw.col(4) *= 2.0 * w[2];
    dw.col(5) *= w[2];
    dw.col(6) *= w[3];
    dw.col(7) *= 3.0 * w[3];
    dw.col(8) *= 3.0 * w[3];
    dw.col(9) *= w[3];
    a.noalias() += weight * (dw * d.transpose());
  }
  return 0.5 * (a + a.transpose());
}

enum class Constraints
{
  apply, ///< reduced system over free DOFs
  none   ///< diagnostic: every DOF kept
};

/// Symmetric positive definite operator of one scalar component together
/// with the DOF numbering it acts on. Both vector components share it.
struct LinearSystem
{
  SparseMatrix matrix;
  double b = 1.0;
  Constraints constraints = Constraints::apply;
  int components = 2;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Assembles a_h for one scalar component. Constrained rows and columns are
/// eliminated (homogeneous data), unless constraints are disabled.
inline LinearSystem assemble_stiffness(const Mesh& mesh,
                                       const std::vector<ElementBasis>& bases,
                                       const DofMap& dofmap, double b,
                                       Constraints constraints = Constraints::apply)
{
  if (bases.size() != mesh.num_triangles())
    throw UnisolvencyError("missing element bases: have "
                           + std::to_string(bases.size()) + ", need "
                           + std::to_string(mesh.num_triangles()));
  if (!(b > 0.0))
    throw Error("b must be positive");
  const bool reduce = constraints == Constraints::apply;
  const auto n = static_cast<Eigen::Index>(reduce ? dofmap.free_count() : dofmap.total());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.num_triangles() * local_dofs * local_dofs);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
  {
    const LocalMatrix a = local_stiffness(mesh, bases[t], b);
    const auto dofs = dofmap.cell_dofs(mesh, t);
    for (int i = 0; i < local_dofs; ++i)
    {
      const int gi = dofs[static_cast<std::size_t>(i)];
      const int ri = reduce ? dofmap.free_index[static_cast<std::size_t>(gi)] : gi;
      if (ri < 0)
        continue;
      for (int j = 0; j < local_dofs; ++j)
      {
        const int gj = dofs[static_cast<std::size_t>(j)];
        const int rj = reduce ? dofmap.free_index[static_cast<std::size_t>(gj)] : gj;
        if (rj < 0)
          continue;
        triplets.emplace_back(ri, rj, a(i, j));
      }
    }
  }
  LinearSystem sys;
  sys.b = b;
  sys.constraints = constraints;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

/// sqrt(sum over components of a_h(v, v)).
inline double energy_norm(const LinearSystem& system, const std::vector<Vector>& components)
{
  double s = 0.0;
  for (const Vector& v : components)
  {
    if (v.size() != system.size())
      throw DimensionMismatch("coefficient vector has " + std::to_string(v.size())
                              + " entries, system has " + std::to_string(system.size()));
    s += v.dot(system.matrix * v);
  }
  return std::sqrt(std::max(s, 0.0));
}

inline double energy_norm(const LinearSystem& system, const Vector& v)
{
  return energy_norm(system, std::vector<Vector>{v});
}

} // namespace trihelm
