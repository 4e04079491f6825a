#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace trihelm
{

struct Edge
{
  std::array<int, 2> vertices{}; ///< lower index first
  std::array<int, 2> triangles{-1, -1};
  bool boundary = false;

  int triangle_count() const { return triangles[1] < 0 ? 1 : 2; }
};

/// Conforming triangulation of the unit square. Immutable once built.
struct Mesh
{
  int n = 0; ///< cells per side
  double h = 0.0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles; ///< counterclockwise
  std::vector<std::array<int, 3>> triangle_edges; ///< local edge k = (v_k, v_{k+1})
  std::vector<Edge> edges;
  std::vector<bool> boundary_vertex;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  std::size_t num_edges() const { return edges.size(); }

  std::array<Vec2, 3> corners(std::size_t t) const
  {
    const auto& tri = triangles[t];
    return {vertices[static_cast<std::size_t>(tri[0])],
            vertices[static_cast<std::size_t>(tri[1])],
            vertices[static_cast<std::size_t>(tri[2])]};
  }

  Vec2 centroid(std::size_t t) const
  {
    const auto c = corners(t);
    return (c[0] + c[1] + c[2]) / 3.0;
  }

  /// Index of the edge joining vertices a and b, or -1.
  int find_edge(int a, int b) const
  {
    if (a > b)
      std::swap(a, b);
    const auto it = _edge_lookup.find({a, b});
    return it == _edge_lookup.end() ? -1 : it->second;
  }

  /// Triangle containing p (structured meshes only). Points on shared edges
  /// resolve to one of the adjacent triangles.
  std::size_t locate(const Vec2& p) const
  {
    const int i = std::clamp(static_cast<int>(std::floor(p.x() * n)), 0, n - 1);
    const int j = std::clamp(static_cast<int>(std::floor(p.y() * n)), 0, n - 1);
    const double dx = p.x() * n - i;
    const double dy = p.y() * n - j;
    const std::size_t cell = static_cast<std::size_t>(j * n + i);
    return 2 * cell + (dx >= dy ? 0 : 1);
  }

  std::map<std::pair<int, int>, int> _edge_lookup;
};

inline double signed_area(const std::array<Vec2, 3>& c)
{
  const Vec2 a = c[1] - c[0];
  const Vec2 b = c[2] - c[0];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

inline double diameter(const std::array<Vec2, 3>& c)
{
  return std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(),
                   (c[0] - c[2]).norm()});
}

/// Diameter of the inscribed circle.
inline double inscribed_diameter(const std::array<Vec2, 3>& c)
{
  const double perimeter
      = (c[1] - c[0]).norm() + (c[2] - c[1]).norm() + (c[0] - c[2]).norm();
  return 4.0 * std::abs(signed_area(c)) / perimeter;
}

/// Rebuilds edges and adjacency from vertices/triangles. Edges are numbered in
/// order of first encounter while walking triangles and their local edges.
inline void build_topology(Mesh& mesh)
{
  mesh.edges.clear();
  mesh._edge_lookup.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
  {
    for (int k = 0; k < 3; ++k)
    {
      int a = mesh.triangles[t][static_cast<std::size_t>(k)];
      int b = mesh.triangles[t][static_cast<std::size_t>((k + 1) % 3)];
      if (a > b)
        std::swap(a, b);
      auto [it, inserted] = mesh._edge_lookup.try_emplace(
          {a, b}, static_cast<int>(mesh.edges.size()));
      if (inserted)
      {
        Edge e;
        e.vertices = {a, b};
        e.triangles = {static_cast<int>(t), -1};
        mesh.edges.push_back(e);
      }
      else
      {
        Edge& e = mesh.edges[static_cast<std::size_t>(it->second)];
        if (e.triangles[1] >= 0)
          throw GeometryError("edge shared by more than two triangles");
        e.triangles[1] = static_cast<int>(t);
      }
      mesh.triangle_edges[t][static_cast<std::size_t>(k)] = it->second;
    }
  }
  mesh.boundary_vertex.assign(mesh.vertices.size(), false);
  for (Edge& e : mesh.edges)
  {
    e.boundary = e.triangles[1] < 0;
    if (e.boundary)
      for (int v : e.vertices)
        mesh.boundary_vertex[static_cast<std::size_t>(v)] = true;
  }
  mesh.h = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    mesh.h = std::max(mesh.h, diameter(mesh.corners(t)));
}

/// Uniform (n+1)^2 grid, each cell split along its bottom-left to top-right
/// diagonal.
inline Mesh build_unit_square_mesh(int n)
{
  if (n < 1)
    throw GeometryError("mesh resolution must be positive");
  Mesh mesh;
  mesh.n = n;
  const double dx = 1.0 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(i * dx, j * dx);
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
    {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  build_topology(mesh);
  return mesh;
}

/// Closed polyline on the mesh skeleton tracing an axis-aligned square.
struct EmbeddedCurve
{
  double a = 0.0, b = 0.0; ///< the square [a,b] x [a,b]
  std::vector<int> segments; ///< edge indices, counterclockwise loop
  std::vector<std::array<int, 2>> segment_vertices; ///< traversal direction
  std::vector<std::array<double, 2>> theta_spans;
  std::vector<int> inside_triangles;
  std::vector<int> outside_triangles;
  std::vector<bool> is_inside; ///< per triangle
  double epsilon_g = 0.0;

  /// Distance from p to the curve itself (the square's perimeter).
  double distance(const Vec2& p) const
  {
    const double dx = std::max({a - p.x(), 0.0, p.x() - b});
    const double dy = std::max({a - p.y(), 0.0, p.y() - b});
    if (dx > 0.0 || dy > 0.0)
      return std::hypot(dx, dy);
    return std::min({p.x() - a, b - p.x(), p.y() - a, b - p.y()});
  }
};

namespace detail
{
inline int grid_index(double value, int n, const char* name)
{
  const double scaled = value * n;
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-9)
    throw AlignmentError(std::string("curve.rect ") + name + " = "
                         + std::to_string(value)
                         + " is not a multiple of 1/" + std::to_string(n)
                         + ": curve is not aligned with the mesh");
  return static_cast<int>(rounded);
}
} // namespace detail

inline EmbeddedCurve embed_curve(const Mesh& mesh, double a, double b)
{
  if (!(a < b))
    throw GeometryError("curve.rect requires a < b");
  if (!(a > 0.0 && b < 1.0))
    throw GeometryError("curve.rect must lie strictly inside the unit square");
  const int n = mesh.n;
  const int ia = detail::grid_index(a, n, "a");
  const int ib = detail::grid_index(b, n, "b");
  if (ia <= 0 || ib >= n)
    throw GeometryError("curve.rect must lie strictly inside the unit square");

  EmbeddedCurve curve;
  curve.a = a;
  curve.b = b;
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<int> loop;
  for (int i = ia; i < ib; ++i)
    loop.push_back(vid(i, ia));
  for (int j = ia; j < ib; ++j)
    loop.push_back(vid(ib, j));
  for (int i = ib; i > ia; --i)
    loop.push_back(vid(i, ib));
  for (int j = ib; j > ia; --j)
    loop.push_back(vid(ia, j));

  double perimeter = 0.0;
  for (std::size_t s = 0; s < loop.size(); ++s)
  {
    const int v0 = loop[s];
    const int v1 = loop[(s + 1) % loop.size()];
    const int e = mesh.find_edge(v0, v1);
    if (e < 0)
      throw AlignmentError("curve segment is not a mesh edge");
    curve.segments.push_back(e);
    curve.segment_vertices.push_back({v0, v1});
    perimeter += (mesh.vertices[static_cast<std::size_t>(v1)]
                  - mesh.vertices[static_cast<std::size_t>(v0)])
                     .norm();
  }
  double theta = 0.0;
  for (const auto& sv : curve.segment_vertices)
  {
    const double len = (mesh.vertices[static_cast<std::size_t>(sv[1])]
                        - mesh.vertices[static_cast<std::size_t>(sv[0])])
                           .norm();
    const double next = theta + 2.0 * std::numbers::pi * len / perimeter;
    curve.theta_spans.push_back({theta, next});
    theta = next;
  }
  curve.theta_spans.back()[1] = 2.0 * std::numbers::pi;

  curve.is_inside.assign(mesh.num_triangles(), false);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
  {
    const Vec2 c = mesh.centroid(t);
    const bool inside = c.x() > a && c.x() < b && c.y() > a && c.y() < b;
    curve.is_inside[t] = inside;
    (inside ? curve.inside_triangles : curve.outside_triangles)
        .push_back(static_cast<int>(t));
  }
  curve.epsilon_g = std::min(a, 1.0 - b);
  return curve;
}

struct ValidationReport
{
  double max_shape_ratio = 0.0; ///< max h_K / rho_K
  double min_shape_ratio = 0.0;
  double min_hK = 0.0;
  double max_hK = 0.0;
  double quasi_uniformity = 0.0; ///< min h_K / h
  bool positive_areas = true;
  bool euler_ok = true;
  std::optional<double> epsilon_g;
  bool distance_ok = true; ///< h < epsilon_g when a curve is given
  bool pass = true;
};

inline ValidationReport validate_mesh(const Mesh& mesh,
                                      const EmbeddedCurve* curve = nullptr)
{
  ValidationReport r;
  r.min_shape_ratio = std::numeric_limits<double>::infinity();
  r.min_hK = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto c = mesh.corners(t);
    const double hk = diameter(c);
    const double ratio = hk / inscribed_diameter(c);
    r.max_shape_ratio = std::max(r.max_shape_ratio, ratio);
    r.min_shape_ratio = std::min(r.min_shape_ratio, ratio);
    r.min_hK = std::min(r.min_hK, hk);
    r.max_hK = std::max(r.max_hK, hk);
    if (signed_area(c) <= 0.0)
      r.positive_areas = false;
  }
  r.quasi_uniformity = r.min_hK / mesh.h;
  const long euler = static_cast<long>(mesh.num_vertices())
                     - static_cast<long>(mesh.num_edges())
                     + static_cast<long>(mesh.num_triangles());
  r.euler_ok = euler == 1;
  if (curve)
  {
    r.epsilon_g = curve->epsilon_g;
    r.distance_ok = curve->epsilon_g > 0.0 && mesh.h < curve->epsilon_g;
  }
  r.pass = r.positive_areas && r.euler_ok && r.distance_ok;
  return r;
}

} // namespace trihelm
