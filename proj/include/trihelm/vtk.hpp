#pragma once

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <unsupported/Eigen/SparseExtra>

#include "assembly.hpp"
#include "errors.hpp"
#include "mesh.hpp"

namespace trihelm
{

namespace vtk_detail
{
inline void write_grid(std::ostream& os, const Mesh& mesh, const std::string& title)
{
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(17);
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& p : mesh.vertices)
    os << p.x() << ' ' << p.y() << " 0\n";
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles)
    os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    os << "5\n";
}

inline void write_markers(std::ostream& os, const Mesh& mesh, const EmbeddedCurve* curve)
{
  if (!curve)
    return;
  os << "CELL_DATA " << mesh.num_triangles() << '\n';
  os << "SCALARS inside int 1\nLOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    os << (curve->is_inside[t] ? 1 : 0) << '\n';
}
} // namespace vtk_detail

/// Legacy ASCII VTK of the triangulation; with a curve, cells carry an
/// `inside` marker (1 inside, 0 outside).
inline void write_mesh_vtk(std::ostream& os, const Mesh& mesh,
                           const EmbeddedCurve* curve = nullptr)
{
  vtk_detail::write_grid(os, mesh, "trihelm mesh n=" + std::to_string(mesh.n));
  vtk_detail::write_markers(os, mesh, curve);
}

/// Mesh plus point scalars u_0, u_1 sampled from the vertex value DOFs of
/// full-length coefficient vectors.
inline void write_solution_vtk(std::ostream& os, const Mesh& mesh,
                               const std::vector<Vector>& components,
                               const EmbeddedCurve* curve = nullptr)
{
  for (const Vector& c : components)
    if (static_cast<std::size_t>(c.size()) < 3 * mesh.num_vertices())
      throw DimensionMismatch("solution vector too short for the mesh");
  vtk_detail::write_grid(os, mesh, "trihelm solution n=" + std::to_string(mesh.n));
  vtk_detail::write_markers(os, mesh, curve);
  os << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (std::size_t c = 0; c < components.size(); ++c)
  {
    os << "SCALARS u_" << c << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
      os << components[c](DofMap::vertex_dof(static_cast<int>(v), 0)) << '\n';
  }
}

/// Matrix Market coordinate dump.
inline bool write_matrix_market(const std::string& path, const SparseMatrix& a)
{
  return Eigen::saveMarket(Eigen::SparseMatrix<double>(a), path);
}

} // namespace trihelm
