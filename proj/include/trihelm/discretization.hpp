#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "assembly.hpp"
#include "element.hpp"
#include "mesh.hpp"

namespace trihelm
{

/// Everything defining the discrete space on one mesh level.
struct Discretization
{
  Mesh mesh;
  std::vector<Vec2> normals;
  std::vector<ElementBasis> bases;
  DofMap dofmap;
};

struct FaultInjection
{
  /// Rebuild the basis of this edge's first adjacent triangle with the edge
  /// normal reversed, breaking the shared-functional convention.
  std::optional<int> flip_normal_edge;
};

/// First interior edge of the mesh (the default fault-injection target).
inline int first_interior_edge(const Mesh& mesh)
{
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edges[e].boundary)
      return static_cast<int>(e);
  return -1;
}

inline std::shared_ptr<const Discretization> build_discretization(int n,
                                                                  FaultInjection fault = {})
{
  auto d = std::make_shared<Discretization>();
  d->mesh = build_unit_square_mesh(n);
  d->normals = global_edge_normals(d->mesh);
  d->bases = build_all_bases(d->mesh, d->normals);
  d->dofmap = build_dofmap(d->mesh);
  if (fault.flip_normal_edge && *fault.flip_normal_edge >= 0)
  {
    const auto e = static_cast<std::size_t>(*fault.flip_normal_edge);
    auto flipped = d->normals;
    flipped[e] = -flipped[e];
    const auto t = static_cast<std::size_t>(d->mesh.edges[e].triangles[0]);
    d->bases[t] = build_nodal_basis(d->mesh, t, build_dof_functionals(d->mesh, t, flipped));
  }
  return d;
}

} // namespace trihelm
