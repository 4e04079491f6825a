#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "assembly.hpp"
#include "config.hpp"
#include "discretization.hpp"
#include "element.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "study.hpp"

namespace trihelm
{

/// Mesh consisting of one (counterclockwise) triangle.
inline Mesh single_triangle_mesh(const std::array<Vec2, 3>& corners)
{
  Mesh m;
  m.n = 1;
  m.vertices.assign(corners.begin(), corners.end());
  m.triangles = {{0, 1, 2}};
  if (signed_area(corners) < 0.0)
    m.triangles = {{0, 2, 1}};
  build_topology(m);
  return m;
}

/// Random triangle in [0,1]^2 with h_K / rho_K <= max_ratio, counterclockwise.
inline std::array<Vec2, 3> random_shape_regular_triangle(std::mt19937_64& rng,
                                                         double max_ratio = 4.0)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;)
  {
    std::array<Vec2, 3> c{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    if (signed_area(c) < 0.0)
      std::swap(c[1], c[2]);
    if (signed_area(c) > 0.0 && diameter(c) / inscribed_diameter(c) <= max_ratio)
      return c;
  }
}

/// max |n_i(l_k) - delta_ik| on triangle t.
inline double duality_error(const DofFunctionals& functionals, const ElementBasis& basis)
{
  double worst = 0.0;
  for (std::size_t k = 0; k < local_dofs; ++k)
  {
    const LocalVector n = apply_functionals(
        functionals, [&](const Vec2& x) { return basis.eval(x)[k]; });
    for (std::size_t i = 0; i < local_dofs; ++i)
      worst = std::max(worst, std::abs(n(static_cast<Eigen::Index>(i)) - (i == k ? 1.0 : 0.0)));
  }
  return worst;
}

inline double duality_error(const Mesh& mesh, std::size_t t, const std::vector<Vec2>& normals)
{
  const auto f = build_dof_functionals(mesh, t, normals);
  return duality_error(f, build_nodal_basis(mesh, t, f));
}

/// Max duality deviation over random shape-regular triangles and every
/// triangle of the structured meshes at the given resolutions.
inline double unisolvency_sweep(int random_triangles, std::uint64_t seed,
                                const std::vector<int>& structured)
{
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < random_triangles; ++i)
  {
    const Mesh m = single_triangle_mesh(random_shape_regular_triangle(rng));
    worst = std::max(worst, duality_error(m, 0, global_edge_normals(m)));
  }
  for (int n : structured)
  {
    const Mesh m = build_unit_square_mesh(n);
    const auto normals = global_edge_normals(m);
    for (std::size_t t = 0; t < m.num_triangles(); ++t)
      worst = std::max(worst, duality_error(m, t, normals));
  }
  return worst;
}

/// Cubic with uniform [-1, 1] coefficients.
inline Polynomial2D random_cubic(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial2D p;
  for (int d = 0; d <= 3; ++d)
    for (int q = 0; q <= d; ++q)
      p = p + u(rng) * Polynomial2D::monomial(d - q, q);
  return p;
}

/// Max pointwise error of the interpolant of random cubics on the n x n mesh.
inline double p3_reproduction(int n, int cubics, int points, std::uint64_t seed)
{
  const auto disc = build_discretization(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < cubics; ++i)
  {
    const Polynomial2D p = random_cubic(rng);
    const FieldFunction pi = interpolate(disc, polynomial_field(p, 1));
    for (int k = 0; k < points; ++k)
    {
      const Vec2 x(u(rng), u(rng));
      const std::size_t t = disc->mesh.locate(x);
      worst = std::max(worst, std::abs(pi(0, disc->mesh, t, x).value - p(x.x(), x.y())));
    }
  }
  return worst;
}

/// Max relative error of a rule over all monomials up to `degree`, against
/// the closed form p! q! / (p + q + 2)! (triangle) or 1 / (p + 1) (segment).
inline double triangle_rule_error(const quadrature::TriangleRule& rule, int degree)
{
  double worst = 0.0;
  for (int d = 0; d <= degree; ++d)
    for (int q = 0; q <= d; ++q)
    {
      const int p = d - q;
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        s += rule.weights[i] * std::pow(rule.points[i][0], p) * std::pow(rule.points[i][1], q);
      const double exact = std::exp(std::lgamma(p + 1.0) + std::lgamma(q + 1.0)
                                    - std::lgamma(p + q + 3.0));
      worst = std::max(worst, std::abs(s - exact) / exact);
    }
  return worst;
}

inline double segment_rule_error(const quadrature::SegmentRule& rule, int degree)
{
  double worst = 0.0;
  for (int p = 0; p <= degree; ++p)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      s += rule.weights[i] * std::pow(rule.points[i][0], p);
    const double exact = 1.0 / (p + 1.0);
    worst = std::max(worst, std::abs(s - exact) / exact);
  }
  return worst;
}

/// alpha multi-indices with |alpha| <= 2.
inline constexpr std::array<std::array<int, 2>, 6> patch_multi_indices{
    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

/// Below this, a patch-test value is identically zero up to round-off.
inline constexpr double patch_roundoff = 1e-12;

struct PatchDecayReport
{
  std::vector<int> levels;
  /// values[level][alpha * 2 + axis]
  std::vector<std::array<double, 12>> cosine;
  std::vector<std::array<double, 12>> constant;
  double min_decay = 0.0; ///< min ratio between levels among non-vanishing pairs
  bool decay_ok = true;
  double max_constant = 0.0;
};

/// T_{alpha,i}(psi, pi_h u*) for psi = cos(pi x) cos(pi y) and psi = 1.
inline PatchDecayReport patch_decay(const std::vector<int>& levels, double b = 1.0)
{
  PatchDecayReport r;
  r.levels = levels;
  const FieldFunction exact = manufactured_field(manufactured_case(b));
  const auto cosine = [](const Vec2& x) {
    return std::cos(std::numbers::pi * x.x()) * std::cos(std::numbers::pi * x.y());
  };
  const auto one = [](const Vec2&) { return 1.0; };
  for (int n : levels)
  {
    const auto disc = build_discretization(n);
    const FieldFunction pi = interpolate(disc, exact);
    std::array<double, 12> tc{}, t1{};
    for (std::size_t a = 0; a < patch_multi_indices.size(); ++a)
      for (int axis = 0; axis < 2; ++axis)
      {
        const auto [ax, ay] = patch_multi_indices[a];
        tc[2 * a + static_cast<std::size_t>(axis)]
            = std::abs(patch_test(disc->mesh, cosine, pi, ax, ay, axis));
        t1[2 * a + static_cast<std::size_t>(axis)]
            = std::abs(patch_test(disc->mesh, one, pi, ax, ay, axis));
        r.max_constant = std::max(r.max_constant, t1[2 * a + static_cast<std::size_t>(axis)]);
      }
    r.cosine.push_back(tc);
    r.constant.push_back(t1);
  }
  r.min_decay = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < r.cosine.size(); ++k)
    for (std::size_t j = 0; j < 12; ++j)
    {
      const double coarse = r.cosine[k][j], fine = r.cosine[k + 1][j];
      if (coarse <= patch_roundoff && fine <= patch_roundoff)
        continue;
      const double ratio = coarse / fine;
      r.min_decay = std::min(r.min_decay, ratio);
      if (!(ratio >= 1.5))
        r.decay_ok = false;
    }
  return r;
}

struct CheckResult
{
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string sci(double v)
{
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

/// The diagnostic battery of the `check` command, run at resolution c.n.
inline std::vector<CheckResult> run_checks(const RunConfig& c)
{
  std::vector<CheckResult> out;
  const int n = c.n;
  FaultInjection fault;
  if (c.inject_normal_flip)
    fault.flip_normal_edge = first_interior_edge(build_unit_square_mesh(n));
  const auto disc = build_discretization(n, fault);

  {
    const double e = unisolvency_sweep(c.trials, c.seed, {n});
    out.push_back({"unisolvency", e <= 1e-9, "max duality deviation " + sci(e)});
  }
  {
    const double e = c0_trace_check(*disc);
    out.push_back({"c0_trace", e <= 1e-9, "max trace jump " + sci(e)});
  }
  {
    const WeakContinuityReport w = weak_continuity_check(*disc);
    const double e = std::max({w.max_interior, w.max_boundary, w.max_value_jump});
    out.push_back({"weak_continuity", e <= 1e-9,
                   "interior " + sci(w.max_interior) + ", boundary " + sci(w.max_boundary)
                       + ", values " + sci(w.max_value_jump)});
  }
  {
    const double et = triangle_rule_error(quadrature::assembly_rule(), 14);
    const double es = segment_rule_error(quadrature::edge_rule(), 7);
    out.push_back({"quadrature", et <= 1e-12 && es <= 1e-12,
                   "triangle degree 14 " + sci(et) + ", segment degree 7 " + sci(es)});
  }
  {
    const LinearSystem sys
        = assemble_stiffness(disc->mesh, disc->bases, disc->dofmap, c.b);
    const SpdReport s = spd_check(sys.matrix, c.trials, c.seed);
    SolveReport rep;
    const Vector zero = Solver(sys.matrix).solve(Vector::Zero(sys.size()), rep);
    const double zmax = zero.size() ? zero.lpNorm<Eigen::Infinity>() : 0.0;
    out.push_back({"spd", s.symmetry <= 1e-12 && s.positive && zmax <= 1e-12,
                   "symmetry " + sci(s.symmetry) + ", min Rayleigh quotient "
                       + sci(s.min_quotient) + ", zero-source max " + sci(zmax)});
  }
  {
    std::array<double, 3> ratio{};
    for (std::size_t k = 0; k < 3; ++k)
      ratio[k] = poincare_ratio(*build_discretization(n << k), c.trials, c.seed);
    const bool ok = ratio[2] < 2.0 * ratio[0] && ratio[0] >= 0.5;
    out.push_back({"poincare", ok,
                   "max ratio " + sci(ratio[0]) + " / " + sci(ratio[1]) + " / " + sci(ratio[2])
                       + " at n = " + std::to_string(n) + ", " + std::to_string(2 * n)
                       + ", " + std::to_string(4 * n)});
  }
  {
    const PatchDecayReport p = patch_decay({n, 2 * n, 4 * n}, c.b);
    out.push_back({"patch_test", p.decay_ok && p.max_constant <= 1e-9,
                   "min decay factor " + sci(p.min_decay) + ", max |T| for constant psi "
                       + sci(p.max_constant)});
  }
  return out;
}

} // namespace trihelm
