#pragma once

#include <cmath>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "assembly.hpp"
#include "discretization.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "solver.hpp"
#include "source.hpp"

namespace trihelm
{

enum class SourceKind
{
  manufactured,
  curve
};

inline std::string to_string(SourceKind k)
{
  return k == SourceKind::curve ? "curve" : "manufactured";
}

/// Everything needed to pose the discrete problem on one level.
struct ProblemSpec
{
  SourceKind kind = SourceKind::manufactured;
  double b = 1.0;
  double rect_a = 0.25;
  double rect_b = 0.75;
  CurveDensity density = CurveDensity::constant(1.0, 1.0);
  SolveOptions solve;
  /// Replace the solve by the canonical interpolant of u* (manufactured only).
  bool interpolate_only = false;
  FaultInjection fault;
};

struct LevelSolution
{
  std::shared_ptr<const Discretization> disc;
  std::optional<EmbeddedCurve> curve;
  ValidationReport validation;
  LinearSystem system;
  std::vector<SolveReport> reports;
  FieldFunction u_h;
};

inline FieldFunction manufactured_field(const ManufacturedCase& mc)
{
  const auto jet = std::make_shared<const PolynomialJet>(mc.u_jet);
  return FieldFunction::analytic({[jet](const Vec2& x) { return (*jet)(x); },
                                  [jet](const Vec2& x) { return (*jet)(x); }});
}

/// Builds, assembles and solves the problem on the n x n mesh.
inline LevelSolution solve_level(int n, const ProblemSpec& spec)
{
  LevelSolution out;
  out.disc = build_discretization(n, spec.fault);
  const Discretization& d = *out.disc;
  if (spec.kind == SourceKind::curve)
  {
    out.curve = embed_curve(d.mesh, spec.rect_a, spec.rect_b);
    out.validation = validate_mesh(d.mesh, &*out.curve);
  }
  else
    out.validation = validate_mesh(d.mesh);

  if (spec.kind == SourceKind::manufactured && spec.interpolate_only)
  {
    out.u_h = interpolate(out.disc, manufactured_field(manufactured_case(spec.b)));
    return out;
  }

  out.system = assemble_stiffness(d.mesh, d.bases, d.dofmap, spec.b);
  ComponentLoads load;
  if (spec.kind == SourceKind::curve)
    load = curve_load(d.mesh, *out.curve, d.bases, d.dofmap, spec.density);
  else
  {
    const ManufacturedCase mc = manufactured_case(spec.b);
    load = volume_load(d.mesh, d.bases, d.dofmap, [&mc](const Vec2& x) { return mc.source(x); });
  }
  const SolveResult result
      = solve(out.system, {d.dofmap.restrict(load[0]), d.dofmap.restrict(load[1])}, spec.solve);
  out.reports = result.reports;
  std::vector<Vector> full;
  for (const Vector& x : result.solution)
    full.push_back(d.dofmap.expand(x));
  out.u_h = FieldFunction::discrete(out.disc, std::move(full));
  return out;
}

/// log(e1/e2) / log(h1/h2).
inline double eoc(double e1, double e2, double h1, double h2)
{
  return std::log(e1 / e2) / std::log(h1 / h2);
}

inline constexpr int error_columns = 6;

struct LevelErrors
{
  int n = 0;
  double h = 0.0;
  std::size_t dofs = 0; ///< free DOFs of the vector system
  /// L2, H1, H2 norms, broken H3 seminorm, energy, energy away from the curve.
  std::array<double, error_columns> errors{};
  std::vector<SolveReport> reports;
};

struct StudyOptions
{
  std::vector<int> levels{8, 16, 32};
  ProblemSpec problem;
  double delta = 0.125;
  int reference = 64; ///< curve case only
  /// Quadrature degree for errors against the analytic solution.
  int exact_error_degree = 24;
};

struct ConvergenceReport
{
  SourceKind kind = SourceKind::manufactured;
  double b = 1.0;
  double rect_a = 0.25, rect_b = 0.75;
  double delta = 0.125;
  std::optional<int> reference;
  std::vector<LevelErrors> levels;

  /// EOC between level k and k+1 for error column c.
  double rate(std::size_t k, std::size_t c) const
  {
    return eoc(levels[k].errors[c], levels[k + 1].errors[c], levels[k].h, levels[k + 1].h);
  }

  static const char* header()
  {
    return "n,h,dofs,err_l2,err_h1,err_h2,err_h3_broken,err_energy,err_energy_away,"
           "eoc_l2,eoc_h1,eoc_h2,eoc_h3,eoc_energy,eoc_energy_away";
  }

  void write_csv(std::ostream& os) const
  {
    std::ostringstream s;
    s << std::scientific << std::setprecision(17);
    s << header() << '\n';
    for (std::size_t k = 0; k < levels.size(); ++k)
    {
      const LevelErrors& l = levels[k];
      s << l.n << ',' << l.h << ',' << l.dofs;
      for (double e : l.errors)
        s << ',' << e;
      for (std::size_t c = 0; c < error_columns; ++c)
      {
        s << ',';
        if (k > 0)
          s << rate(k - 1, c);
      }
      s << '\n';
    }
    os << s.str();
  }

  /// Human-readable EOC table.
  void write_table(std::ostream& os) const
  {
    std::ostringstream s;
    s << std::setw(5) << "n" << std::setw(10) << "dofs";
    for (const char* name : {"l2", "h1", "h2", "h3", "energy", "away"})
      s << std::setw(12) << name << std::setw(7) << "eoc";
    s << '\n';
    for (std::size_t k = 0; k < levels.size(); ++k)
    {
      s << std::setw(5) << levels[k].n << std::setw(10) << levels[k].dofs;
      for (std::size_t c = 0; c < error_columns; ++c)
      {
        s << std::setw(12) << std::scientific << std::setprecision(3) << levels[k].errors[c];
        if (k > 0)
          s << std::setw(7) << std::fixed << std::setprecision(2) << rate(k - 1, c);
        else
          s << std::setw(7) << "-";
      }
      s << '\n';
    }
    os << s.str();
  }
};

/// Triangles of `mesh` whose centroid lies farther than delta from the
/// square's perimeter.
inline std::vector<int> away_triangles(const Mesh& mesh, double a, double b, double delta)
{
  EmbeddedCurve square;
  square.a = a;
  square.b = b;
  std::vector<int> out;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    if (square.distance(mesh.centroid(t)) > delta)
      out.push_back(static_cast<int>(t));
  return out;
}

inline LevelErrors measure_errors(const Mesh& mesh, const FieldFunction& error, double b,
                                  const std::vector<int>& away, int degree)
{
  LevelErrors e;
  e.errors[0] = broken_norm(mesh, error, 0, std::nullopt, degree);
  e.errors[1] = broken_norm(mesh, error, 1, std::nullopt, degree);
  e.errors[2] = broken_norm(mesh, error, 2, std::nullopt, degree);
  e.errors[3] = broken_seminorm(mesh, error, 3, std::nullopt, degree);
  e.errors[4] = energy(mesh, error, b, std::nullopt, degree);
  e.errors[5] = energy(mesh, error, b, away, degree);
  return e;
}

/// Manufactured case: errors against u* on each level's own mesh.
/// Curve case: errors against the solution on the reference level, integrated
/// over the reference mesh (levels must divide the reference resolution).
inline ConvergenceReport run_convergence_study(const StudyOptions& opt)
{
  if (opt.levels.empty())
    throw LevelMismatch("no levels given");
  for (std::size_t k = 0; k < opt.levels.size(); ++k)
  {
    if (opt.levels[k] < 1)
      throw LevelMismatch("level " + std::to_string(opt.levels[k]) + " is not positive");
    if (k > 0 && opt.levels[k] <= opt.levels[k - 1])
      throw LevelMismatch("levels must be strictly increasing");
  }
  const ProblemSpec& p = opt.problem;
  ConvergenceReport report;
  report.kind = p.kind;
  report.b = p.b;
  report.rect_a = p.rect_a;
  report.rect_b = p.rect_b;
  report.delta = opt.delta;

  const auto solve_aligned = [&](int n) {
    try
    {
      return solve_level(n, p);
    }
    catch (const AlignmentError& e)
    {
      throw LevelMismatch("curve is not aligned with level " + std::to_string(n) + ": "
                          + e.what());
    }
  };

  if (p.kind == SourceKind::manufactured)
  {
    const FieldFunction exact = manufactured_field(manufactured_case(p.b));
    for (int n : opt.levels)
    {
      const LevelSolution s = solve_aligned(n);
      const Mesh& mesh = s.disc->mesh;
      LevelErrors e = measure_errors(mesh, s.u_h - exact, p.b,
                                     away_triangles(mesh, p.rect_a, p.rect_b, opt.delta),
                                     opt.exact_error_degree);
      e.n = n;
      e.h = mesh.h;
      e.dofs = 2 * s.disc->dofmap.free_count();
      e.reports = s.reports;
      report.levels.push_back(std::move(e));
    }
    return report;
  }

  if (opt.reference <= opt.levels.back())
    throw LevelMismatch("reference level must exceed every study level");
  for (int n : opt.levels)
    if (opt.reference % n != 0)
      throw LevelMismatch("level " + std::to_string(n) + " does not divide reference "
                          + std::to_string(opt.reference));
  report.reference = opt.reference;
  const LevelSolution ref = solve_aligned(opt.reference);
  const Mesh& fine = ref.disc->mesh;
  const auto away = away_triangles(fine, p.rect_a, p.rect_b, opt.delta);
  for (int n : opt.levels)
  {
    const LevelSolution s = solve_aligned(n);
    LevelErrors e = measure_errors(fine, s.u_h - ref.u_h, p.b, away, 14);
    e.n = n;
    e.h = s.disc->mesh.h;
    e.dofs = 2 * s.disc->dofmap.free_count();
    e.reports = s.reports;
    report.levels.push_back(std::move(e));
  }
  return report;
}

} // namespace trihelm
