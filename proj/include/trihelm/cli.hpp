#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "checks.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "study.hpp"
#include "vtk.hpp"

namespace trihelm
{

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int config = 2;
inline constexpr int geometry = 3;
inline constexpr int solver = 4;
} // namespace exit_code

namespace cli_detail
{
/// Runs a command body, mapping library errors onto exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body)
{
  try
  {
    return body();
  }
  catch (const ConfigError& e)
  {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  }
  catch (const AlignmentError& e)
  {
    err << "alignment error: " << e.what() << '\n';
    return exit_code::geometry;
  }
  catch (const GeometryError& e)
  {
    err << "geometry error: " << e.what() << '\n';
    return exit_code::geometry;
  }
  catch (const LevelMismatch& e)
  {
    err << "level mismatch: " << e.what() << '\n';
    return exit_code::geometry;
  }
  catch (const NotConverged& e)
  {
    err << "solver did not converge: " << e.what() << '\n';
    return exit_code::solver;
  }
  catch (const NotSPD& e)
  {
    err << "solver failure: " << e.what() << '\n';
    return exit_code::solver;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return exit_code::check_failed;
  }
}

inline std::filesystem::path prepare_output(const RunConfig& c)
{
  const std::filesystem::path dir(c.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + c.output + "': " + ec.message());
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f)
    throw Error("cannot write " + path.string());
}

inline void describe_validation(std::ostream& os, const ValidationReport& v)
{
  os << "mesh: max h_K/rho_K " << v.max_shape_ratio << ", min h_K/rho_K " << v.min_shape_ratio
     << ", quasi-uniformity " << v.quasi_uniformity << ", euler "
     << (v.euler_ok ? "ok" : "FAILED") << ", areas " << (v.positive_areas ? "ok" : "FAILED")
     << '\n';
  if (v.epsilon_g)
    os << "curve: epsilon_g " << *v.epsilon_g << ", h < epsilon_g "
       << (v.distance_ok ? "yes" : "no") << '\n';
}

inline void require_sound_mesh(const ValidationReport& v)
{
  if (!v.positive_areas || !v.euler_ok)
    throw GeometryError("mesh validation failed");
}
} // namespace cli_detail

/// Solves one level and writes solution.vtk, mesh.vtk, solve.log and
/// optionally matrix.mtx.
inline int cmd_solve(const RunConfig& config, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr)
{
  return cli_detail::guarded(err, [&] {
    validate_config(config);
    const auto dir = cli_detail::prepare_output(config);
    ProblemSpec spec = config.problem();
    const LevelSolution s = solve_level(config.n, spec);
    cli_detail::require_sound_mesh(s.validation);

    std::ostringstream log;
    log << "# trihelm solve\n" << serialize_config(config) << '\n';
    cli_detail::describe_validation(log, s.validation);
    if (!s.validation.distance_ok)
    {
      const std::string warn = "warning: mesh size h = " + std::to_string(s.disc->mesh.h)
                               + " is not below epsilon_g; the curve is too close to the "
                                 "boundary for this resolution";
      err << warn << '\n';
      log << warn << '\n';
    }
    log << "free dofs per component: " << s.disc->dofmap.free_count() << '\n';
    double umax = 0.0;
    for (std::size_t c = 0; c < s.reports.size(); ++c)
    {
      log << "component " << c << ": " << s.reports[c] << '\n';
      umax = std::max(umax, s.u_h.coefficients()[c].lpNorm<Eigen::Infinity>());
    }
    log << "max |coefficient|: " << std::scientific << std::setprecision(6) << umax << '\n';
    if (spec.kind == SourceKind::manufactured)
    {
      const FieldFunction e = s.u_h - manufactured_field(manufactured_case(config.b));
      log << "energy error vs u*: " << energy(s.disc->mesh, e, config.b, std::nullopt, 24)
          << '\n';
    }
    const EmbeddedCurve* curve = s.curve ? &*s.curve : nullptr;
    if (config.emit_vtk)
    {
      std::ostringstream sol, mesh;
      write_solution_vtk(sol, s.disc->mesh, s.u_h.coefficients(), curve);
      write_mesh_vtk(mesh, s.disc->mesh, curve);
      cli_detail::write_file(dir / "solution.vtk", sol.str());
      cli_detail::write_file(dir / "mesh.vtk", mesh.str());
    }
    if (config.emit_matrix && !write_matrix_market((dir / "matrix.mtx").string(), s.system.matrix))
      throw Error("cannot write matrix.mtx");
    cli_detail::write_file(dir / "solve.log", log.str());
    out << log.str();
    return exit_code::ok;
  });
}

/// Runs the convergence study over config.levels and writes convergence.csv
/// and convergence.log.
inline int cmd_convergence(const RunConfig& config, std::ostream& out = std::cout,
                           std::ostream& err = std::cerr)
{
  return cli_detail::guarded(err, [&] {
    validate_config(config);
    const auto dir = cli_detail::prepare_output(config);
    const ConvergenceReport r = run_convergence_study(config.study());
    std::ostringstream table, log;
    r.write_table(table);
    log << "# trihelm convergence\n" << serialize_config(config) << '\n';
    if (r.reference)
      log << "errors measured against the n = " << *r.reference << " solution\n";
    else
      log << "errors measured against u*\n";
    log << table.str();
    for (const LevelErrors& l : r.levels)
      for (std::size_t c = 0; c < l.reports.size(); ++c)
        log << "n = " << l.n << " component " << c << ": " << l.reports[c] << '\n';
    if (config.emit_csv)
    {
      std::ostringstream csv;
      r.write_csv(csv);
      cli_detail::write_file(dir / "convergence.csv", csv.str());
    }
    cli_detail::write_file(dir / "convergence.log", log.str());
    out << table.str();
    return exit_code::ok;
  });
}

/// Runs the diagnostic battery; exit 1 if any check fails.
inline int cmd_check(const RunConfig& config, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr)
{
  return cli_detail::guarded(err, [&] {
    validate_config(config);
    const auto dir = cli_detail::prepare_output(config);
    const auto results = run_checks(config);
    std::ostringstream report;
    bool all = true;
    for (const CheckResult& r : results)
    {
      report << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      all = all && r.pass;
    }
    cli_detail::write_file(dir / "check.log", report.str());
    out << report.str();
    return all ? exit_code::ok : exit_code::check_failed;
  });
}

} // namespace trihelm
