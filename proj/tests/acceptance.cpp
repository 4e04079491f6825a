// Acceptance gates. `acceptance <name>` runs one gate, no argument runs all.
// Each gate prints "PASS <name>: ..." or "FAIL <name>: ..." with the measured
// values; the exit status is nonzero if any selected gate fails.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <trihelm/checks.hpp>

using namespace trihelm;
namespace fs = std::filesystem;

namespace
{

constexpr std::uint64_t seed = 12345;

struct Outcome
{
  bool pass;
  std::string detail;
};

std::string rates(const ConvergenceReport& r, std::size_t column)
{
  std::string s;
  for (std::size_t k = 0; k + 1 < r.levels.size(); ++k)
    s += (k ? ", " : "") + std::to_string(r.rate(k, column));
  return "[" + s + "]";
}

std::string errors(const ConvergenceReport& r, std::size_t column)
{
  std::string s;
  for (std::size_t k = 0; k < r.levels.size(); ++k)
    s += (k ? ", " : "") + sci(r.levels[k].errors[column]);
  return "[" + s + "]";
}

bool strictly_decreasing(const ConvergenceReport& r, std::size_t column)
{
  for (std::size_t k = 0; k + 1 < r.levels.size(); ++k)
    if (!(r.levels[k + 1].errors[column] < r.levels[k].errors[column]))
      return false;
  return true;
}

bool rates_within(const ConvergenceReport& r, std::size_t column, double lo, double hi)
{
  for (std::size_t k = 0; k + 1 < r.levels.size(); ++k)
  {
    const double p = r.rate(k, column);
    if (!(p >= lo && p <= hi))
      return false;
  }
  return true;
}

Outcome gate_unisolvency()
{
  const double e = unisolvency_sweep(100, seed, {4, 8});
  return {e <= 1e-9, "max |duality - I| " + sci(e) + " (100 random + n = 4, 8)"};
}

Outcome gate_p3_reproduction()
{
  const double e = p3_reproduction(8, 20, 50, seed);
  return {e <= 1e-9, "max pointwise error " + sci(e) + " (20 cubics x 50 points, n = 8)"};
}

Outcome gate_c0_embedding()
{
  const double e = c0_trace_check(*build_discretization(8), 10);
  return {e <= 1e-9, "max trace jump " + sci(e) + " at n = 8"};
}

Outcome gate_weak_continuity()
{
  bool pass = true;
  std::string detail;
  for (int n : {4, 8, 16})
  {
    const WeakContinuityReport w = weak_continuity_check(*build_discretization(n));
    pass = pass && w.max_interior <= 1e-9 && w.max_boundary <= 1e-9;
    detail += (detail.empty() ? "" : "; ") + std::string("n = ") + std::to_string(n)
              + ": interior " + sci(w.max_interior) + ", boundary " + sci(w.max_boundary);
  }
  return {pass, detail};
}

Outcome gate_quadrature_exactness()
{
  const double t = triangle_rule_error(quadrature::assembly_rule(), 14);
  const double s = segment_rule_error(quadrature::edge_rule(), 7);
  return {t <= 1e-12 && s <= 1e-12,
          "triangle degree 14 rel. error " + sci(t) + ", segment degree 7 rel. error " + sci(s)};
}

Outcome gate_spd()
{
  const auto d = build_discretization(8);
  const LinearSystem s = assemble_stiffness(d->mesh, d->bases, d->dofmap, 1.0);
  const SpdReport r = spd_check(s.matrix, 100, seed);
  const SolveResult zero = solve(s, {Vector::Zero(s.size()), Vector::Zero(s.size())});
  double umax = 0.0;
  for (const Vector& x : zero.solution)
    umax = std::max(umax, x.lpNorm<Eigen::Infinity>());
  return {r.symmetry <= 1e-12 && r.positive && umax <= 1e-12,
          "symmetry " + sci(r.symmetry) + ", min x^T A x / x^T x " + sci(r.min_quotient)
              + ", zero-source max |u_h| " + sci(umax)};
}

Outcome gate_interpolation_rates()
{
  const FieldFunction exact = manufactured_field(manufactured_case(1.0));
  std::vector<double> h, h3, l2;
  for (int n : {8, 16, 32})
  {
    const auto d = build_discretization(n);
    const FieldFunction err = interpolate(d, exact) - exact;
    h.push_back(d->mesh.h);
    h3.push_back(broken_norm(d->mesh, err, 3, std::nullopt, 24));
    l2.push_back(broken_norm(d->mesh, err, 0, std::nullopt, 24));
  }
  bool pass = true;
  std::string detail = "broken H3 EOC [";
  for (std::size_t k = 0; k + 1 < h.size(); ++k)
  {
    const double p = eoc(h3[k], h3[k + 1], h[k], h[k + 1]);
    pass = pass && p >= 0.8 && p <= 1.2;
    detail += (k ? ", " : "") + std::to_string(p);
  }
  detail += "], L2 EOC [";
  for (std::size_t k = 0; k + 1 < h.size(); ++k)
  {
    const double p = eoc(l2[k], l2[k + 1], h[k], h[k + 1]);
    pass = pass && p >= 3.5;
    detail += (k ? ", " : "") + std::to_string(p);
  }
  return {pass, detail + "]"};
}

Outcome gate_manufactured_convergence()
{
  StudyOptions opt;
  opt.levels = {8, 16, 32};
  const ConvergenceReport r = run_convergence_study(opt);
  const bool pass = strictly_decreasing(r, 4) && rates_within(r, 4, 0.8, 1.2);
  return {pass, "energy errors " + errors(r, 4) + ", EOC " + rates(r, 4)
                    + " (required in [0.8, 1.2])"};
}

Outcome gate_patch_test()
{
  const PatchDecayReport r = patch_decay({8, 16, 32});
  return {r.decay_ok && r.max_constant <= 1e-9,
          "min decay factor " + std::to_string(r.min_decay)
              + " over non-vanishing pairs, max |T(1, .)| " + sci(r.max_constant)};
}

Outcome gate_singular_source()
{
  StudyOptions opt;
  opt.levels = {8, 16, 32};
  opt.reference = 64;
  opt.delta = 0.125;
  opt.problem.kind = SourceKind::curve;
  opt.problem.density = CurveDensity::constant(1.0, 1.0);
  const ConvergenceReport r = run_convergence_study(opt);
  const bool pass = strictly_decreasing(r, 4) && rates_within(r, 5, 0.6, 1.3);
  return {pass, "full energy self-errors " + errors(r, 4) + ", away EOC " + rates(r, 5)};
}

Outcome gate_poincare()
{
  const double r8 = poincare_ratio(*build_discretization(8), 100, seed);
  const double r32 = poincare_ratio(*build_discretization(32), 100, seed);
  return {r32 < 2.0 * r8, "max ratio n = 8: " + std::to_string(r8) + ", n = 32: "
                              + std::to_string(r32) + ", growth " + std::to_string(r32 / r8)};
}

Outcome gate_determinism()
{
  const fs::path base = fs::temp_directory_path() / "trihelm_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::string> csv;
  for (const char* run : {"a", "b"})
  {
    const fs::path dir = base / run;
    const std::string cmd = std::string(TRIHELM_CLI) + " convergence --set seed=" + std::to_string(seed)
                            + " --output " + dir.string() + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0)
      return {false, "convergence run failed: " + cmd};
    std::ifstream in(dir / "convergence.csv", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    csv.push_back(s.str());
  }
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, std::to_string(csv[0].size()) + " bytes, "
                    + (same ? "byte-identical" : "contents differ")};
}

} // namespace

int main(int argc, char** argv)
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> gates{
      {"unisolvency", gate_unisolvency},
      {"p3_reproduction", gate_p3_reproduction},
      {"c0_embedding", gate_c0_embedding},
      {"weak_continuity", gate_weak_continuity},
      {"quadrature", gate_quadrature_exactness},
      {"spd", gate_spd},
      {"interpolation_rates", gate_interpolation_rates},
      {"manufactured_convergence", gate_manufactured_convergence},
      {"patch_test", gate_patch_test},
      {"singular_source", gate_singular_source},
      {"poincare", gate_poincare},
      {"determinism", gate_determinism},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  bool all = true, found = false;
  for (const auto& [name, gate] : gates)
  {
    if (!only.empty() && name != only)
      continue;
    found = true;
    Outcome o{false, ""};
    try
    {
      o = gate();
    }
    catch (const std::exception& e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    all = all && o.pass;
  }
  if (!found)
  {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all ? 0 : 1;
}
