#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "solver.hpp"
#include "source.hpp"
#include "study.hpp"

namespace trihelm
{

/// Curve density as written in a config file.
struct FtildeSpec
{
  enum class Kind
  {
    constant,
    sine
  };
  Kind kind = Kind::constant;
  double fx = 1.0;
  double fy = 1.0;

  CurveDensity density() const
  {
    return kind == Kind::sine ? CurveDensity::sine() : CurveDensity::constant(fx, fy);
  }
  /// fx, fy are ignored for the sine density.
  bool operator==(const FtildeSpec& o) const
  {
    return kind == o.kind && (kind == Kind::sine || (fx == o.fx && fy == o.fy));
  }
};

struct RunConfig
{
  int n = 8;
  std::vector<int> levels{8, 16, 32};
  double b = 1.0;
  SourceKind source = SourceKind::manufactured;
  FtildeSpec ftilde;
  double rect_a = 0.25;
  double rect_b = 0.75;
  double delta = 0.125;
  std::uint64_t seed = 12345;
  int reference = 64;
  int trials = 100;
  SolveMethod method = SolveMethod::automatic;
  double tolerance = 1e-10;
  bool emit_vtk = true;
  bool emit_csv = true;
  bool emit_matrix = false;
  std::string output = "out";
  /// Test hook: flip the normal of the first interior edge in one element.
  bool inject_normal_flip = false;

  bool operator==(const RunConfig&) const = default;

  ProblemSpec problem() const
  {
    ProblemSpec p;
    p.kind = source;
    p.b = b;
    p.rect_a = rect_a;
    p.rect_b = rect_b;
    p.density = ftilde.density();
    p.solve.method = method;
    p.solve.tolerance = tolerance;
    return p;
  }

  StudyOptions study() const
  {
    StudyOptions s;
    s.levels = levels;
    s.problem = problem();
    s.delta = delta;
    s.reference = reference;
    return s;
  }
};

namespace config_detail
{
inline std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] inline void bad(const std::string& key, const std::string& value,
                             const std::string& why)
{
  throw ConfigError("invalid value '" + value + "' for key '" + key + "': " + why);
}

inline double to_double(const std::string& key, const std::string& text)
{
  const std::string v = trim(text);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    bad(key, text, "expected a real number");
  return d;
}

inline long long to_integer(const std::string& key, const std::string& text)
{
  const std::string v = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    bad(key, text, "expected an integer");
  return i;
}

inline bool to_bool(const std::string& key, const std::string& text)
{
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  bad(key, text, "expected true or false");
}

/// "[a, b, c]" -> {"a", "b", "c"}
inline std::vector<std::string> to_list(const std::string& key, const std::string& text)
{
  const std::string v = trim(text);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    bad(key, text, "expected a list such as [1, 2]");
  std::vector<std::string> items;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ','))
    items.push_back(trim(item));
  if (items.size() == 1 && items[0].empty())
    items.clear();
  return items;
}

inline std::string fmt(double d)
{
  std::ostringstream s;
  s << std::setprecision(17) << d;
  return s.str();
}
} // namespace config_detail

inline SolveMethod parse_solve_method(const std::string& key, const std::string& v)
{
  for (SolveMethod m : {SolveMethod::automatic, SolveMethod::cg_jacobi,
                        SolveMethod::dense_cholesky, SolveMethod::sparse_cholesky})
    if (to_string(m) == v)
      return m;
  config_detail::bad(key, v, "expected automatic, cg_jacobi, dense_cholesky or sparse_cholesky");
}

/// Applies one `key = value` assignment.
inline void set_option(RunConfig& c, const std::string& key, const std::string& raw)
{
  using namespace config_detail;
  const std::string value = trim(raw);
  if (key == "n")
    c.n = static_cast<int>(to_integer(key, value));
  else if (key == "levels")
  {
    c.levels.clear();
    for (const std::string& item : to_list(key, value))
      c.levels.push_back(static_cast<int>(to_integer(key, item)));
  }
  else if (key == "b")
    c.b = to_double(key, value);
  else if (key == "source.kind")
  {
    if (value == "manufactured")
      c.source = SourceKind::manufactured;
    else if (value == "curve")
      c.source = SourceKind::curve;
    else
      bad(key, value, "expected manufactured or curve");
  }
  else if (key == "source.ftilde")
  {
    if (value == "sin")
      c.ftilde = {FtildeSpec::Kind::sine, 0.0, 0.0};
    else if (value.rfind("const", 0) == 0)
    {
      const auto items = to_list(key, value.substr(5));
      if (items.size() != 2)
        bad(key, value, "expected const [fx, fy]");
      c.ftilde = {FtildeSpec::Kind::constant, to_double(key, items[0]),
                  to_double(key, items[1])};
    }
    else
      bad(key, value, "expected const [fx, fy] or sin");
  }
  else if (key == "curve.rect")
  {
    const auto items = to_list(key, value);
    if (items.size() != 2)
      bad(key, value, "expected [a, b]");
    c.rect_a = to_double(key, items[0]);
    c.rect_b = to_double(key, items[1]);
  }
  else if (key == "delta")
    c.delta = to_double(key, value);
  else if (key == "seed")
  {
    const long long s = to_integer(key, value);
    if (s < 0)
      bad(key, value, "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "reference")
    c.reference = static_cast<int>(to_integer(key, value));
  else if (key == "trials")
    c.trials = static_cast<int>(to_integer(key, value));
  else if (key == "solver.method")
    c.method = parse_solve_method(key, value);
  else if (key == "solver.tolerance")
    c.tolerance = to_double(key, value);
  else if (key == "emit.vtk")
    c.emit_vtk = to_bool(key, value);
  else if (key == "emit.csv")
    c.emit_csv = to_bool(key, value);
  else if (key == "emit.matrix")
    c.emit_matrix = to_bool(key, value);
  else if (key == "output")
  {
    if (value.empty())
      bad(key, value, "output directory must not be empty");
    c.output = value;
  }
  else if (key == "check.inject_normal_flip")
    c.inject_normal_flip = to_bool(key, value);
  else
    throw ConfigError("unknown key '" + key + "'");
}

/// Rejects values no command can run with.
inline void validate_config(const RunConfig& c)
{
  const auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("key '" + key + "': " + why);
  };
  if (c.n < 1)
    fail("n", "must be at least 1");
  if (c.levels.empty())
    fail("levels", "must not be empty");
  for (std::size_t k = 0; k < c.levels.size(); ++k)
    if (c.levels[k] < 1 || (k > 0 && c.levels[k] <= c.levels[k - 1]))
      fail("levels", "must be positive and strictly increasing");
  if (!(c.b > 0.0))
    fail("b", "must be positive");
  if (!(c.delta >= 0.0))
    fail("delta", "must be non-negative");
  if (c.reference < 1)
    fail("reference", "must be at least 1");
  if (c.trials < 1)
    fail("trials", "must be at least 1");
  if (!(c.tolerance > 0.0))
    fail("solver.tolerance", "must be positive");
}

/// Parses `key = value` lines. `#` starts a comment; `[section]` lines
/// prefix the keys that follow with `section.`.
inline RunConfig parse_config(const std::string& text, RunConfig base = {})
{
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos)
    {
      section = config_detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = config_detail::trim(line.substr(0, eq));
    if (!section.empty())
      key = section + "." + key;
    set_option(base, key, line.substr(eq + 1));
  }
  return base;
}

/// `key=value` override as given on the command line.
inline void apply_override(RunConfig& c, const std::string& assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set_option(c, config_detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline std::string serialize_config(const RunConfig& c)
{
  using config_detail::fmt;
  std::ostringstream s;
  s << "n = " << c.n << '\n';
  s << "levels = [";
  for (std::size_t k = 0; k < c.levels.size(); ++k)
    s << (k ? ", " : "") << c.levels[k];
  s << "]\n";
  s << "b = " << fmt(c.b) << '\n';
  s << "source.kind = " << to_string(c.source) << '\n';
  if (c.ftilde.kind == FtildeSpec::Kind::sine)
    s << "source.ftilde = sin\n";
  else
    s << "source.ftilde = const [" << fmt(c.ftilde.fx) << ", " << fmt(c.ftilde.fy) << "]\n";
  s << "curve.rect = [" << fmt(c.rect_a) << ", " << fmt(c.rect_b) << "]\n";
  s << "delta = " << fmt(c.delta) << '\n';
  s << "seed = " << c.seed << '\n';
  s << "reference = " << c.reference << '\n';
  s << "trials = " << c.trials << '\n';
  s << "solver.method = " << to_string(c.method) << '\n';
  s << "solver.tolerance = " << fmt(c.tolerance) << '\n';
  s << "emit.vtk = " << (c.emit_vtk ? "true" : "false") << '\n';
  s << "emit.csv = " << (c.emit_csv ? "true" : "false") << '\n';
  s << "emit.matrix = " << (c.emit_matrix ? "true" : "false") << '\n';
  s << "output = " << c.output << '\n';
  if (c.inject_normal_flip)
    s << "check.inject_normal_flip = true\n";
  return s.str();
}

} // namespace trihelm
