#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "assembly.hpp"
#include "errors.hpp"

namespace trihelm
{

enum class SolveMethod
{
  automatic,       ///< dense Cholesky below dense_limit free DOFs, else sparse
  cg_jacobi,       ///< conjugate gradients, diagonal preconditioner
  dense_cholesky,
  sparse_cholesky  ///< LDL^T on the Jacobi-scaled matrix, AMD ordering
};

inline std::string to_string(SolveMethod m)
{
  switch (m)
  {
  case SolveMethod::cg_jacobi:
    return "cg_jacobi";
  case SolveMethod::dense_cholesky:
    return "dense_cholesky";
  case SolveMethod::sparse_cholesky:
    return "sparse_cholesky";
  default:
    return "automatic";
  }
}

struct SolveOptions
{
  SolveMethod method = SolveMethod::automatic;
  double tolerance = 1e-10;
  std::size_t dense_limit = 2000;
  int max_refinement_steps = 4;
  /// 0 selects 50 sqrt(N).
  long max_iterations = 0;
};

struct SolveReport
{
  SolveMethod method = SolveMethod::automatic;
  long iterations = 0; ///< CG iterations or refinement steps
  double relative_residual = 0.0; ///< ||Ax - r|| / ||r||, recomputed
  double backward_error = 0.0;    ///< ||Ax - r||_inf / (||A||_inf ||x||_inf + ||r||_inf)
  bool roundoff_limited = false;  ///< accepted on backward error only
  double seconds = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const SolveReport& r)
{
  return os << "method=" << to_string(r.method) << " iterations=" << r.iterations
            << " relative_residual=" << r.relative_residual
            << " backward_error=" << r.backward_error
            << " roundoff_limited=" << (r.roundoff_limited ? "yes" : "no")
            << " seconds=" << r.seconds;
}

namespace detail
{
inline double inf_norm(const SparseMatrix& a)
{
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i)
  {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      row += std::abs(it.value());
    m = std::max(m, row);
  }
  return m;
}

inline void measure(const SparseMatrix& a, double a_inf, const Vector& x,
                    const Vector& rhs, SolveReport& report)
{
  const Vector r = rhs - a * x;
  const double rn = rhs.norm();
  report.relative_residual = rn > 0.0 ? r.norm() / rn : r.norm();
  const double denom = a_inf * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>();
  report.backward_error = denom > 0.0 ? r.lpNorm<Eigen::Infinity>() / denom : 0.0;
}
} // namespace detail

/// Factorises (or prepares) one scalar SPD system and solves any number of
/// right-hand sides against it.
class Solver
{
public:
  Solver(const SparseMatrix& matrix, SolveOptions options = {})
      : _a(matrix), _options(options)
  {
    _a_inf = detail::inf_norm(_a);
    const auto n = static_cast<std::size_t>(_a.rows());
    _method = options.method;
    if (_method == SolveMethod::automatic)
      _method = n < options.dense_limit ? SolveMethod::dense_cholesky
                                        : SolveMethod::sparse_cholesky;
    const Vector diag = _a.diagonal();
    if (n > 0 && diag.minCoeff() <= 0.0)
      throw NotSPD("matrix has a non-positive diagonal entry");
    _scale = diag.cwiseSqrt().cwiseInverse();
    if (_method == SolveMethod::dense_cholesky)
    {
      const Eigen::MatrixXd scaled = _scale.asDiagonal() * Eigen::MatrixXd(_a) * _scale.asDiagonal();
      _dense.compute(scaled);
      if (_dense.info() != Eigen::Success)
        throw NotSPD("dense Cholesky factorisation failed: matrix is not SPD");
    }
    else if (_method == SolveMethod::sparse_cholesky)
    {
      const Eigen::SparseMatrix<double> scaled
          = _scale.asDiagonal() * Eigen::SparseMatrix<double>(_a) * _scale.asDiagonal();
      _sparse.compute(scaled);
      if (_sparse.info() != Eigen::Success || (n > 0 && _sparse.vectorD().minCoeff() <= 0.0))
        throw NotSPD("sparse LDL^T factorisation found a non-positive pivot");
    }
  }

  SolveMethod method() const { return _method; }

  Vector solve(const Vector& rhs, SolveReport& report) const
  {
    if (rhs.size() != _a.rows())
      throw DimensionMismatch("rhs has " + std::to_string(rhs.size())
                              + " entries, system has " + std::to_string(_a.rows()));
    const auto start = std::chrono::steady_clock::now();
    report = SolveReport{};
    report.method = _method;
    Vector x = Vector::Zero(rhs.size());
    if (rhs.norm() == 0.0)
    {
      report.seconds = elapsed(start);
      return x;
    }
    if (_method == SolveMethod::cg_jacobi)
      x = conjugate_gradients(rhs, report);
    else
      x = direct(rhs, report);
    report.seconds = elapsed(start);
    return x;
  }

private:
  static double elapsed(std::chrono::steady_clock::time_point start)
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  Vector apply_factor(const Vector& r) const
  {
    const Vector y = _scale.cwiseProduct(r);
    const Vector z = _method == SolveMethod::dense_cholesky ? Vector(_dense.solve(y))
                                                            : Vector(_sparse.solve(y));
    return _scale.cwiseProduct(z);
  }

  Vector direct(const Vector& rhs, SolveReport& report) const
  {
    Vector x = apply_factor(rhs);
    detail::measure(_a, _a_inf, x, rhs, report);
    for (int step = 0; step < _options.max_refinement_steps
                       && report.relative_residual > _options.tolerance;
         ++step)
    {
      const Vector candidate = x + apply_factor(rhs - _a * x);
      SolveReport trial = report;
      detail::measure(_a, _a_inf, candidate, rhs, trial);
      if (!(trial.relative_residual < report.relative_residual))
        break;
      x = candidate;
      report = trial;
      report.iterations = step + 1;
    }
    if (report.relative_residual > _options.tolerance)
    {
      if (report.backward_error > _options.tolerance)
        throw NotConverged("direct solve residual " + std::to_string(report.relative_residual)
                           + " with backward error " + std::to_string(report.backward_error));
      report.roundoff_limited = true;
    }
    return x;
  }

  Vector conjugate_gradients(const Vector& rhs, SolveReport& report) const
  {
    const auto n = rhs.size();
    const long cap = _options.max_iterations > 0
                         ? _options.max_iterations
                         : static_cast<long>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
    const Vector inv_diag = _a.diagonal().cwiseInverse();
    Vector x = Vector::Zero(n);
    Vector r = rhs;
    Vector z = inv_diag.cwiseProduct(r);
    Vector p = z;
    double rz = r.dot(z);
    const double rhs_norm = rhs.norm();
    long it = 0;
    while (r.norm() > _options.tolerance * rhs_norm)
    {
      if (it >= cap)
      {
        detail::measure(_a, _a_inf, x, rhs, report);
        throw NotConverged("conjugate gradients exceeded " + std::to_string(cap)
                           + " iterations (relative residual "
                           + std::to_string(report.relative_residual) + ")");
      }
      const Vector ap = _a * p;
      const double curvature = p.dot(ap);
      if (curvature <= 0.0)
        throw NotSPD("conjugate gradients met a non-positive curvature direction");
      const double alpha = rz / curvature;
      x += alpha * p;
      r -= alpha * ap;
      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
      ++it;
    }
    report.iterations = it;
    detail::measure(_a, _a_inf, x, rhs, report);
    return x;
  }

  SparseMatrix _a;
  SolveOptions _options;
  SolveMethod _method = SolveMethod::automatic;
  double _a_inf = 0.0;
  Vector _scale;
  Eigen::LLT<Eigen::MatrixXd> _dense;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> _sparse;
};

struct SolveResult
{
  std::vector<Vector> solution; ///< one reduced vector per right-hand side
  std::vector<SolveReport> reports;
};

/// Solves system.matrix x_c = rhs_c for every component with one
/// factorisation.
inline SolveResult solve(const LinearSystem& system, const std::vector<Vector>& rhs,
                         SolveOptions options = {})
{
  const Solver solver(system.matrix, options);
  SolveResult result;
  for (const Vector& r : rhs)
  {
    SolveReport report;
    result.solution.push_back(solver.solve(r, report));
    result.reports.push_back(report);
  }
  return result;
}

} // namespace trihelm
