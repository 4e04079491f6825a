#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace trihelm::quadrature
{

/// Quadrature on a reference cell: the unit segment [0,1] (Dim = 1) or the
/// triangle (0,0),(1,0),(0,1) (Dim = 2).
template <int Dim>
struct QuadratureRule
{
  std::vector<std::array<double, Dim>> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return weights.size(); }
};

using SegmentRule = QuadratureRule<1>;
using TriangleRule = QuadratureRule<2>;

inline constexpr int max_segment_degree = 15;
inline constexpr int max_triangle_degree = 30;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int npoints)
{
  std::vector<double> x(static_cast<std::size_t>(npoints));
  std::vector<double> w(static_cast<std::size_t>(npoints));
  const int m = (npoints + 1) / 2;
  for (int i = 0; i < m; ++i)
  {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter)
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= npoints; ++k)
      {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = npoints * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    // recompute derivative at the converged node
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= npoints; ++k)
      {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = npoints * (z * p0 - p1) / (z * z - 1.0);
    }
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(npoints - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Gauss-Legendre with ceil((min_degree+1)/2) points mapped to [0,1].
inline SegmentRule segment_rule(int min_degree)
{
  if (min_degree > max_segment_degree)
    throw UnsupportedDegree("segment rule of degree "
                            + std::to_string(min_degree) + " not supported (max "
                            + std::to_string(max_segment_degree) + ")");
  const int npoints = std::max(1, (min_degree + 2) / 2);
  auto [x, w] = gauss_legendre(npoints);
  SegmentRule rule;
  rule.exact_degree = 2 * npoints - 1;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    rule.points.push_back({0.5 * (x[i] + 1.0)});
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

/// Collapsed-square (Duffy) product Gauss rule on the reference triangle.
/// With k points per direction it is exact to degree 2k - 2; all weights are
/// positive.
inline TriangleRule triangle_rule(int min_degree)
{
  if (min_degree > max_triangle_degree)
    throw UnsupportedDegree("triangle rule of degree "
                            + std::to_string(min_degree) + " not supported (max "
                            + std::to_string(max_triangle_degree) + ")");
  const int k = std::max(1, (min_degree + 3) / 2);
  auto [x, w] = gauss_legendre(k);
  TriangleRule rule;
  rule.exact_degree = 2 * k - 2;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double u = 0.5 * (x[i] + 1.0);
    for (std::size_t j = 0; j < x.size(); ++j)
    {
      const double v = 0.5 * (x[j] + 1.0);
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - u));
    }
  }
  return rule;
}

/// Assembly rule: exact for products of two degree-7 shape functions.
inline const TriangleRule& assembly_rule()
{
  static const TriangleRule rule = triangle_rule(14);
  return rule;
}

/// Edge rule: exact for degree-7 traces.
inline const SegmentRule& edge_rule()
{
  static const SegmentRule rule = segment_rule(7);
  return rule;
}

} // namespace trihelm::quadrature
