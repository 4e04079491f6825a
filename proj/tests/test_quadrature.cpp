#include <cmath>

#include <gtest/gtest.h>

#include <trihelm/checks.hpp>
#include <trihelm/quadrature.hpp>

using namespace trihelm;
using namespace trihelm::quadrature;

namespace
{

double integrate(const TriangleRule& r, int p, int q)
{
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    s += r.weights[i] * std::pow(r.points[i][0], p) * std::pow(r.points[i][1], q);
  return s;
}

double integrate(const SegmentRule& r, int p)
{
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    s += r.weights[i] * std::pow(r.points[i][0], p);
  return s;
}

} // namespace

TEST(Quadrature, AreaOfReferenceTriangle)
{
  EXPECT_NEAR(integrate(triangle_rule(0), 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(integrate(assembly_rule(), 0, 0), 0.5, 1e-15);
}

TEST(Quadrature, FactorialOracleForX10Y4)
{
  // 10! 4! / 16!
  const double exact = 3628800.0 * 24.0 / 20922789888000.0;
  EXPECT_NEAR(integrate(assembly_rule(), 10, 4) / exact, 1.0, 1e-12);
}

TEST(Quadrature, Degree14RuleOnX7Y7)
{
  // 7! 7! / 16!
  const double exact = 5040.0 * 5040.0 / 20922789888000.0;
  EXPECT_NEAR(integrate(triangle_rule(14), 7, 7) / exact, 1.0, 1e-12);
}

TEST(Quadrature, SegmentExamples)
{
  const SegmentRule four = segment_rule(7);
  EXPECT_EQ(four.size(), 4u);
  EXPECT_NEAR(integrate(four, 7), 0.125, 1e-14);
  const SegmentRule one = segment_rule(1);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_NEAR(integrate(one, 0), 1.0, 1e-15);
  // negative control: four points cannot integrate x^8
  EXPECT_GT(std::abs(integrate(four, 8) - 1.0 / 9.0), 1e-12);
}

TEST(Quadrature, TriangleExactnessSweepAndNoOverPromotion)
{
  for (int d = 0; d <= max_triangle_degree; ++d)
  {
    const TriangleRule r = triangle_rule(d);
    EXPECT_GE(r.exact_degree, d);
    EXPECT_LE(triangle_rule_error(r, r.exact_degree), 1e-12) << "degree " << d;
    EXPECT_GT(triangle_rule_error(r, r.exact_degree + 2), 1e-12) << "degree " << d;
    double sum = 0.0;
    for (double w : r.weights)
    {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 0.5, 1e-14);
  }
}

TEST(Quadrature, SegmentExactnessSweepAndNoOverPromotion)
{
  for (int d = 0; d <= max_segment_degree; ++d)
  {
    const SegmentRule r = segment_rule(d);
    EXPECT_GE(r.exact_degree, d);
    EXPECT_EQ(static_cast<int>(r.size()), std::max(1, (d + 2) / 2));
    EXPECT_LE(segment_rule_error(r, r.exact_degree), 1e-12) << "degree " << d;
    EXPECT_GT(segment_rule_error(r, r.exact_degree + 2), 1e-12) << "degree " << d;
    double sum = 0.0;
    for (double w : r.weights)
    {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Quadrature, AdvertisedRulesMeetTheirDegrees)
{
  EXPECT_GE(assembly_rule().exact_degree, 14);
  EXPECT_GE(edge_rule().exact_degree, 7);
  EXPECT_LE(triangle_rule_error(assembly_rule(), 14), 1e-12);
  EXPECT_LE(segment_rule_error(edge_rule(), 7), 1e-12);
}

TEST(Quadrature, UnsupportedDegreesThrow)
{
  EXPECT_THROW(triangle_rule(max_triangle_degree + 1), UnsupportedDegree);
  EXPECT_THROW(segment_rule(max_segment_degree + 1), UnsupportedDegree);
}
