#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "jet.hpp"

namespace trihelm
{

/// Bivariate polynomial sum_{p+q<=degree} c[p][q] x^p y^q with a dense
/// coefficient grid. Used for the manufactured solution calculus and for
/// building element generators.
class Polynomial2D
{
public:
  Polynomial2D() : Polynomial2D(0) {}

  explicit Polynomial2D(int degree)
      : _degree(std::max(degree, 0)),
        _c(static_cast<std::size_t>((_degree + 1) * (_degree + 1)), 0.0)
  {
  }

  static Polynomial2D constant(double c)
  {
    Polynomial2D p(0);
    p.coeff(0, 0) = c;
    return p;
  }

  /// a + bx x + by y
  static Polynomial2D affine(double a, double bx, double by)
  {
    Polynomial2D p(1);
    p.coeff(0, 0) = a;
    p.coeff(1, 0) = bx;
    p.coeff(0, 1) = by;
    return p;
  }

  static Polynomial2D monomial(int px, int py, double c = 1.0)
  {
    Polynomial2D p(px + py);
    p.coeff(px, py) = c;
    return p;
  }

  /// Storage bound; coefficients above it are zero.
  int degree() const { return _degree; }

  /// Actual total degree (highest p+q with a nonzero coefficient), -1 for 0.
  int effective_degree() const
  {
    for (int d = _degree; d >= 0; --d)
      for (int p = 0; p <= d; ++p)
        if (coeff(p, d - p) != 0.0)
          return d;
    return -1;
  }

  double& coeff(int p, int q)
  {
    return _c[static_cast<std::size_t>(p * (_degree + 1) + q)];
  }
  double coeff(int p, int q) const
  {
    if (p < 0 || q < 0 || p + q > _degree)
      return 0.0;
    return _c[static_cast<std::size_t>(p * (_degree + 1) + q)];
  }

  double operator()(double x, double y) const
  {
    // Horner in x over Horner-in-y rows
    double result = 0.0;
    for (int p = _degree; p >= 0; --p)
    {
      double row = 0.0;
      for (int q = _degree - p; q >= 0; --q)
        row = row * y + coeff(p, q);
      result = result * x + row;
    }
    return result;
  }

  Polynomial2D dx() const
  {
    Polynomial2D r(std::max(_degree - 1, 0));
    for (int p = 1; p <= _degree; ++p)
      for (int q = 0; p + q <= _degree; ++q)
        r.coeff(p - 1, q) = p * coeff(p, q);
    return r;
  }

  Polynomial2D dy() const
  {
    Polynomial2D r(std::max(_degree - 1, 0));
    for (int p = 0; p <= _degree; ++p)
      for (int q = 1; p + q <= _degree; ++q)
        r.coeff(p, q - 1) = q * coeff(p, q);
    return r;
  }

  /// d^{a+b}/dx^a dy^b
  Polynomial2D derivative(int a, int b) const
  {
    Polynomial2D r = *this;
    for (int i = 0; i < a; ++i)
      r = r.dx();
    for (int i = 0; i < b; ++i)
      r = r.dy();
    return r;
  }

  Polynomial2D laplacian() const { return dx().dx() + dy().dy(); }

  Polynomial2D& operator+=(const Polynomial2D& o)
  {
    if (o._degree > _degree)
      *this = promoted(o._degree);
    for (int p = 0; p <= o._degree; ++p)
      for (int q = 0; p + q <= o._degree; ++q)
        coeff(p, q) += o.coeff(p, q);
    return *this;
  }

  Polynomial2D& operator*=(double s)
  {
    for (double& c : _c)
      c *= s;
    return *this;
  }

  friend Polynomial2D operator+(Polynomial2D a, const Polynomial2D& b)
  {
    return a += b;
  }
  friend Polynomial2D operator-(Polynomial2D a, const Polynomial2D& b)
  {
    return a += (-1.0) * b;
  }
  friend Polynomial2D operator*(double s, Polynomial2D a) { return a *= s; }
  friend Polynomial2D operator*(Polynomial2D a, double s) { return a *= s; }

  friend Polynomial2D operator*(const Polynomial2D& a, const Polynomial2D& b)
  {
    Polynomial2D r(a._degree + b._degree);
    for (int p = 0; p <= a._degree; ++p)
      for (int q = 0; p + q <= a._degree; ++q)
      {
        const double ca = a.coeff(p, q);
        if (ca == 0.0)
          continue;
        for (int s = 0; s <= b._degree; ++s)
          for (int t = 0; s + t <= b._degree; ++t)
            r.coeff(p + s, q + t) += ca * b.coeff(s, t);
      }
    return r;
  }

  Polynomial2D pow(int k) const
  {
    Polynomial2D r = constant(1.0);
    for (int i = 0; i < k; ++i)
      r = r * *this;
    return r;
  }

  /// Exact integral over the reference triangle (0,0),(1,0),(0,1):
  /// int x^p y^q = p! q! / (p+q+2)!.
  double integrate_reference_triangle() const
  {
    double sum = 0.0;
    for (int p = 0; p <= _degree; ++p)
      for (int q = 0; p + q <= _degree; ++q)
        if (coeff(p, q) != 0.0)
          sum += coeff(p, q) * std::exp(std::lgamma(p + 1.0) + std::lgamma(q + 1.0)
                                        - std::lgamma(p + q + 3.0));
    return sum;
  }

  /// Exact integral over the unit square.
  double integrate_unit_square() const
  {
    double sum = 0.0;
    for (int p = 0; p <= _degree; ++p)
      for (int q = 0; p + q <= _degree; ++q)
        sum += coeff(p, q) / ((p + 1.0) * (q + 1.0));
    return sum;
  }

private:
  Polynomial2D promoted(int degree) const
  {
    Polynomial2D r(degree);
    for (int p = 0; p <= _degree; ++p)
      for (int q = 0; p + q <= _degree; ++q)
        r.coeff(p, q) = coeff(p, q);
    return r;
  }

  int _degree;
  std::vector<double> _c;
};

/// A polynomial together with its derivative polynomials up to order 3,
/// for repeated jet evaluation.
class PolynomialJet
{
public:
  PolynomialJet() = default;
  explicit PolynomialJet(const Polynomial2D& p)
  {
    int idx = 0;
    for (int order = 0; order <= 3; ++order)
      for (int b = 0; b <= order; ++b)
        _d[static_cast<std::size_t>(idx++)] = p.derivative(order - b, b);
  }

  Jet operator()(const Vec2& x) const
  {
    std::array<double, 10> c{};
    for (std::size_t i = 0; i < 10; ++i)
      c[i] = _d[i](x.x(), x.y());
    return Jet::from_components(c);
  }

  const Polynomial2D& polynomial() const { return _d[0]; }

private:
  std::array<Polynomial2D, 10> _d;
};

} // namespace trihelm
