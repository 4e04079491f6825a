#pragma once

#include <array>
#include <cassert>

#include <Eigen/Dense>

namespace trihelm
{

using Vec2 = Eigen::Vector2d;

/// Value and partial derivatives up to order 3 of a scalar function at one
/// point. Symmetric tensors are stored by their distinct components:
/// hess = (xx, xy, yy), third = (xxx, xxy, xyy, yyy).
struct Jet
{
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 3> hess{};
  std::array<double, 4> third{};

  /// Partial derivative d^{a+b}/dx^a dy^b, a+b <= 3.
  double partial(int a, int b) const
  {
    assert(a >= 0 && b >= 0 && a + b <= 3);
    switch (a + b)
    {
    case 0:
      return value;
    case 1:
      return grad[static_cast<std::size_t>(b)];
    case 2:
      return hess[static_cast<std::size_t>(b)];
    default:
      return third[static_cast<std::size_t>(b)];
    }
  }

  /// (value, x, y, xx, xy, yy, xxx, xxy, xyy, yyy)
  std::array<double, 10> components() const
  {
    return {value,   grad[0],  grad[1],  hess[0],  hess[1],
            hess[2], third[0], third[1], third[2], third[3]};
  }

  static Jet from_components(const std::array<double, 10>& c)
  {
    Jet j;
    j.value = c[0];
    j.grad = {c[1], c[2]};
    j.hess = {c[3], c[4], c[5]};
    j.third = {c[6], c[7], c[8], c[9]};
    return j;
  }

  Vec2 gradient() const { return {grad[0], grad[1]}; }

  Eigen::Matrix2d hessian() const
  {
    Eigen::Matrix2d h;
    h << hess[0], hess[1], hess[1], hess[2];
    return h;
  }

  /// Entry (i, j, k) of the third-derivative tensor, indices in {0, 1}.
  double third_tensor(int i, int j, int k) const
  {
    return third[static_cast<std::size_t>(i + j + k)];
  }

  double laplacian() const { return hess[0] + hess[2]; }

  /// grad(laplacian)
  Vec2 grad_laplacian() const
  {
    return {third[0] + third[2], third[1] + third[3]};
  }

  Jet& operator-=(const Jet& o)
  {
    value -= o.value;
    for (std::size_t i = 0; i < 2; ++i)
      grad[i] -= o.grad[i];
    for (std::size_t i = 0; i < 3; ++i)
      hess[i] -= o.hess[i];
    for (std::size_t i = 0; i < 4; ++i)
      third[i] -= o.third[i];
    return *this;
  }

  Jet& axpy(double a, const Jet& o)
  {
    value += a * o.value;
    for (std::size_t i = 0; i < 2; ++i)
      grad[i] += a * o.grad[i];
    for (std::size_t i = 0; i < 3; ++i)
      hess[i] += a * o.hess[i];
    for (std::size_t i = 0; i < 4; ++i)
      third[i] += a * o.third[i];
    return *this;
  }

  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
};

/// Full (Frobenius) pairings of the derivative tensors of order k.
inline double frobenius(const Jet& u, const Jet& v, int order)
{
  switch (order)
  {
  case 0:
    return u.value * v.value;
  case 1:
    return u.grad[0] * v.grad[0] + u.grad[1] * v.grad[1];
  case 2:
    return u.hess[0] * v.hess[0] + 2.0 * u.hess[1] * v.hess[1]
           + u.hess[2] * v.hess[2];
  default:
    return u.third[0] * v.third[0] + 3.0 * u.third[1] * v.third[1]
           + 3.0 * u.third[2] * v.third[2] + u.third[3] * v.third[3];
  }
}

/// Sum over multi-indices |alpha| = order of d^alpha u * d^alpha v, each
/// multi-index counted once (the Sobolev seminorm convention).
inline double multi_index_product(const Jet& u, const Jet& v, int order)
{
  double s = 0.0;
  for (int b = 0; b <= order; ++b)
    s += u.partial(order - b, b) * v.partial(order - b, b);
  return s;
}

} // namespace trihelm
