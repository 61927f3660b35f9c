#pragma once

#include <vector>

#include "surfns/types.hpp"

namespace surfns {

/// Quadrature rule on the reference triangle; weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;  // polynomial exactness
  std::vector<Vec2> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Rule exact for all bivariate polynomials up to `degree`, 1 <= degree <= 12.
/// Low degrees use symmetric positive rules; higher degrees a conical product
/// (Gauss-Legendre x Gauss-Jacobi) rule, also with positive weights.
QuadratureRule quadrature(int degree);

}  // namespace surfns
