#pragma once

#include <vector>

#include "surfns/types.hpp"

namespace surfns {

/// Nodes and basis of the degree-k Lagrange element on the reference triangle
/// {xi >= 0, eta >= 0, xi + eta <= 1}. Canonical node order: the three
/// vertices (0,0), (1,0), (0,1); then the interior nodes of the edges
/// (v0,v1), (v1,v2), (v2,v0), each walked from first to second endpoint;
/// then interior nodes in lexicographic barycentric order.
struct ReferenceElement {
  int degree = 1;
  std::vector<Vec2> nodes;
  // Coefficients of each basis function over the monomial list; basis i is
  // sum_j coeff(j, i) * monomial_j.
  MatX coeff;

  int node_count() const { return static_cast<int>(nodes.size()); }

  /// Values of all basis functions at a reference point.
  VecX values(const Vec2& p) const;
  /// Reference gradients (d/dxi, d/deta), one row per basis function.
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(const Vec2& p) const;
  /// Second reference derivatives, rows per basis: (dxx, dxy, dyy).
  Eigen::Matrix<double, Eigen::Dynamic, 3> second_derivatives(const Vec2& p) const;
};

/// Cached reference element, degree in {1,2,3}.
const ReferenceElement& reference_element(int degree);

struct BasisEval {
  VecX values;
  Eigen::Matrix<double, Eigen::Dynamic, 2> ref_gradients;
};

inline BasisEval eval_basis(int degree, const Vec2& ref_pt) {
  const ReferenceElement& re = reference_element(degree);
  return {re.values(ref_pt), re.gradients(ref_pt)};
}

}  // namespace surfns
