#include "surfns/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace surfns {

namespace {

// Reference coordinates from barycentric (l0, l1, l2): (xi, eta) = (l1, l2).
void push_orbit3(QuadratureRule& q, double a, double w) {
  q.points.emplace_back(a, a);
  q.points.emplace_back(1.0 - 2.0 * a, a);
  q.points.emplace_back(a, 1.0 - 2.0 * a);
  q.weights.insert(q.weights.end(), 3, w);
}

void push_orbit6(QuadratureRule& q, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const double bary[6][3] = {{c, a, b}, {c, b, a}, {a, c, b}, {b, c, a}, {a, b, c}, {b, a, c}};
  for (const auto& l : bary) q.points.emplace_back(l[1], l[2]);
  q.weights.insert(q.weights.end(), 6, w);
}

// Golub-Welsch nodes/weights from monic three-term recurrence coefficients.
void golub_welsch(const VecX& alpha, const VecX& beta, VecX& nodes, VecX& weights) {
  const int n = static_cast<int>(alpha.size());
  MatX jacobi = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = alpha[i];
    if (i + 1 < n) {
      const double off = std::sqrt(beta[i + 1]);
      jacobi(i, i + 1) = off;
      jacobi(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(jacobi);
  if (es.info() != Eigen::Success) throw EigensolveFailure("golub_welsch: eigensolve failed");
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = beta[0] * v0 * v0;
  }
}

// Gauss-Legendre on [0,1], weights summing to 1.
void gauss_legendre01(int n, VecX& x, VecX& w) {
  VecX alpha = VecX::Zero(n), beta(n);
  beta[0] = 2.0;
  for (int k = 1; k < n; ++k) beta[k] = k * k / (4.0 * k * k - 1.0);
  VecX t, wt;
  golub_welsch(alpha, beta, t, wt);
  x = (t.array() + 1.0) / 2.0;
  w = wt / 2.0;
}

// Gauss-Jacobi for the weight (1 - v) on [0,1]; weights sum to 1/2.
void gauss_jacobi10(int n, VecX& x, VecX& w) {
  VecX alpha(n), beta(n);
  for (int k = 0; k < n; ++k) alpha[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  beta[0] = 2.0;
  for (int k = 1; k < n; ++k) beta[k] = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
  VecX t, wt;
  golub_welsch(alpha, beta, t, wt);
  x = (t.array() + 1.0) / 2.0;
  w = wt / 4.0;
}

QuadratureRule conical_rule(int degree) {
  const int n = (degree + 2) / 2;  // 2n-1 >= degree
  VecX xu, wu, xv, wv;
  gauss_legendre01(n, xu, wu);
  gauss_jacobi10(n, xv, wv);
  QuadratureRule q;
  q.degree = degree;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      q.points.emplace_back(xu[i] * (1.0 - xv[j]), xv[j]);
      q.weights.push_back(wu[i] * wv[j]);
    }
  }
  return q;
}

}  // namespace

QuadratureRule quadrature(int degree) {
  if (degree < 1 || degree > 12) throw UnsupportedDegree("quadrature: degree must be in [1, 12]");
  QuadratureRule q;
  switch (degree) {
    case 1:
      q.degree = 1;
      q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      q.weights.push_back(0.5);
      return q;
    case 2:
      q.degree = 2;
      push_orbit3(q, 1.0 / 6.0, 1.0 / 6.0);
      return q;
    case 3:
    case 4:
      q.degree = 4;
      push_orbit3(q, 0.445948490915965, 0.223381589678011 / 2.0);
      push_orbit3(q, 0.091576213509771, 0.109951743655322 / 2.0);
      return q;
    case 5:
      q.degree = 5;
      q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      q.weights.push_back(9.0 / 80.0);
      push_orbit3(q, 0.470142064105115, 0.132394152788506 / 2.0);
      push_orbit3(q, 0.101286507323456, 0.125939180544827 / 2.0);
      return q;
    case 6:
      q.degree = 6;
      push_orbit3(q, 0.063089014491502, 0.050844906370207 / 2.0);
      push_orbit3(q, 0.249286745170910, 0.116786275726379 / 2.0);
      push_orbit6(q, 0.053145049844817, 0.310352451033784, 0.082851075618374 / 2.0);
      return q;
    default:
      return conical_rule(degree);
  }
}

}  // namespace surfns
