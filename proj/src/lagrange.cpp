#include "surfns/lagrange.hpp"

#include <array>
#include <mutex>

namespace surfns {

namespace {

struct Monomial {
  int px, py;
};

std::vector<Monomial> monomials(int degree) {
  std::vector<Monomial> m;
  for (int total = 0; total <= degree; ++total) {
    for (int px = total; px >= 0; --px) m.push_back({px, total - px});
  }
  return m;
}

std::vector<Vec2> lagrange_nodes(int degree) {
  const double k = degree;
  std::vector<Vec2> nodes;
  nodes.emplace_back(0.0, 0.0);
  nodes.emplace_back(1.0, 0.0);
  nodes.emplace_back(0.0, 1.0);
  // edge (v0,v1): eta = 0
  for (int i = 1; i < degree; ++i) nodes.emplace_back(i / k, 0.0);
  // edge (v1,v2): from (1,0) to (0,1)
  for (int i = 1; i < degree; ++i) nodes.emplace_back((k - i) / k, i / k);
  // edge (v2,v0): from (0,1) to (0,0)
  for (int i = 1; i < degree; ++i) nodes.emplace_back(0.0, (k - i) / k);
  // interior, lexicographic in barycentric (l0, l1, l2); at most one for k<=3
  for (int i = 1; i < degree; ++i) {
    for (int j = 1; i + j < degree; ++j) nodes.emplace_back(i / k, j / k);
  }
  return nodes;
}

ReferenceElement build_reference(int degree) {
  ReferenceElement re;
  re.degree = degree;
  re.nodes = lagrange_nodes(degree);
  const auto mono = monomials(degree);
  const int n = static_cast<int>(re.nodes.size());
  MatX vander(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      vander(i, j) = std::pow(re.nodes[i][0], mono[j].px) * std::pow(re.nodes[i][1], mono[j].py);
    }
  }
  re.coeff = vander.fullPivLu().solve(MatX::Identity(n, n));
  return re;
}

double mono_val(const Monomial& m, double x, double y) {
  return std::pow(x, m.px) * std::pow(y, m.py);
}

}  // namespace

VecX ReferenceElement::values(const Vec2& p) const {
  const auto mono = monomials(degree);
  const int n = node_count();
  VecX mv(n);
  for (int j = 0; j < n; ++j) mv[j] = mono_val(mono[j], p[0], p[1]);
  return coeff.transpose() * mv;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> ReferenceElement::gradients(const Vec2& p) const {
  const auto mono = monomials(degree);
  const int n = node_count();
  MatX dm(n, 2);
  for (int j = 0; j < n; ++j) {
    const auto& m = mono[j];
    dm(j, 0) = m.px > 0 ? m.px * std::pow(p[0], m.px - 1) * std::pow(p[1], m.py) : 0.0;
    dm(j, 1) = m.py > 0 ? m.py * std::pow(p[0], m.px) * std::pow(p[1], m.py - 1) : 0.0;
  }
  return coeff.transpose() * dm;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> ReferenceElement::second_derivatives(const Vec2& p) const {
  const auto mono = monomials(degree);
  const int n = node_count();
  MatX dm(n, 3);
  for (int j = 0; j < n; ++j) {
    const auto& m = mono[j];
    dm(j, 0) = m.px > 1 ? m.px * (m.px - 1) * std::pow(p[0], m.px - 2) * std::pow(p[1], m.py) : 0.0;
    dm(j, 1) = (m.px > 0 && m.py > 0)
                   ? m.px * m.py * std::pow(p[0], m.px - 1) * std::pow(p[1], m.py - 1)
                   : 0.0;
    dm(j, 2) = m.py > 1 ? m.py * (m.py - 1) * std::pow(p[0], m.px) * std::pow(p[1], m.py - 2) : 0.0;
  }
  return coeff.transpose() * dm;
}

const ReferenceElement& reference_element(int degree) {
  if (degree < 1 || degree > 3) throw UnsupportedDegree("reference_element: degree must be 1..3");
  static std::array<ReferenceElement, 3> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int k = 1; k <= 3; ++k) cache[k - 1] = build_reference(k);
  });
  return cache[degree - 1];
}

}  // namespace surfns
