#include "surfns/surface.hpp"

#include <cmath>

namespace surfns {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Surface Surface::sphere(double radius) {
  Surface s;
  s.kind_ = Kind::Sphere;
  s.radius_ = radius;
  return s;
}

Surface Surface::level_set(LevelSetDesc desc) {
  Surface s;
  s.kind_ = Kind::LevelSet;
  s.desc_ = std::move(desc);
  return s;
}

Surface Surface::varying_curvature() {
  LevelSetDesc d;
  d.value = [](const Vec3& x) {
    const double w = 1.0 + 0.5 * std::sin(kPi * x[0]);
    return 0.25 * x[0] * x[0] + x[1] * x[1] + 4.0 * x[2] * x[2] / (w * w) - 1.0;
  };
  d.gradient = [](const Vec3& x) {
    const double s = std::sin(kPi * x[0]);
    const double c = std::cos(kPi * x[0]);
    const double w = 1.0 + 0.5 * s;
    const double dw = 0.5 * kPi * c;  // dw/dx1
    Vec3 g;
    g[0] = 0.5 * x[0] - 8.0 * x[2] * x[2] * dw / (w * w * w);
    g[1] = 2.0 * x[1];
    g[2] = 8.0 * x[2] / (w * w);
    return g;
  };
  d.hessian = [](const Vec3& x) {
    const double s = std::sin(kPi * x[0]);
    const double c = std::cos(kPi * x[0]);
    const double w = 1.0 + 0.5 * s;
    const double dw = 0.5 * kPi * c;
    const double ddw = -0.5 * kPi * kPi * s;
    const double z2 = x[2] * x[2];
    Mat3 h = Mat3::Zero();
    // d/dx1 of (-8 z^2 dw / w^3)
    h(0, 0) = 0.5 - 8.0 * z2 * (ddw / (w * w * w) - 3.0 * dw * dw / (w * w * w * w));
    h(1, 1) = 2.0;
    h(2, 2) = 8.0 / (w * w);
    h(0, 2) = h(2, 0) = -16.0 * x[2] * dw / (w * w * w);
    return h;
  };
  d.sphere_map = [](const Vec3& p) {
    return Vec3(2.0 * p[0], p[1], 0.5 * p[2] * (1.0 + 0.5 * std::sin(2.0 * kPi * p[0])));
  };
  return level_set(std::move(d));
}

bool Surface::has_sphere_map() const {
  return kind_ == Kind::Sphere || static_cast<bool>(desc_.sphere_map);
}

Vec3 Surface::map_from_unit_sphere(const Vec3& p) const {
  if (kind_ == Kind::Sphere) return radius_ * p;
  if (!desc_.sphere_map) throw Error("surface has no sphere map");
  return desc_.sphere_map(p);
}

double Surface::level_set_value(const Vec3& x) const {
  if (kind_ == Kind::Sphere) return x.norm() - radius_;
  return desc_.value(x);
}

Vec3 Surface::level_set_gradient(const Vec3& x) const {
  if (kind_ == Kind::Sphere) {
    const double r = x.norm();
    if (r < 1e-12) throw DegenerateGradient("level_set_gradient: at sphere center");
    return x / r;
  }
  return desc_.gradient(x);
}

Vec3 Surface::closest_point(const Vec3& x) const {
  if (kind_ == Kind::Sphere) {
    const double r = x.norm();
    if (r < 1e-12) throw OutOfReach("closest_point: query at sphere center");
    return (radius_ / r) * x;
  }

  // First-order closest-point iteration with tangential correction steps.
  // Each sweep pushes the iterate onto the level set along grad(phi), then
  // slides it tangentially toward the foot point of x. Near the focal set
  // the sweep contraction degrades, so a damped Newton on the full system
  // {p + s grad(phi) = x, phi(p) = 0} finishes off the remaining cases.
  Vec3 p = x;
  const double scale = std::max(1.0, x.norm());
  auto polish_onto_surface = [&](Vec3& q) {
    for (int inner = 0; inner < 6; ++inner) {
      const double phi = desc_.value(q);
      if (std::abs(phi) < 1e-14 * scale) break;
      const Vec3 g = desc_.gradient(q);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-20) throw DegenerateGradient("closest_point: vanishing gradient");
      q -= (phi / g2) * g;
    }
  };
  auto converged = [&](const Vec3& q, double tol_t) {
    if (std::abs(desc_.value(q)) > projection_tolerance) return false;
    const Vec3 n = desc_.gradient(q).normalized();
    const Vec3 r = x - q;
    return (r - r.dot(n) * n).norm() <= tol_t;
  };

  const int first_order_sweeps = std::min(max_newton_iters, 12);
  for (int sweep = 0; sweep < first_order_sweeps; ++sweep) {
    polish_onto_surface(p);
    const Vec3 n = desc_.gradient(p).normalized();
    const Vec3 r = x - p;
    const Vec3 t = r - r.dot(n) * n;
    if (t.norm() <= 1e-13 * scale && std::abs(desc_.value(p)) <= projection_tolerance) return p;
    p += t;
    if ((p - x).norm() > 1.0 + 0.5 * scale) {
      throw OutOfReach("closest_point: iterate left the tubular neighborhood");
    }
  }
  if (converged(p, 1e-13 * scale)) return p;

  // Newton on F(p, s) = (p + s grad(phi) - x, phi(p)) with step damping.
  polish_onto_surface(p);
  {
    Vec3 g = desc_.gradient(p);
    double s = (x - p).dot(g) / g.squaredNorm();
    for (int it = first_order_sweeps; it < max_newton_iters; ++it) {
      g = desc_.gradient(p);
      const Mat3 hess = desc_.hessian(p);
      Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
      jac.topLeftCorner<3, 3>() = Mat3::Identity() + s * hess;
      jac.block<3, 1>(0, 3) = g;
      jac.block<1, 3>(3, 0) = g.transpose();
      Eigen::Vector4d rhs;
      rhs.head<3>() = -(p + s * g - x);
      rhs[3] = -desc_.value(p);
      const Eigen::Vector4d delta = jac.fullPivLu().solve(rhs);
      double damp = 1.0;
      const double dp_norm = delta.head<3>().norm();
      if (dp_norm > 0.25) damp = 0.25 / dp_norm;
      p += damp * delta.head<3>();
      s += damp * delta[3];
      if (dp_norm * damp < 1e-14 * scale) break;
      if ((p - x).norm() > 1.0 + 0.5 * scale) {
        throw OutOfReach("closest_point: iterate left the tubular neighborhood");
      }
    }
  }
  polish_onto_surface(p);
  if (converged(p, std::max(1e-12 * scale, 1e-10 * (x - p).norm()))) return p;
  throw NonConvergence("closest_point: Newton iteration did not converge");
}

double Surface::signed_distance(const Vec3& x) const {
  if (kind_ == Kind::Sphere) return x.norm() - radius_;
  const Vec3 p = closest_point(x);
  const double dist = (x - p).norm();
  return desc_.value(x) >= 0.0 ? dist : -dist;
}

Vec3 Surface::normal(const Vec3& p) const {
  if (kind_ == Kind::Sphere) {
    const double r = p.norm();
    if (r < 1e-12) throw DegenerateGradient("normal: at sphere center");
    return p / r;
  }
  const Vec3 g = desc_.gradient(p);
  const double gn = g.norm();
  if (gn < 1e-10) throw DegenerateGradient("normal: |grad phi| below 1e-10");
  return g / gn;
}

Mat3 Surface::weingarten(const Vec3& p) const {
  if (kind_ == Kind::Sphere) {
    return tangent_projector(normal(p)) / radius_;
  }
  const Vec3 g = desc_.gradient(p);
  const double gn = g.norm();
  if (gn < 1e-10) throw DegenerateGradient("weingarten: |grad phi| below 1e-10");
  const Mat3 P = tangent_projector(g / gn);
  return P * (desc_.hessian(p) / gn) * P;
}

Mat3 Surface::weingarten_fd(const Vec3& p, double step) const {
  // Central differences of the extended normal field n(pi(x)); columns are
  // ambient derivatives, projected on the right to the tangent plane.
  Mat3 grad_n;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = p, xm = p;
    xp[j] += step;
    xm[j] -= step;
    const Vec3 np = normal(closest_point(xp));
    const Vec3 nm = normal(closest_point(xm));
    grad_n.col(j) = (np - nm) / (2.0 * step);
  }
  return grad_n * tangent_projector(normal(p));
}

}  // namespace surfns
