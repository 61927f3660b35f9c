#include "surfns/problems.hpp"

#include <cmath>

namespace surfns {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat3 ambient_jacobian_fd(const Surface& surface, const std::function<Vec3(const Vec3&)>& field,
                         const Vec3& x, double step) {
  // Central differences of the constant-normal extension u(pi(x)); column j
  // holds the derivative in ambient direction j.
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    jac.col(j) = (field(surface.closest_point(xp)) - field(surface.closest_point(xm))) /
                 (2.0 * step);
  }
  return jac;
}

Mat3 strain_at(const Surface& surface, const std::function<Vec3(const Vec3&)>& field,
               const Vec3& p, double step) {
  const Mat3 jac = ambient_jacobian_fd(surface, field, p, step);
  const Mat3 proj = surface.projector(p);
  const Mat3 cov = proj * jac * proj;
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

Vec3 surface_curl_from_gradient(const Surface& surface, const Vec3& ambient_grad_psi,
                                const Vec3& x) {
  return surface.normal(x).cross(ambient_grad_psi);
}

Vec3 surface_curl(const Surface& surface, const std::function<double(const Vec3&)>& psi,
                  const Vec3& x, double fd_step) {
  const Vec3 grad = scalar_surface_gradient_oracle(surface, psi, x, fd_step);
  return surface.normal(x).cross(grad);
}

Vec3 scalar_surface_gradient_oracle(const Surface& surface,
                                    const std::function<double(const Vec3&)>& field, const Vec3& x,
                                    double step) {
  Vec3 grad;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    grad[j] = (field(surface.closest_point(xp)) - field(surface.closest_point(xm))) /
              (2.0 * step);
  }
  return surface.projector(x) * grad;
}

SurfaceOps surface_operator_oracle(const Surface& surface,
                                   const std::function<Vec3(const Vec3&)>& field, const Vec3& x,
                                   const OracleOptions& opts) {
  SurfaceOps ops;
  const Mat3 proj = surface.projector(x);
  const Mat3 jac = ambient_jacobian_fd(surface, field, x, opts.first_step);
  ops.tangential_gradient = jac * proj;
  ops.covariant_gradient = proj * ops.tangential_gradient;
  ops.strain = 0.5 * (ops.covariant_gradient + ops.covariant_gradient.transpose());
  ops.divergence = ops.tangential_gradient.trace();

  // div_Gamma E by nested differences of the extended strain field.
  ops.strain_divergence = Vec3::Zero();
  const double H = opts.second_step;
  for (int k = 0; k < 3; ++k) {
    Vec3 xp = x, xm = x;
    xp[k] += H;
    xm[k] -= H;
    const Mat3 ep = strain_at(surface, field, surface.closest_point(xp), opts.first_step);
    const Mat3 em = strain_at(surface, field, surface.closest_point(xm), opts.first_step);
    const Mat3 de = (ep - em) / (2.0 * H);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ops.strain_divergence[i] += de(i, j) * proj(k, j);
    }
  }
  return ops;
}

Vec3 forcing(const ProblemSpec& problem, const Vec3& x, double t, const OracleOptions& opts) {
  const Surface& surface = problem.surface;
  const Vec3 p = surface.closest_point(x);
  auto frozen = [&](const Vec3& y) { return problem.velocity(y, t); };

  const SurfaceOps ops = surface_operator_oracle(surface, frozen, p, opts);
  const Vec3 u = problem.velocity(p, t);
  const Mat3 proj = surface.projector(p);

  Vec3 dudt;
  if (problem.velocity_dt) {
    dudt = problem.velocity_dt(p, t);
  } else {
    const double dt = 1e-6;
    dudt = (problem.velocity(p, t + dt) - problem.velocity(p, t - dt)) / (2.0 * dt);
  }

  const Vec3 convection = ops.covariant_gradient * (proj * u);
  const Vec3 grad_p = scalar_surface_gradient_oracle(
      surface, [&](const Vec3& y) { return problem.pressure(y, t); }, p, opts.first_step);

  const Vec3 full = dudt + convection - 2.0 * problem.mu * ops.strain_divergence + grad_p + u;
  if (problem.forcing_mode == ForcingMode::FullResidual) return full;
  return proj * full;
}

double exact_lambda(const ProblemSpec& problem, const Vec3& x, double t,
                    const OracleOptions& opts) {
  if (problem.forcing_mode == ForcingMode::FullResidual) return 0.0;
  const Surface& surface = problem.surface;
  const Vec3 p = surface.closest_point(x);
  auto frozen = [&](const Vec3& y) { return problem.velocity(y, t); };
  const SurfaceOps ops = surface_operator_oracle(surface, frozen, p, opts);
  return 2.0 * problem.mu * surface.normal(p).dot(ops.strain_divergence);
}

ProblemSpec zero_problem(const Surface& surface) {
  ProblemSpec ps;
  ps.name = "zero";
  ps.surface = surface;
  ps.velocity = [](const Vec3&, double) { return Vec3::Zero(); };
  ps.velocity_dt = [](const Vec3&, double) { return Vec3::Zero(); };
  ps.pressure = [](const Vec3&, double) { return 0.0; };
  return ps;
}

ProblemSpec varying_curvature_problem() {
  ProblemSpec ps;
  ps.name = "varying";
  ps.surface = Surface::varying_curvature();
  const Surface surf = ps.surface;
  // Stream function psi = (1-2t)/(2 pi) cos(2 pi x1) cos(2 pi x2) cos(2 pi x3);
  // u = curl_Gamma psi = n x grad psi.
  auto grad_psi_spatial = [](const Vec3& x) {
    const double s1 = std::sin(2.0 * kPi * x[0]), c1 = std::cos(2.0 * kPi * x[0]);
    const double s2 = std::sin(2.0 * kPi * x[1]), c2 = std::cos(2.0 * kPi * x[1]);
    const double s3 = std::sin(2.0 * kPi * x[2]), c3 = std::cos(2.0 * kPi * x[2]);
    return Vec3(-s1 * c2 * c3, -c1 * s2 * c3, -c1 * c2 * s3);
  };
  ps.velocity = [surf, grad_psi_spatial](const Vec3& x, double t) {
    return surf.normal(x).cross((1.0 - 2.0 * t) * grad_psi_spatial(x));
  };
  ps.velocity_dt = [surf, grad_psi_spatial](const Vec3& x, double) {
    return surf.normal(x).cross(-2.0 * grad_psi_spatial(x));
  };
  ps.pressure = [](const Vec3& x, double) {
    return std::sin(kPi * x[0]) * std::sin(2.0 * kPi * x[1]) * std::sin(2.0 * kPi * x[2]);
  };
  return ps;
}

ProblemSpec sphere_killing_problem() {
  ProblemSpec ps;
  ps.name = "sphere";
  ps.surface = Surface::sphere(1.0);
  // u = J(t) K_z with J = 1 + x3 (2 + t/2)^3 and K_z = 4 (-x2, x1, 0),
  // p = (1+t)^3 x1 x2^2 x3.
  auto kz = [](const Vec3& x) { return Vec3(-4.0 * x[1], 4.0 * x[0], 0.0); };
  ps.velocity = [kz](const Vec3& x, double t) -> Vec3 {
    const double g = std::pow(2.0 + 0.5 * t, 3);
    return (1.0 + x[2] * g) * kz(x);
  };
  ps.velocity_dt = [kz](const Vec3& x, double t) -> Vec3 {
    const double dg = 1.5 * std::pow(2.0 + 0.5 * t, 2);
    return x[2] * dg * kz(x);
  };
  ps.pressure = [](const Vec3& x, double t) {
    return std::pow(1.0 + t, 3) * x[0] * x[1] * x[1] * x[2];
  };
  return ps;
}

std::vector<ProblemSpec> builtin_problems() {
  return {zero_problem(Surface::sphere(1.0)), varying_curvature_problem(),
          sphere_killing_problem()};
}

}  // namespace surfns
