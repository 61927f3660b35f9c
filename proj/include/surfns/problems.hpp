#pragma once

#include <functional>
#include <string>
#include <vector>

#include "surfns/surface.hpp"

namespace surfns {

enum class ForcingMode { FullResidual, TangentialResidual };

/// Manufactured unsteady problem: exact tangential velocity and zero-mean
/// pressure on the exact surface. Spatial derivatives of the exact fields are
/// produced by the finite-difference surface-operator oracle below.
struct ProblemSpec {
  std::string name;
  Surface surface;
  std::function<Vec3(const Vec3&, double)> velocity;
  std::function<double(const Vec3&, double)> pressure;
  // Closed-form time derivative of the velocity; when absent the forcing
  // falls back to central time differences (step 1e-6).
  std::function<Vec3(const Vec3&, double)> velocity_dt;
  double mu = 0.5;
  ForcingMode forcing_mode = ForcingMode::FullResidual;
};

/// Surface curl u = n x grad_Gamma psi; tangential and surface-divergence
/// free for any smooth stream function.
Vec3 surface_curl(const Surface& surface, const std::function<double(const Vec3&)>& psi,
                  const Vec3& x, double fd_step = 1e-5);
Vec3 surface_curl_from_gradient(const Surface& surface, const Vec3& ambient_grad_psi,
                                const Vec3& x);

struct SurfaceOps {
  Mat3 tangential_gradient;  // grad_Gamma u (rows are components)
  Mat3 covariant_gradient;   // P grad_Gamma u
  Mat3 strain;               // E(u)
  double divergence;         // div_Gamma u
  Vec3 strain_divergence;    // div_Gamma E(u), row-wise surface divergence
};

struct OracleOptions {
  double first_step = 1e-5;   // central differences of u(pi(x))
  double second_step = 1e-4;  // outer step of the nested differences
};

/// Finite-difference surface operators of a vector field given on Gamma,
/// extended constantly in the normal direction through the projection.
SurfaceOps surface_operator_oracle(const Surface& surface,
                                   const std::function<Vec3(const Vec3&)>& field, const Vec3& x,
                                   const OracleOptions& opts = {});

/// Tangential gradient of a scalar field on Gamma by central differences of
/// its constant-normal extension.
Vec3 scalar_surface_gradient_oracle(const Surface& surface,
                                    const std::function<double(const Vec3&)>& field, const Vec3& x,
                                    double step = 1e-5);

/// Momentum residual of the exact fields. FullResidual keeps the ambient
/// vector (so the exact multiplier vanishes identically); TangentialResidual
/// projects it and pairs with lambda_exact = 2 mu n . div_Gamma E(u).
Vec3 forcing(const ProblemSpec& problem, const Vec3& x, double t, const OracleOptions& opts = {});

double exact_lambda(const ProblemSpec& problem, const Vec3& x, double t,
                    const OracleOptions& opts = {});

/// The two manufactured problems of the convergence studies plus a zero
/// problem, in this order: zero, varying-curvature stream function, sphere
/// Killing flow.
std::vector<ProblemSpec> builtin_problems();

ProblemSpec zero_problem(const Surface& surface);
ProblemSpec varying_curvature_problem();
ProblemSpec sphere_killing_problem();

}  // namespace surfns
