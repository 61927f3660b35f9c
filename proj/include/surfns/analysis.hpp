#pragma once

#include "surfns/solver.hpp"

namespace surfns {

/// Per-level error norms: L-infinity-in-time L2 norms of the full velocity,
/// its tangential part and the normal residual u_h . n_h, and dt-weighted
/// l2-in-time L2 norms of the covariant-gradient and pressure errors. Exact
/// fields are compared on Gamma_h via the inverse lift.
struct ErrorReport {
  double h = 0.0;
  double dt = 0.0;
  int ndof_u = 0;
  int ndof_p = 0;
  int ndof_lambda = 0;
  double err_u_linf_l2 = 0.0;
  double err_pu_linf_l2 = 0.0;
  double err_n_linf_l2 = 0.0;
  double err_grad_l2l2 = 0.0;
  double err_p_l2l2 = 0.0;
  double err_lambda_l2l2 = 0.0;
};

ErrorReport error_norms(const Trajectory& trajectory, const ProblemSpec& problem,
                        const THSpaces& spaces, const TimeConfig& config);

/// EOC_k = log(e_k / e_{k+1}) / log(h_k / h_{k+1}); size errors.size() - 1.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

struct InfSupResult {
  double beta_l2 = 0.0;  // L2 x L2 pressure norm against the a_h velocity norm
  double beta_h1 = 0.0;  // L2 x H^-1 pressure norm against the H1 velocity norm
};

/// Smallest constraint singular value from the pressure-side Schur
/// eigenproblem B^T A^{-1} B q = sigma^2 M q, restricted away from the
/// constant-pressure kernel. Small meshes only (dense eigensolve).
InfSupResult estimate_infsup(const THSpaces& spaces, const AssemblyOptions& opts = {});

/// 2-norm condition number estimate of a (small) sparse matrix by dense SVD.
double estimate_condition(const SpMat& matrix);

struct GeometricErrors {
  double max_distance = 0.0;          // max |d| over quadrature points
  double max_normal_error = 0.0;      // max |n - n_h|
  double max_weingarten_error = 0.0;  // max |H - H_h|_F
};

GeometricErrors geometric_error_report(const Surface& surface, const HighOrderMesh& mesh,
                                       int quad_degree = 6);

/// Kinetic energies ||u_h^n||^2 along a trajectory.
std::vector<double> kinetic_energies(const Trajectory& trajectory, const THSpaces& spaces,
                                     const AssemblyOptions& opts = {});

}  // namespace surfns
