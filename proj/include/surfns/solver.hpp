#pragma once

#include "surfns/assembly.hpp"
#include "surfns/problems.hpp"

namespace surfns {

struct LinearSolverOptions {
  enum class Backend { DirectLU, GMRES };
  Backend backend = Backend::DirectLU;
  double tolerance = 1e-10;  // relative residual target
  int gmres_restart = 50;
  int gmres_max_iters = 400;
};

struct LinearSolveInfo {
  double rel_residual = 0.0;
  int iterations = 0;
};

/// Sparse direct factorization by default; optionally restarted GMRES
/// preconditioned with the factorization. Throws SingularSystem on breakdown
/// and NonConvergence when the iteration budget is exhausted.
VecX solve_linear(const SpMat& matrix, const VecX& rhs, const LinearSolverOptions& opts = {},
                  LinearSolveInfo* info = nullptr);

enum class Formulation { Lagrange, Penalty };
enum class Inertia { Plain, Skew };
enum class InitialCondition { NodalInterpolation, DiscreteRitzStokes };

struct TimeConfig {
  double dt = 0.1;
  double t_end = 1.0;
  double mu = 0.5;
  Formulation formulation = Formulation::Lagrange;
  Inertia inertia = Inertia::Plain;
  bool zeroth_order = true;
  InitialCondition initial_condition = InitialCondition::DiscreteRitzStokes;
  double tau_alpha = 2.5;  // penalty coefficient, tau = tau_alpha / h^2
  NormalMode penalty_normal = NormalMode::Improved;
  // Free-decay runs: keep the problem's initial velocity but drop the load.
  bool zero_forcing = false;
  AssemblyOptions assembly;
  LinearSolverOptions linear;
  OracleOptions oracle;
};

struct StokesSolution {
  VecX u, p, lambda;
  double mean_multiplier = 0.0;
  LinearSolveInfo info;
  double constraint_residual = 0.0;  // max basis-wise |b_h^L(u_h, .)|
  double pressure_mean = 0.0;        // |int p_h|
};

struct StepDiagnostics {
  double time = 0.0;
  double linear_residual = 0.0;
  double kinetic_energy = 0.0;        // ||u^n||^2_{L2}
  double constraint_residual = 0.0;   // max over pressure/lambda test basis
  double pressure_mean = 0.0;
  double energy_lhs = 0.0;            // (||u^n||^2-||u^{n-1}||^2+||du||^2)/2 + dt*a-terms
  double forcing_pairing = 0.0;       // dt * (f^n, u^n)
};

struct Trajectory {
  std::vector<double> times;    // N+1
  std::vector<VecX> velocity;   // N+1
  std::vector<VecX> pressure;   // N
  std::vector<VecX> lambda;     // N (empty vectors for the penalty formulation)
  std::vector<StepDiagnostics> steps;  // N
};

/// Stationary Stokes-type solve with L^2 forcing: velocity block
/// 2 mu * strain + mass against the Taylor-Hood constraint blocks.
StokesSolution steady_stokes_solve(const THSpaces& spaces, double mu,
                                   const std::function<Vec3(const Vec3&)>& rhs_field,
                                   const AssemblyOptions& assembly = {},
                                   const LinearSolverOptions& linear = {});

/// Modified Ritz-Stokes projection of an analytic tangential field: solves
/// the homogeneous-constraint saddle system with right side
/// a_h(I_h u0, v_h). The result is weakly divergence-free.
StokesSolution ritz_stokes_initial(const THSpaces& spaces,
                                   const std::function<Vec3(const Vec3&)>& u0,
                                   const AssemblyOptions& assembly = {},
                                   const LinearSolverOptions& linear = {});

/// BDF1 time loop for the linearized scheme: one saddle-point solve per step
/// with the inertia term frozen at the previous velocity.
Trajectory unsteady_solve(const THSpaces& spaces, const ProblemSpec& problem,
                          const TimeConfig& config);

}  // namespace surfns
