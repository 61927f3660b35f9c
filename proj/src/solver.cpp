#include "surfns/solver.hpp"

#include <cmath>

namespace surfns {

namespace {

using ColMat = Eigen::SparseMatrix<double>;

class LuFactorization {
 public:
  explicit LuFactorization(const SpMat& a) : col_(a) {
    lu_.compute(col_);
    if (lu_.info() != Eigen::Success) {
      throw SingularSystem("solve_linear: sparse LU factorization failed");
    }
  }
  VecX solve(const VecX& b) const { return lu_.solve(b); }

 private:
  ColMat col_;
  Eigen::SparseLU<ColMat> lu_;
};

// Restarted GMRES, right-preconditioned.
VecX gmres(const SpMat& a, const VecX& b, const LuFactorization& prec,
           const LinearSolverOptions& opts, LinearSolveInfo* info) {
  const int n = static_cast<int>(b.size());
  const double bnorm = b.norm();
  VecX x = VecX::Zero(n);
  if (bnorm == 0.0) {
    if (info) *info = {0.0, 0};
    return x;
  }
  const int m = opts.gmres_restart;
  int total_iters = 0;
  double res = 1.0;
  while (total_iters < opts.gmres_max_iters) {
    VecX r = b - a * x;
    double beta = r.norm();
    res = beta / bnorm;
    if (res <= opts.tolerance) break;
    MatX v(n, m + 1);
    MatX h = MatX::Zero(m + 1, m);
    VecX cs = VecX::Zero(m), sn = VecX::Zero(m), g = VecX::Zero(m + 1);
    v.col(0) = r / beta;
    g[0] = beta;
    int k = 0;
    for (; k < m && total_iters < opts.gmres_max_iters; ++k, ++total_iters) {
      VecX w = a * prec.solve(v.col(k));
      for (int i = 0; i <= k; ++i) {
        h(i, k) = w.dot(v.col(i));
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 1e-300) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      if (denom == 0.0) throw SingularSystem("gmres: breakdown");
      cs[k] = h(k, k) / denom;
      sn[k] = h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= opts.tolerance) {
        ++k;
        ++total_iters;
        break;
      }
    }
    VecX y = VecX::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
      y[i] = s / h(i, i);
    }
    VecX z = VecX::Zero(n);
    for (int i = 0; i < k; ++i) z += y[i] * v.col(i);
    x += prec.solve(z);
    res = (b - a * x).norm() / bnorm;
    if (res <= opts.tolerance) break;
  }
  if (res > opts.tolerance) {
    throw NonConvergence("gmres: iteration budget exhausted");
  }
  if (info) *info = {res, total_iters};
  return x;
}

struct AssembledBlocks {
  SpMat strain;
  SpMat mass;
  ConstraintBlocks constraints;
};

// Per-step saddle solves sharing one LU preconditioner across steps: only the
// frozen inertia block changes between steps, so a stale factorization keeps
// GMRES at a handful of iterations. Residuals stay below the configured
// tolerance, so results match fresh factorizations to that tolerance.
class SteppingSolver {
 public:
  explicit SteppingSolver(const LinearSolverOptions& opts) : opts_(opts) {
    opts_.gmres_restart = std::max(opts_.gmres_restart, 60);
  }

  VecX solve(const SpMat& mono, const VecX& rhs, LinearSolveInfo* info) {
    if (!prec_ || refactor_next_) {
      prec_ = std::make_unique<LuFactorization>(mono);
      refactor_next_ = false;
      VecX x = prec_->solve(rhs);
      const double bnorm = rhs.norm();
      double res = bnorm > 0.0 ? (rhs - mono * x).norm() / bnorm : 0.0;
      if (res > opts_.tolerance) {
        x += prec_->solve(rhs - mono * x);
        res = bnorm > 0.0 ? (rhs - mono * x).norm() / bnorm : 0.0;
        if (res > opts_.tolerance) {
          throw NonConvergence("unsteady_solve: residual above tolerance after refactor");
        }
      }
      if (info) *info = {res, 0};
      return x;
    }
    try {
      LinearSolveInfo gm_info;
      VecX x = gmres(mono, rhs, *prec_, opts_, &gm_info);
      if (gm_info.iterations > 35) refactor_next_ = true;
      if (info) *info = gm_info;
      return x;
    } catch (const NonConvergence&) {
      refactor_next_ = true;
      return solve(mono, rhs, info);
    }
  }

 private:
  LinearSolverOptions opts_;
  std::unique_ptr<LuFactorization> prec_;
  bool refactor_next_ = false;
};

AssembledBlocks assemble_blocks(const THSpaces& spaces, const AssemblyOptions& opts) {
  AssembledBlocks b;
  b.strain = assemble_strain(*spaces.velocity, opts);
  b.mass = assemble_mass(*spaces.velocity, opts);
  b.constraints = assemble_b_L(*spaces.velocity, *spaces.pressure, *spaces.lambda, opts);
  return b;
}

StokesSolution extract_solution(const BlockSystem& system, VecX x, const LinearSolveInfo& info) {
  StokesSolution sol;
  sol.info = info;
  const int nu = system.nu();
  const int np = system.np();
  const int nl = system.nl();
  sol.u = x.head(nu);
  sol.p = x.segment(nu, np);
  if (system.with_lambda) sol.lambda = x.segment(nu + np, nl);
  sol.mean_multiplier = x[nu + np + nl];
  double cres = (system.Bp.transpose() * sol.u).cwiseAbs().maxCoeff();
  if (system.with_lambda) {
    cres = std::max(cres, (system.Bl.transpose() * sol.u).cwiseAbs().maxCoeff());
  }
  sol.constraint_residual = cres;
  sol.pressure_mean = std::abs(system.mean.dot(sol.p));
  return sol;
}

StokesSolution solve_saddle(const BlockSystem& system, const VecX& fu,
                            const LinearSolverOptions& linear) {
  const SpMat mono = system.monolithic();
  const VecX rhs = system.padded_rhs(fu);
  LinearSolveInfo info;
  VecX x = solve_linear(mono, rhs, linear, &info);
  return extract_solution(system, std::move(x), info);
}

}  // namespace

VecX solve_linear(const SpMat& matrix, const VecX& rhs, const LinearSolverOptions& opts,
                  LinearSolveInfo* info) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) {
    throw Error("solve_linear: dimension mismatch");
  }
  LuFactorization lu(matrix);
  if (opts.backend == LinearSolverOptions::Backend::GMRES) {
    return gmres(matrix, rhs, lu, opts, info);
  }
  VecX x = lu.solve(rhs);
  const double bnorm = rhs.norm();
  const double res = bnorm > 0.0 ? (rhs - matrix * x).norm() / bnorm : 0.0;
  if (!std::isfinite(res)) throw SingularSystem("solve_linear: non-finite solution");
  if (res > opts.tolerance) {
    // One step of iterative refinement before giving up.
    x += lu.solve(rhs - matrix * x);
    const double res2 = (rhs - matrix * x).norm() / bnorm;
    if (res2 > opts.tolerance) throw NonConvergence("solve_linear: residual above tolerance");
    if (info) *info = {res2, 1};
    return x;
  }
  if (info) *info = {res, 0};
  return x;
}

StokesSolution steady_stokes_solve(const THSpaces& spaces, double mu,
                                   const std::function<Vec3(const Vec3&)>& rhs_field,
                                   const AssemblyOptions& assembly,
                                   const LinearSolverOptions& linear) {
  const AssembledBlocks blocks = assemble_blocks(spaces, assembly);
  BlockSystem system;
  system.A = 2.0 * mu * blocks.strain + blocks.mass;
  system.Bp = blocks.constraints.Bp;
  system.Bl = blocks.constraints.Bl;
  system.mean = blocks.constraints.mean;
  const VecX fu = assemble_forcing(
      *spaces.velocity, [&](const Vec3& x, double) { return rhs_field(x); }, 0.0, assembly);
  return solve_saddle(system, fu, linear);
}

StokesSolution ritz_stokes_initial(const THSpaces& spaces,
                                   const std::function<Vec3(const Vec3&)>& u0,
                                   const AssemblyOptions& assembly,
                                   const LinearSolverOptions& linear) {
  const AssembledBlocks blocks = assemble_blocks(spaces, assembly);
  BlockSystem system;
  system.A = blocks.strain + blocks.mass;  // a_h
  system.Bp = blocks.constraints.Bp;
  system.Bl = blocks.constraints.Bl;
  system.mean = blocks.constraints.mean;
  const VecX interp = spaces.velocity->interpolate(u0);
  const VecX fu = system.A * interp;
  return solve_saddle(system, fu, linear);
}

Trajectory unsteady_solve(const THSpaces& spaces, const ProblemSpec& problem,
                          const TimeConfig& config) {
  if (config.dt <= 0.0 || config.t_end < config.dt) {
    throw Error("unsteady_solve: need dt > 0 and t_end >= dt");
  }
  const FESpace& vel = *spaces.velocity;
  const HighOrderMesh& mesh = vel.mesh();
  const int steps = static_cast<int>(std::llround(config.t_end / config.dt));

  const AssembledBlocks blocks = assemble_blocks(spaces, config.assembly);
  const bool penalty = config.formulation == Formulation::Penalty;
  SpMat penalty_matrix;
  if (penalty) {
    const double tau = config.tau_alpha / (mesh.h * mesh.h);
    penalty_matrix = assemble_penalty(vel, tau, config.penalty_normal, config.assembly);
  }

  SpMat base = 2.0 * config.mu * blocks.strain;
  base += (1.0 / config.dt) * blocks.mass;
  if (config.zeroth_order) base += blocks.mass;
  if (penalty) base += penalty_matrix;

  auto u0_field = [&](const Vec3& x) {
    return problem.velocity(mesh.surface.closest_point(x), 0.0);
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  if (config.initial_condition == InitialCondition::DiscreteRitzStokes) {
    traj.velocity.push_back(
        ritz_stokes_initial(spaces, u0_field, config.assembly, config.linear).u);
  } else {
    traj.velocity.push_back(vel.interpolate(u0_field));
  }

  SteppingSolver stepper(config.linear);

  const double initial_energy =
      traj.velocity[0].dot(blocks.mass * traj.velocity[0]);

  for (int n = 1; n <= steps; ++n) {
    const double t = n * config.dt;
    const VecX& prev = traj.velocity.back();

    BlockSystem system;
    system.A = base;
    if (config.inertia == Inertia::Skew) {
      system.A += assemble_skew_convection(vel, prev, config.assembly);
    } else {
      system.A += assemble_convection(vel, prev, config.assembly);
    }
    system.Bp = blocks.constraints.Bp;
    system.mean = blocks.constraints.mean;
    system.with_lambda = !penalty;
    if (!penalty) system.Bl = blocks.constraints.Bl;

    VecX load = VecX::Zero(vel.dof_count());
    if (!config.zero_forcing) {
      load = assemble_forcing(
          vel, [&](const Vec3& x, double tt) { return forcing(problem, x, tt, config.oracle); },
          t, config.assembly);
    }
    const VecX fu = load + (1.0 / config.dt) * (blocks.mass * prev);

    const SpMat mono = system.monolithic();
    LinearSolveInfo info;
    VecX x = stepper.solve(mono, system.padded_rhs(fu), &info);
    StokesSolution sol = extract_solution(system, std::move(x), info);

    StepDiagnostics diag;
    diag.time = t;
    diag.linear_residual = sol.info.rel_residual;
    diag.kinetic_energy = sol.u.dot(blocks.mass * sol.u);
    diag.constraint_residual = sol.constraint_residual;
    diag.pressure_mean = sol.pressure_mean;
    const VecX du = sol.u - prev;
    diag.energy_lhs = 0.5 * (diag.kinetic_energy - prev.dot(blocks.mass * prev) +
                             du.dot(blocks.mass * du)) +
                      config.dt * (2.0 * config.mu * sol.u.dot(blocks.strain * sol.u) +
                                   (config.zeroth_order ? sol.u.dot(blocks.mass * sol.u) : 0.0) +
                                   (penalty ? sol.u.dot(penalty_matrix * sol.u) : 0.0));
    diag.forcing_pairing = config.dt * load.dot(sol.u);

    if (diag.kinetic_energy > 1e6 * std::max(initial_energy, 1e-12)) {
      throw BlowUp("unsteady_solve: kinetic energy exceeded 1e6 x initial");
    }

    traj.times.push_back(t);
    traj.velocity.push_back(std::move(sol.u));
    traj.pressure.push_back(std::move(sol.p));
    traj.lambda.push_back(penalty ? VecX() : std::move(sol.lambda));
    traj.steps.push_back(diag);
  }
  return traj;
}

}  // namespace surfns
