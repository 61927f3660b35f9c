#include "surfns/runner.hpp"

#include <cmath>
#include <ostream>

namespace surfns {

namespace {

std::string csv_int(long v) { return std::to_string(v); }

void append_eoc_fields(std::string& line, const std::optional<double>& value) {
  line += ",";
  if (value) line += format_sci(*value);
}

std::optional<double> eoc_between(double e_coarse, double e_fine, double h_coarse,
                                  double h_fine) {
  if (e_coarse <= 0.0 || e_fine <= 0.0) return std::nullopt;
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

}  // namespace

void RunConfig::validate() const {
  if (surface != "sphere" && surface != "varying") {
    throw Error("config: surface must be sphere or varying");
  }
  if (kpr != ku - 1) throw Error("config: k_pr must equal k_u - 1");
  if (klambda != ku && klambda != ku - 1) throw Error("config: k_lambda must be k_u or k_u-1");
  if (kg < 1 || kg > 3) throw Error("config: k_g must be in {1,2,3}");
  if (levels < 1) throw Error("config: levels must be >= 1");
  if (base_refine < 0) throw Error("config: base_refine must be >= 0");
  if (formulation != "lagrange" && formulation != "penalty") {
    throw Error("config: formulation must be lagrange or penalty");
  }
  if (inertia != "plain" && inertia != "skew") throw Error("config: inertia must be plain or skew");
  if (initial_condition != "ritz" && initial_condition != "nodal") {
    throw Error("config: initial-condition must be ritz or nodal");
  }
  if (forcing_mode != "full" && forcing_mode != "tangential") {
    throw Error("config: forcing-mode must be full or tangential");
  }
  if (normal_mode != "improved" && normal_mode != "discrete") {
    throw Error("config: normal-mode must be improved or discrete");
  }
  if (problem != "auto" && problem != "zero") {
    throw Error("config: problem must be auto or zero");
  }
}

Surface RunConfig::make_surface() const {
  return surface == "sphere" ? Surface::sphere(1.0) : Surface::varying_curvature();
}

ProblemSpec RunConfig::make_problem() const {
  ProblemSpec ps;
  if (problem == "zero") {
    ps = zero_problem(make_surface());
  } else {
    ps = surface == "sphere" ? sphere_killing_problem() : varying_curvature_problem();
  }
  ps.mu = mu;
  ps.forcing_mode =
      forcing_mode == "full" ? ForcingMode::FullResidual : ForcingMode::TangentialResidual;
  return ps;
}

TimeConfig RunConfig::make_time_config(double dt) const {
  TimeConfig tc;
  tc.dt = dt;
  tc.t_end = t_end;
  tc.mu = mu;
  tc.formulation = formulation == "penalty" ? Formulation::Penalty : Formulation::Lagrange;
  tc.inertia = inertia == "skew" ? Inertia::Skew : Inertia::Plain;
  tc.initial_condition = initial_condition == "nodal" ? InitialCondition::NodalInterpolation
                                                      : InitialCondition::DiscreteRitzStokes;
  tc.tau_alpha = tau_alpha;
  tc.penalty_normal = normal_mode == "discrete" ? NormalMode::Discrete : NormalMode::Improved;
  tc.assembly.quadrature_degree = quad_degree;
  tc.assembly.threads = threads;
  return tc;
}

std::vector<LevelRun> run_convergence_study(const RunConfig& config) {
  config.validate();
  const Surface surf = config.make_surface();
  const ProblemSpec problem = config.make_problem();

  std::vector<LevelRun> runs;
  for (int level = 0; level < config.levels; ++level) {
    LevelRun run;
    run.refinements = config.base_refine + level;
    const double dt = config.dt0 / std::pow(4.0, level);

    const MeshTopology base = build_base_mesh(surf, run.refinements);
    const HighOrderMesh mesh = elevate_geometry(surf, base, config.kg);
    const THSpaces spaces = build_taylor_hood(mesh, config.ku, config.klambda);
    const TimeConfig tc = config.make_time_config(dt);

    const Trajectory traj = unsteady_solve(spaces, problem, tc);
    run.report = error_norms(traj, problem, spaces, tc);
    for (const StepDiagnostics& s : traj.steps) {
      run.max_constraint_residual = std::max(run.max_constraint_residual, s.constraint_residual);
      run.max_pressure_mean = std::max(run.max_pressure_mean, s.pressure_mean);
      run.max_linear_residual = std::max(run.max_linear_residual, s.linear_residual);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

void write_converge_csv(std::ostream& out, const std::vector<LevelRun>& runs) {
  out << "level,h,dt,ndof_u,ndof_p,ndof_lambda,err_u_LinfL2,err_Pu_LinfL2,err_n_LinfL2,"
         "err_grad_L2L2,err_p_L2L2,eoc_u,eoc_Pu,eoc_n,eoc_grad,eoc_p\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    const ErrorReport& r = runs[i].report;
    std::string line = csv_int(static_cast<long>(i));
    line += "," + format_sci(r.h) + "," + format_sci(r.dt);
    line += "," + csv_int(r.ndof_u) + "," + csv_int(r.ndof_p) + "," + csv_int(r.ndof_lambda);
    line += "," + format_sci(r.err_u_linf_l2) + "," + format_sci(r.err_pu_linf_l2) + "," +
            format_sci(r.err_n_linf_l2) + "," + format_sci(r.err_grad_l2l2) + "," +
            format_sci(r.err_p_l2l2);
    if (i == 0) {
      line += ",,,,,";
    } else {
      const ErrorReport& c = runs[i - 1].report;
      append_eoc_fields(line, eoc_between(c.err_u_linf_l2, r.err_u_linf_l2, c.h, r.h));
      append_eoc_fields(line, eoc_between(c.err_pu_linf_l2, r.err_pu_linf_l2, c.h, r.h));
      append_eoc_fields(line, eoc_between(c.err_n_linf_l2, r.err_n_linf_l2, c.h, r.h));
      append_eoc_fields(line, eoc_between(c.err_grad_l2l2, r.err_grad_l2l2, c.h, r.h));
      append_eoc_fields(line, eoc_between(c.err_p_l2l2, r.err_p_l2l2, c.h, r.h));
    }
    out << line << "\n";
  }
}

void run_compare(const RunConfig& config, std::ostream& out) {
  RunConfig lagrange = config;
  lagrange.surface = "sphere";
  lagrange.formulation = "lagrange";
  lagrange.kg = 3;
  lagrange.klambda = 1;

  RunConfig penalty = config;
  penalty.surface = "sphere";
  penalty.formulation = "penalty";
  penalty.kg = 2;
  penalty.klambda = 1;  // unused by the penalty solve
  penalty.normal_mode = "improved";

  const std::vector<LevelRun> lm = run_convergence_study(lagrange);
  const std::vector<LevelRun> pm = run_convergence_study(penalty);

  out << "level,lm_h,pm_h,dt,lm_err_u,lm_err_Pu,lm_err_n,lm_err_grad,lm_err_p,"
         "pm_err_u,pm_err_Pu,pm_err_n,pm_err_grad,pm_err_p,"
         "lm_eoc_u,lm_eoc_n,lm_eoc_grad,lm_eoc_p,pm_eoc_u,pm_eoc_n,pm_eoc_grad,pm_eoc_p\n";
  for (size_t i = 0; i < lm.size(); ++i) {
    const ErrorReport& l = lm[i].report;
    const ErrorReport& p = pm[i].report;
    std::string line = csv_int(static_cast<long>(i));
    line += "," + format_sci(l.h) + "," + format_sci(p.h) + "," + format_sci(l.dt);
    line += "," + format_sci(l.err_u_linf_l2) + "," + format_sci(l.err_pu_linf_l2) + "," +
            format_sci(l.err_n_linf_l2) + "," + format_sci(l.err_grad_l2l2) + "," +
            format_sci(l.err_p_l2l2);
    line += "," + format_sci(p.err_u_linf_l2) + "," + format_sci(p.err_pu_linf_l2) + "," +
            format_sci(p.err_n_linf_l2) + "," + format_sci(p.err_grad_l2l2) + "," +
            format_sci(p.err_p_l2l2);
    if (i == 0) {
      line += ",,,,,,,,";
    } else {
      const ErrorReport& lc = lm[i - 1].report;
      const ErrorReport& pc = pm[i - 1].report;
      append_eoc_fields(line, eoc_between(lc.err_u_linf_l2, l.err_u_linf_l2, lc.h, l.h));
      append_eoc_fields(line, eoc_between(lc.err_n_linf_l2, l.err_n_linf_l2, lc.h, l.h));
      append_eoc_fields(line, eoc_between(lc.err_grad_l2l2, l.err_grad_l2l2, lc.h, l.h));
      append_eoc_fields(line, eoc_between(lc.err_p_l2l2, l.err_p_l2l2, lc.h, l.h));
      append_eoc_fields(line, eoc_between(pc.err_u_linf_l2, p.err_u_linf_l2, pc.h, p.h));
      append_eoc_fields(line, eoc_between(pc.err_n_linf_l2, p.err_n_linf_l2, pc.h, p.h));
      append_eoc_fields(line, eoc_between(pc.err_grad_l2l2, p.err_grad_l2l2, pc.h, p.h));
      append_eoc_fields(line, eoc_between(pc.err_p_l2l2, p.err_p_l2l2, pc.h, p.h));
    }
    out << line << "\n";
  }
}

std::vector<GeomLevel> run_geomcheck(const RunConfig& config) {
  config.validate();
  const Surface surf = config.make_surface();
  std::vector<GeomLevel> out;
  for (int level = 0; level < config.levels; ++level) {
    GeomLevel gl;
    gl.refinements = config.base_refine + level;
    const MeshTopology base = build_base_mesh(surf, gl.refinements);
    const HighOrderMesh mesh = elevate_geometry(surf, base, config.kg);
    gl.h = mesh.h;
    const int qd = config.quad_degree > 0 ? config.quad_degree : 6;
    gl.errors = geometric_error_report(surf, mesh, qd);
    out.push_back(gl);
  }
  return out;
}

void write_geomcheck_csv(std::ostream& out, const std::vector<GeomLevel>& levels) {
  out << "level,h,max_dist,max_normal_err,max_weingarten_err,eoc_dist,eoc_normal,"
         "eoc_weingarten\n";
  for (size_t i = 0; i < levels.size(); ++i) {
    const GeomLevel& g = levels[i];
    std::string line = csv_int(static_cast<long>(i));
    line += "," + format_sci(g.h) + "," + format_sci(g.errors.max_distance) + "," +
            format_sci(g.errors.max_normal_error) + "," +
            format_sci(g.errors.max_weingarten_error);
    if (i == 0) {
      line += ",,,";
    } else {
      const GeomLevel& c = levels[i - 1];
      append_eoc_fields(line,
                        eoc_between(c.errors.max_distance, g.errors.max_distance, c.h, g.h));
      append_eoc_fields(
          line, eoc_between(c.errors.max_normal_error, g.errors.max_normal_error, c.h, g.h));
      append_eoc_fields(line, eoc_between(c.errors.max_weingarten_error,
                                          g.errors.max_weingarten_error, c.h, g.h));
    }
    out << line << "\n";
  }
}

std::vector<InfSupLevel> run_infsup(const RunConfig& config) {
  config.validate();
  const Surface surf = config.make_surface();
  std::vector<InfSupLevel> out;
  for (int level = 0; level < config.levels; ++level) {
    InfSupLevel il;
    il.refinements = config.base_refine + level;
    const MeshTopology base = build_base_mesh(surf, il.refinements);
    const HighOrderMesh mesh = elevate_geometry(surf, base, config.kg);
    const THSpaces spaces = build_taylor_hood(mesh, config.ku, config.klambda);
    il.h = mesh.h;
    il.ndof_u = spaces.velocity->dof_count();
    il.ndof_p = spaces.pressure->dof_count();
    il.ndof_lambda = spaces.lambda->dof_count();
    AssemblyOptions opts;
    opts.quadrature_degree = config.quad_degree;
    opts.threads = config.threads;
    il.betas = estimate_infsup(spaces, opts);
    out.push_back(il);
  }
  return out;
}

void write_infsup_csv(std::ostream& out, const std::vector<InfSupLevel>& levels) {
  out << "level,h,ndof_u,ndof_p,ndof_lambda,beta_l2,beta_h1\n";
  for (size_t i = 0; i < levels.size(); ++i) {
    const InfSupLevel& l = levels[i];
    out << csv_int(static_cast<long>(i)) << "," << format_sci(l.h) << "," << csv_int(l.ndof_u)
        << "," << csv_int(l.ndof_p) << "," << csv_int(l.ndof_lambda) << ","
        << format_sci(l.betas.beta_l2) << "," << format_sci(l.betas.beta_h1) << "\n";
  }
}

void run_export_vtk(const RunConfig& config, std::ostream& out) {
  config.validate();
  const Surface surf = config.make_surface();
  const ProblemSpec problem = config.make_problem();
  const MeshTopology base = build_base_mesh(surf, config.base_refine);
  const HighOrderMesh mesh = elevate_geometry(surf, base, config.kg);
  const THSpaces spaces = build_taylor_hood(mesh, config.ku, config.klambda);

  VecX u, p, l;
  if (config.vtk_step <= 0) {
    const TimeConfig tc = config.make_time_config(config.dt0);
    auto u0_field = [&](const Vec3& x) {
      return problem.velocity(mesh.surface.closest_point(x), 0.0);
    };
    u = (tc.initial_condition == InitialCondition::DiscreteRitzStokes)
            ? ritz_stokes_initial(spaces, u0_field, tc.assembly, tc.linear).u
            : spaces.velocity->interpolate(u0_field);
    p = VecX::Zero(spaces.pressure->dof_count());
    l = VecX::Zero(spaces.lambda->dof_count());
  } else {
    TimeConfig tc = config.make_time_config(config.dt0);
    tc.t_end = config.vtk_step * config.dt0;
    const Trajectory traj = unsteady_solve(spaces, problem, tc);
    u = traj.velocity.back();
    p = traj.pressure.back();
    l = traj.lambda.back().size() > 0 ? traj.lambda.back()
                                      : VecX::Zero(spaces.lambda->dof_count());
  }
  write_vtk(out, spaces, u, p, l);
}

}  // namespace surfns
