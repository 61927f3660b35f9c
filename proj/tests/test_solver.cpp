#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "surfns/analysis.hpp"

using namespace surfns;

namespace {

std::shared_ptr<HighOrderMesh> sphere_mesh(int refinements, int kg) {
  const Surface s = Surface::sphere(1.0);
  return std::make_shared<HighOrderMesh>(
      elevate_geometry(s, build_base_mesh(s, refinements), kg));
}

// Divergence-free tangential stream-function field on the sphere.
Vec3 stream_field(const Vec3& x) {
  const double tp = 2.0 * M_PI;
  const Vec3 grad(-std::sin(tp * x[0]) * std::cos(tp * x[1]) * std::cos(tp * x[2]),
                  -std::cos(tp * x[0]) * std::sin(tp * x[1]) * std::cos(tp * x[2]),
                  -std::cos(tp * x[0]) * std::cos(tp * x[1]) * std::sin(tp * x[2]));
  return x.normalized().cross(grad);
}

Vec3 killing(const Vec3& x) { return Vec3(-4.0 * x[1], 4.0 * x[0], 0.0); }

}  // namespace

TEST_CASE("solve_linear: identity, mass system, GMRES agreement") {
  {
    SpMat eye(5, 5);
    eye.setIdentity();
    VecX b(5);
    b << 1, -2, 3, 0.5, -0.25;
    CHECK((solve_linear(eye, b) - b).norm() == 0.0);
  }

  auto mesh = sphere_mesh(1, 2);
  const THSpaces th = build_taylor_hood(*mesh, 2, 1);
  const SpMat m = assemble_mass(*th.velocity);
  const VecX ones = VecX::Ones(m.rows());
  const VecX x = solve_linear(m, m * ones);
  CHECK((x - ones).cwiseAbs().maxCoeff() < 1e-10);

  BlockSystem sys;
  sys.A = assemble_a_h(*th.velocity);
  const ConstraintBlocks cb = assemble_b_L(*th.velocity, *th.pressure, *th.lambda);
  sys.Bp = cb.Bp;
  sys.Bl = cb.Bl;
  sys.mean = cb.mean;
  const VecX fu = assemble_forcing(
      *th.velocity, [](const Vec3& x_, double) { return Vec3(x_[1], -x_[2], 0.3); }, 0.0);
  const SpMat mono = sys.monolithic();
  const VecX b = sys.padded_rhs(fu);

  LinearSolveInfo lu_info;
  const VecX x_lu = solve_linear(mono, b, {}, &lu_info);
  CHECK(lu_info.rel_residual <= 1e-10);

  LinearSolverOptions gm_opts;
  gm_opts.backend = LinearSolverOptions::Backend::GMRES;
  LinearSolveInfo gm_info;
  const VecX x_gm = solve_linear(mono, b, gm_opts, &gm_info);
  CHECK(gm_info.rel_residual <= 1e-10);
  CHECK((x_lu - x_gm).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("steady Stokes: zero data gives the zero solution") {
  auto mesh = sphere_mesh(1, 3);
  const THSpaces th = build_taylor_hood(*mesh, 2, 1);
  const StokesSolution sol =
      steady_stokes_solve(th, 0.5, [](const Vec3&) { return Vec3::Zero(); });
  CHECK(sol.u.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.p.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.lambda.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.constraint_residual <= 1e-9);
  CHECK(sol.pressure_mean <= 1e-10);
}

TEST_CASE("steady Stokes converges at order 2 in the energy norm") {
  const Surface s = Surface::sphere(1.0);
  const double mu = 0.5;
  auto exact_p = [](const Vec3& x) { return x[0] * x[1] * x[1] * x[2]; };
  auto frozen = [](const Vec3& y) { return stream_field(y); };
  auto steady_forcing = [&](const Vec3& x) -> Vec3 {
    const Vec3 p = s.closest_point(x);
    const auto ops = surface_operator_oracle(s, frozen, p);
    const Vec3 grad_p = scalar_surface_gradient_oracle(s, exact_p, p);
    return -2.0 * mu * ops.strain_divergence + stream_field(p) + grad_p;
  };

  std::vector<double> errs, hs;
  for (int r : {1, 2, 3}) {
    auto mesh = sphere_mesh(r, 3);
    const THSpaces th = build_taylor_hood(*mesh, 2, 1);
    const StokesSolution sol = steady_stokes_solve(th, mu, steady_forcing);
    CHECK(sol.constraint_residual <= 1e-9);

    const QuadratureRule rule = quadrature(7);
    double err = 0.0;
    for (int e = 0; e < mesh->element_count(); ++e) {
      for (int q = 0; q < rule.size(); ++q) {
        const ElementFrame fr = element_frame(*mesh, e, rule.points[q]);
        const Vec3 pp = s.closest_point(fr.position);
        const Mat3 g_ex = surface_operator_oracle(s, frozen, pp).covariant_gradient;
        const Mat3 g_h = fr.projector *
                         tangential_gradient_at_vector(*th.velocity, sol.u, e, rule.points[q]);
        err += rule.weights[q] * fr.surface_measure * (g_ex - g_h).squaredNorm();
      }
    }
    errs.push_back(std::sqrt(err));
    hs.push_back(mesh->h);
  }
  const double eoc = std::log(errs[1] / errs[2]) / std::log(hs[1] / hs[2]);
  CHECK(eoc > 1.6);
  CHECK(eoc < 2.6);
}

TEST_CASE("Ritz-Stokes projection: zero data, constraints, closeness to interpolation") {
  {
    auto mesh = sphere_mesh(1, 2);
    const THSpaces th = build_taylor_hood(*mesh, 2, 1);
    const StokesSolution zero =
        ritz_stokes_initial(th, [](const Vec3&) { return Vec3::Zero(); });
    CHECK(zero.u.cwiseAbs().maxCoeff() < 1e-12);
  }

  // || R_h u0 - I_h u0 ||_{L2} decays at least at min{k_u + 1, k_g} = 2;
  // the Killing run skips refinement 1 where icosphere parity zeroes it out.
  const Surface s = Surface::sphere(1.0);
  auto kill0 = [&](const Vec3& x) { return killing(s.closest_point(x)); };
  auto stream0 = [&](const Vec3& x) { return stream_field(s.closest_point(x)); };
  struct Case {
    std::function<Vec3(const Vec3&)> u0;
    std::vector<int> refinements;
  };
  for (const Case& c : {Case{kill0, {2, 3}}, Case{stream0, {1, 2, 3}}}) {
    std::vector<double> errs, hs;
    for (int r : c.refinements) {
      auto mesh = sphere_mesh(r, 2);
      const THSpaces th = build_taylor_hood(*mesh, 2, 1);
      const StokesSolution sol = ritz_stokes_initial(th, c.u0);
      CHECK(sol.constraint_residual <= 1e-9);
      const VecX interp = th.velocity->interpolate(c.u0);
      const SpMat m = assemble_mass(*th.velocity);
      const VecX diff = sol.u - interp;
      errs.push_back(std::sqrt(diff.dot(m * diff)));
      hs.push_back(mesh->h);
    }
    for (size_t k = 0; k + 1 < errs.size(); ++k) {
      const double eoc = std::log(errs[k] / errs[k + 1]) / std::log(hs[k] / hs[k + 1]);
      CHECK(eoc >= 1.6);
    }
  }
}

TEST_CASE("free decay with skew inertia: kinetic energy is non-increasing") {
  auto mesh = sphere_mesh(1, 2);
  const THSpaces th = build_taylor_hood(*mesh, 2, 1);
  const Surface s = Surface::sphere(1.0);

  ProblemSpec decay = zero_problem(s);
  decay.velocity = [&s](const Vec3& x, double) -> Vec3 { return killing(s.closest_point(x)); };

  TimeConfig tc;
  tc.dt = 0.02;
  tc.t_end = 0.4;
  tc.inertia = Inertia::Skew;
  tc.zeroth_order = true;
  tc.zero_forcing = true;
  tc.initial_condition = InitialCondition::DiscreteRitzStokes;

  const Trajectory traj = unsteady_solve(th, decay, tc);
  const std::vector<double> energies = kinetic_energies(traj, th);
  REQUIRE(energies.size() == 21);
  CHECK(energies[0] > 1.0);
  for (size_t n = 1; n < energies.size(); ++n) {
    CHECK(energies[n] <= energies[n - 1] + 1e-12 * energies[0]);
  }

  // per-step energy identity: the skew form and the constraints drop out
  for (const StepDiagnostics& st : traj.steps) {
    CHECK(std::abs(st.energy_lhs - st.forcing_pairing) <= 1e-9 * (1.0 + energies[0]));
    CHECK(st.constraint_residual <= 1e-8);
    CHECK(st.pressure_mean <= 1e-9);
  }
}

TEST_CASE("one tiny step changes the solution by O(dt)") {
  auto mesh = sphere_mesh(1, 3);
  const THSpaces th = build_taylor_hood(*mesh, 2, 1);
  const ProblemSpec ps = sphere_killing_problem();
  TimeConfig tc;
  tc.dt = 1e-8;
  tc.t_end = 1e-8;
  const Trajectory traj = unsteady_solve(th, ps, tc);
  REQUIRE(traj.velocity.size() == 2);
  const SpMat m = assemble_mass(*th.velocity);
  const VecX du = traj.velocity[1] - traj.velocity[0];
  CHECK(std::sqrt(du.dot(m * du)) <= 1e-6);
}

TEST_CASE("Lagrange and penalty trajectories agree in the tangential norm") {
  const ProblemSpec ps = sphere_killing_problem();

  auto mesh2 = sphere_mesh(2, 2);
  TimeConfig tc;
  tc.dt = 0.05;
  tc.t_end = 0.25;

  // iso-parametric Lagrange run with the rich multiplier space
  const THSpaces th_l = build_taylor_hood(*mesh2, 2, 2);
  TimeConfig tc_l = tc;
  const Trajectory traj_l = unsteady_solve(th_l, ps, tc_l);
  const ErrorReport rep_l = error_norms(traj_l, ps, th_l, tc_l);

  const THSpaces th_p = build_taylor_hood(*mesh2, 2, 1);
  TimeConfig tc_p = tc;
  tc_p.formulation = Formulation::Penalty;
  tc_p.tau_alpha = 2.5;
  tc_p.penalty_normal = NormalMode::Improved;
  const Trajectory traj_p = unsteady_solve(th_p, ps, tc_p);
  const ErrorReport rep_p = error_norms(traj_p, ps, th_p, tc_p);

  // tangential L2 distance between the two discrete solutions at the final
  // step, compared to the (larger) discretization error
  const FESpace& vel = *th_l.velocity;
  const QuadratureRule rule = quadrature(7);
  double dist = 0.0;
  for (int e = 0; e < mesh2->element_count(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = element_frame(*mesh2, e, rule.points[q]);
      const Vec3 diff = vel.eval_vector(traj_l.velocity.back(), e, rule.points[q]) -
                        vel.eval_vector(traj_p.velocity.back(), e, rule.points[q]);
      dist += rule.weights[q] * fr.surface_measure * (fr.projector * diff).squaredNorm();
    }
  }
  dist = std::sqrt(dist);
  const double discretization = std::max(rep_l.err_pu_linf_l2, rep_p.err_pu_linf_l2);
  CHECK(dist <= 3.0 * discretization);
}

TEST_CASE("time config validation and blow-up guard") {
  auto mesh = sphere_mesh(0, 1);
  const THSpaces th = build_taylor_hood(*mesh, 2, 1);
  const ProblemSpec ps = zero_problem(Surface::sphere(1.0));
  TimeConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(unsteady_solve(th, ps, bad), Error);
  bad.dt = 1.0;
  bad.t_end = 0.5;
  CHECK_THROWS_AS(unsteady_solve(th, ps, bad), Error);
}
