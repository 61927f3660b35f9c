#include "surfns/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace surfns {

namespace {

struct SpaceTab {
  std::vector<VecX> values;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads;
};

SpaceTab tabulate_space(const FESpace& space, const QuadratureRule& rule) {
  SpaceTab t;
  const ReferenceElement& re = space.reference();
  for (const Vec2& p : rule.points) {
    t.values.push_back(re.values(p));
    t.grads.push_back(re.gradients(p));
  }
  return t;
}

// Exact covariant gradient on Gamma_h: ambient Jacobian of u(., t) at pi(x)
// by central differences, projected on both sides with the exact projector.
Mat3 exact_covariant_gradient(const Surface& surface,
                              const std::function<Vec3(const Vec3&)>& field, const Vec3& p,
                              double step) {
  Mat3 jac;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = p, xm = p;
    xp[j] += step;
    xm[j] -= step;
    jac.col(j) = (field(surface.closest_point(xp)) - field(surface.closest_point(xm))) /
                 (2.0 * step);
  }
  const Mat3 proj = surface.projector(p);
  return proj * jac * proj;
}

}  // namespace

ErrorReport error_norms(const Trajectory& trajectory, const ProblemSpec& problem,
                        const THSpaces& spaces, const TimeConfig& config) {
  const FESpace& vel = *spaces.velocity;
  const FESpace& pres = *spaces.pressure;
  const FESpace& lam = *spaces.lambda;
  const HighOrderMesh& mesh = vel.mesh();
  const Surface& surface = mesh.surface;

  const int qd = effective_quadrature_degree(vel, config.assembly);
  const QuadratureRule rule = quadrature(qd);
  const SpaceTab tu = tabulate_space(vel, rule);
  const SpaceTab tp = tabulate_space(pres, rule);
  const SpaceTab tl = tabulate_space(lam, rule);
  const int nu_loc = vel.reference().node_count();

  ErrorReport rep;
  rep.h = mesh.h;
  rep.dt = config.dt;
  rep.ndof_u = vel.dof_count();
  rep.ndof_p = pres.dof_count();
  rep.ndof_lambda = lam.dof_count();

  struct Frames {
    std::vector<ElementFrame> fr;
    std::vector<Vec3> projected;
    std::vector<Mat3> exact_proj;
  };
  // Geometry is time independent; cache frames and projected points.
  Frames cache;
  cache.fr.reserve(mesh.element_count() * rule.size());
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      cache.fr.push_back(element_frame(mesh, e, rule.points[q]));
      const Vec3 p = surface.closest_point(cache.fr.back().position);
      cache.projected.push_back(p);
      cache.exact_proj.push_back(surface.projector(p));
    }
  }

  const int n_steps = static_cast<int>(trajectory.pressure.size());
  double grad_sq_sum = 0.0, p_sq_sum = 0.0, lambda_sq_sum = 0.0;
  const bool lambda_zero = problem.forcing_mode == ForcingMode::FullResidual;

  for (int n = 0; n <= n_steps; ++n) {
    const double t = trajectory.times[n];
    const VecX& uh = trajectory.velocity[n];
    auto u_frozen = [&](const Vec3& y) { return problem.velocity(y, t); };

    double u_sq = 0.0, pu_sq = 0.0, nres_sq = 0.0, grad_sq = 0.0, pr_sq = 0.0, la_sq = 0.0;
    int idx = 0;
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& loc = vel.element_scalar_nodes(e);
      for (int q = 0; q < rule.size(); ++q, ++idx) {
        const ElementFrame& fr = cache.fr[idx];
        const double w = rule.weights[q] * fr.surface_measure;
        const Vec3& p_on = cache.projected[idx];

        Vec3 u_h = Vec3::Zero();
        Eigen::Matrix<double, 3, 2> ref_jac = Eigen::Matrix<double, 3, 2>::Zero();
        for (int i = 0; i < nu_loc; ++i) {
          const double nv = tu.values[q][i];
          for (int c = 0; c < 3; ++c) {
            const double coef = uh[vel.dof(c, loc[i])];
            u_h[c] += nv * coef;
            ref_jac(c, 0) += coef * tu.grads[q](i, 0);
            ref_jac(c, 1) += coef * tu.grads[q](i, 1);
          }
        }
        const Vec3 u_ex = problem.velocity(p_on, t);
        const Vec3 diff = u_ex - u_h;
        u_sq += w * diff.squaredNorm();
        pu_sq += w * (fr.projector * diff).squaredNorm();
        const double un = u_h.dot(fr.normal);
        nres_sq += w * un * un;

        if (n >= 1) {
          const Mat3 grad_h = fr.projector * (ref_jac * fr.pullback.transpose());
          const Mat3 grad_ex = exact_covariant_gradient(surface, u_frozen, p_on,
                                                        config.oracle.first_step);
          grad_sq += w * (grad_ex - grad_h).squaredNorm();

          const double p_h = pres.eval_scalar(trajectory.pressure[n - 1], e, rule.points[q]);
          const double p_ex = problem.pressure(p_on, t);
          pr_sq += w * (p_ex - p_h) * (p_ex - p_h);

          if (trajectory.lambda[n - 1].size() > 0) {
            const double l_h = lam.eval_scalar(trajectory.lambda[n - 1], e, rule.points[q]);
            const double l_ex =
                lambda_zero ? 0.0 : exact_lambda(problem, p_on, t, config.oracle);
            la_sq += w * (l_ex - l_h) * (l_ex - l_h);
          }
        }
      }
    }
    rep.err_u_linf_l2 = std::max(rep.err_u_linf_l2, std::sqrt(u_sq));
    rep.err_pu_linf_l2 = std::max(rep.err_pu_linf_l2, std::sqrt(pu_sq));
    rep.err_n_linf_l2 = std::max(rep.err_n_linf_l2, std::sqrt(nres_sq));
    if (n >= 1) {
      grad_sq_sum += config.dt * grad_sq;
      p_sq_sum += config.dt * pr_sq;
      lambda_sq_sum += config.dt * la_sq;
    }
  }
  rep.err_grad_l2l2 = std::sqrt(grad_sq_sum);
  rep.err_p_l2l2 = std::sqrt(p_sq_sum);
  rep.err_lambda_l2l2 = std::sqrt(lambda_sq_sum);
  return rep;
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  if (errors.size() != hs.size() || errors.size() < 2) {
    throw Error("eoc: need equal-length arrays with at least two entries");
  }
  std::vector<double> out;
  for (size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k] <= 0.0 || errors[k + 1] <= 0.0 || hs[k] <= 0.0 || hs[k + 1] <= 0.0) {
      throw Error("eoc: entries must be positive");
    }
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(hs[k] / hs[k + 1]));
  }
  return out;
}

InfSupResult estimate_infsup(const THSpaces& spaces, const AssemblyOptions& opts) {
  const FESpace& vel = *spaces.velocity;
  const FESpace& pres = *spaces.pressure;
  const FESpace& lam = *spaces.lambda;
  const int nu = vel.dof_count();
  const int np = pres.dof_count();
  const int nl = lam.dof_count();
  if (nu + np + nl > 12000) throw Error("estimate_infsup: mesh too large for dense eigensolve");

  const SpMat a = assemble_a_h(vel, opts);
  const ConstraintBlocks cb = assemble_b_L(vel, pres, lam, opts);
  const SpMat mp = assemble_mass(pres, opts);
  const SpMat ml = assemble_mass(lam, opts);
  const SpMat kl = assemble_tangential_stiffness(lam, opts);
  const SpMat h1u = assemble_tangential_stiffness(vel, opts);

  // B = [Bp Bl] as a dense matrix of constraint columns.
  MatX b(nu, np + nl);
  b.leftCols(np) = MatX(cb.Bp);
  b.rightCols(nl) = MatX(cb.Bl);

  auto schur = [&](const SpMat& gram) {
    const Eigen::SparseMatrix<double> col(gram);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(col);
    if (lu.info() != Eigen::Success) throw SingularSystem("estimate_infsup: Gram factorization");
    MatX ainv_b(nu, np + nl);
    for (int j = 0; j < np + nl; ++j) ainv_b.col(j) = lu.solve(b.col(j));
    return MatX(b.transpose() * ainv_b);
  };

  auto smallest_deflated = [&](const MatX& g, const MatX& gram_q) {
    // Restrict away from the constant-pressure kernel {q = const, xi = 0}:
    // the subspace mean^T q = 0 is the orthogonal complement of the mean
    // vector, spanned by the trailing columns of its Householder reflector.
    VecX kvec = VecX::Zero(np + nl);
    kvec.head(np) = cb.mean;
    Eigen::HouseholderQR<MatX> qr(kvec);
    MatX full = qr.householderQ() * MatX::Identity(np + nl, np + nl);
    MatX z = full.rightCols(np + nl - 1);
    MatX gz = z.transpose() * g * z;
    MatX mz = z.transpose() * gram_q * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(gz, mz);
    if (es.info() != Eigen::Success) throw EigensolveFailure("estimate_infsup: eigensolve failed");
    return std::sqrt(std::max(0.0, es.eigenvalues()[0]));
  };

  InfSupResult result;
  {
    MatX gram_q = MatX::Zero(np + nl, np + nl);
    gram_q.topLeftCorner(np, np) = MatX(mp);
    gram_q.bottomRightCorner(nl, nl) = MatX(ml);
    result.beta_l2 = smallest_deflated(schur(a), gram_q);
  }
  {
    SpMat h1 = h1u;
    h1 += assemble_mass(vel, opts);
    MatX mld = MatX(ml);
    MatX h1l = MatX(kl) + mld;
    MatX gram_q = MatX::Zero(np + nl, np + nl);
    gram_q.topLeftCorner(np, np) = MatX(mp);
    gram_q.bottomRightCorner(nl, nl) = mld * h1l.ldlt().solve(mld);
    result.beta_h1 = smallest_deflated(schur(h1), gram_q);
  }
  return result;
}

double estimate_condition(const SpMat& matrix) {
  if (matrix.rows() > 4000) throw Error("estimate_condition: matrix too large for dense SVD");
  Eigen::BDCSVD<MatX> svd{MatX(matrix)};
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

GeometricErrors geometric_error_report(const Surface& surface, const HighOrderMesh& mesh,
                                       int quad_degree) {
  const QuadratureRule rule = quadrature(quad_degree);
  GeometricErrors ge;
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int q = 0; q < rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, rule.points[q], /*with_weingarten=*/true);
      const double d = surface.signed_distance(fr.position);
      ge.max_distance = std::max(ge.max_distance, std::abs(d));
      const Vec3 p = surface.closest_point(fr.position);
      ge.max_normal_error =
          std::max(ge.max_normal_error, (surface.normal(p) - fr.normal).norm());
      ge.max_weingarten_error =
          std::max(ge.max_weingarten_error, (surface.weingarten(p) - fr.weingarten).norm());
    }
  }
  return ge;
}

std::vector<double> kinetic_energies(const Trajectory& trajectory, const THSpaces& spaces,
                                     const AssemblyOptions& opts) {
  const SpMat mass = assemble_mass(*spaces.velocity, opts);
  std::vector<double> energies;
  energies.reserve(trajectory.velocity.size());
  for (const VecX& u : trajectory.velocity) energies.push_back(u.dot(mass * u));
  return energies;
}

}  // namespace surfns
