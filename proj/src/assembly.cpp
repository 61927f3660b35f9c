#include "surfns/assembly.hpp"

#include <atomic>
#include <thread>

namespace surfns {

namespace {

using Triplet = Eigen::Triplet<double>;

struct QuadBasis {
  QuadratureRule rule;
  // Basis values/ref-gradients of one space at every quadrature point.
  std::vector<VecX> values;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> grads;
};

QuadBasis tabulate(const FESpace& space, int quad_degree) {
  QuadBasis qb;
  qb.rule = quadrature(quad_degree);
  const ReferenceElement& re = space.reference();
  qb.values.reserve(qb.rule.size());
  qb.grads.reserve(qb.rule.size());
  for (const Vec2& p : qb.rule.points) {
    qb.values.push_back(re.values(p));
    qb.grads.push_back(re.gradients(p));
  }
  return qb;
}

// Runs `kernel(element, out_triplets)` over all elements in fixed-size chunks;
// chunk buffers are concatenated in chunk order so the triplet list (and the
// resulting CSR arrays) are independent of the number of worker threads.
std::vector<Triplet> run_chunked(int n_elements, int threads,
                                 const std::function<void(int, std::vector<Triplet>&)>& kernel) {
  constexpr int kChunk = 64;
  const int n_chunks = (n_elements + kChunk - 1) / kChunk;
  std::vector<std::vector<Triplet>> buffers(n_chunks);
  auto work_chunk = [&](int chunk) {
    const int begin = chunk * kChunk;
    const int end = std::min(n_elements, begin + kChunk);
    for (int e = begin; e < end; ++e) kernel(e, buffers[chunk]);
  };
  if (threads <= 1 || n_chunks <= 1) {
    for (int c = 0; c < n_chunks; ++c) work_chunk(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min(threads, n_chunks);
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) {
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) work_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<Triplet> all;
  size_t total = 0;
  for (const auto& b : buffers) total += b.size();
  all.reserve(total);
  for (const auto& b : buffers) all.insert(all.end(), b.begin(), b.end());
  return all;
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& trips) {
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// Tangential gradients of all scalar basis functions at one frame: column a
// is grad_{Gamma_h} N_a (a tangent vector).
MatX tangential_gradients(const ElementFrame& fr,
                          const Eigen::Matrix<double, Eigen::Dynamic, 2>& ref_grads) {
  return fr.pullback * ref_grads.transpose();
}

void scatter_vector_block(const FESpace& space, const std::vector<int>& loc, const MatX& local,
                          std::vector<Triplet>& out) {
  const int nloc = static_cast<int>(loc.size());
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < nloc; ++a) {
      const int row = space.dof(c, loc[a]);
      for (int d = 0; d < 3; ++d) {
        for (int b = 0; b < nloc; ++b) {
          const double v = local(c * nloc + a, d * nloc + b);
          if (v != 0.0) out.emplace_back(row, space.dof(d, loc[b]), v);
        }
      }
    }
  }
}

}  // namespace

int effective_quadrature_degree(const FESpace& space, const AssemblyOptions& opts) {
  if (opts.quadrature_degree > 0) return std::min(opts.quadrature_degree, 12);
  // 2k + k_g integrates the flat-element products; +2 absorbs the curved
  // Jacobian well enough to pass the saturation bound at desk scale.
  return std::min(2 * space.degree() + space.mesh().geometric_degree + 2, 12);
}

SpMat assemble_mass(const FESpace& space, const AssemblyOptions& opts) {
  const auto& mesh = space.mesh();
  const QuadBasis qb = tabulate(space, effective_quadrature_degree(space, opts));
  const int nloc = space.reference().node_count();
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    MatX local = MatX::Zero(nloc, nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double w = qb.rule.weights[q] * fr.surface_measure;
      local.noalias() += w * qb.values[q] * qb.values[q].transpose();
    }
    const auto& loc = space.element_scalar_nodes(e);
    for (int c = 0; c < space.components(); ++c) {
      for (int a = 0; a < nloc; ++a) {
        for (int b = 0; b < nloc; ++b) {
          out.emplace_back(space.dof(c, loc[a]), space.dof(c, loc[b]), local(a, b));
        }
      }
    }
  };
  return from_triplets(space.dof_count(), space.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

SpMat assemble_tangential_stiffness(const FESpace& space, const AssemblyOptions& opts) {
  const auto& mesh = space.mesh();
  const QuadBasis qb = tabulate(space, effective_quadrature_degree(space, opts));
  const int nloc = space.reference().node_count();
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    MatX local = MatX::Zero(nloc, nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double w = qb.rule.weights[q] * fr.surface_measure;
      const MatX g = tangential_gradients(fr, qb.grads[q]);  // 3 x nloc
      local.noalias() += w * g.transpose() * g;
    }
    const auto& loc = space.element_scalar_nodes(e);
    for (int c = 0; c < space.components(); ++c) {
      for (int a = 0; a < nloc; ++a) {
        for (int b = 0; b < nloc; ++b) {
          out.emplace_back(space.dof(c, loc[a]), space.dof(c, loc[b]), local(a, b));
        }
      }
    }
  };
  return from_triplets(space.dof_count(), space.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

SpMat assemble_strain(const FESpace& velocity, const AssemblyOptions& opts) {
  if (velocity.components() != 3) throw Error("assemble_strain: vector space required");
  const auto& mesh = velocity.mesh();
  const QuadBasis qb = tabulate(velocity, effective_quadrature_degree(velocity, opts));
  const int nloc = velocity.reference().node_count();
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    MatX local = MatX::Zero(3 * nloc, 3 * nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double w = qb.rule.weights[q] * fr.surface_measure;
      const MatX g = tangential_gradients(fr, qb.grads[q]);
      const MatX gtg = g.transpose() * g;  // (a,b) -> g_a . g_b
      // E(phi_{a,c}) : E(phi_{b,d}) =
      //   (P_cd (g_a . g_b) + g_b[c] g_a[d]) / 2
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          const double pcd = fr.projector(c, d);
          for (int a = 0; a < nloc; ++a) {
            for (int b = 0; b < nloc; ++b) {
              local(c * nloc + a, d * nloc + b) +=
                  0.5 * w * (pcd * gtg(a, b) + g(c, b) * g(d, a));
            }
          }
        }
      }
    }
    scatter_vector_block(velocity, velocity.element_scalar_nodes(e), local, out);
  };
  return from_triplets(velocity.dof_count(), velocity.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

SpMat assemble_a_h(const FESpace& velocity, const AssemblyOptions& opts) {
  SpMat a = assemble_strain(velocity, opts);
  a += assemble_mass(velocity, opts);
  a.makeCompressed();
  return a;
}

ConstraintBlocks assemble_b_L(const FESpace& velocity, const FESpace& pressure,
                              const FESpace& lambda, const AssemblyOptions& opts) {
  const auto& mesh = velocity.mesh();
  const int qd = effective_quadrature_degree(velocity, opts);
  const QuadBasis qu = tabulate(velocity, qd);
  const QuadBasis qp = tabulate(pressure, qd);
  const QuadBasis ql = tabulate(lambda, qd);
  const int nu_loc = velocity.reference().node_count();
  const int np_loc = pressure.reference().node_count();
  const int nl_loc = lambda.reference().node_count();

  std::vector<Triplet> tp, tl;
  VecX mean = VecX::Zero(pressure.dof_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    MatX local_p = MatX::Zero(3 * nu_loc, np_loc);
    MatX local_l = MatX::Zero(3 * nu_loc, nl_loc);
    VecX local_m = VecX::Zero(np_loc);
    for (int q = 0; q < qu.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qu.rule.points[q]);
      const double w = qu.rule.weights[q] * fr.surface_measure;
      const MatX gp = tangential_gradients(fr, qp.grads[q]);  // 3 x np_loc
      for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < nu_loc; ++a) {
          const double na = w * qu.values[q][a];
          for (int j = 0; j < np_loc; ++j) local_p(c * nu_loc + a, j) += na * gp(c, j);
          const double nn = na * fr.normal[c];
          for (int j = 0; j < nl_loc; ++j) local_l(c * nu_loc + a, j) += nn * ql.values[q][j];
        }
      }
      local_m += w * qp.values[q];
    }
    const auto& lu = velocity.element_scalar_nodes(e);
    const auto& lp = pressure.element_scalar_nodes(e);
    const auto& ll = lambda.element_scalar_nodes(e);
    for (int c = 0; c < 3; ++c) {
      for (int a = 0; a < nu_loc; ++a) {
        const int row = velocity.dof(c, lu[a]);
        for (int j = 0; j < np_loc; ++j) tp.emplace_back(row, lp[j], local_p(c * nu_loc + a, j));
        for (int j = 0; j < nl_loc; ++j) tl.emplace_back(row, ll[j], local_l(c * nu_loc + a, j));
      }
    }
    for (int j = 0; j < np_loc; ++j) mean[lp[j]] += local_m[j];
  }
  ConstraintBlocks blocks;
  blocks.Bp = from_triplets(velocity.dof_count(), pressure.dof_count(), tp);
  blocks.Bl = from_triplets(velocity.dof_count(), lambda.dof_count(), tl);
  blocks.mean = std::move(mean);
  return blocks;
}

SpMat assemble_convection(const FESpace& velocity, const VecX& w, const AssemblyOptions& opts) {
  if (w.size() != velocity.dof_count()) throw Error("assemble_convection: size mismatch");
  const auto& mesh = velocity.mesh();
  const QuadBasis qb = tabulate(velocity, effective_quadrature_degree(velocity, opts));
  const int nloc = velocity.reference().node_count();
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    const auto& loc = velocity.element_scalar_nodes(e);
    MatX local = MatX::Zero(3 * nloc, 3 * nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double wq = qb.rule.weights[q] * fr.surface_measure;
      Vec3 adv = Vec3::Zero();
      for (int i = 0; i < nloc; ++i) {
        for (int c = 0; c < 3; ++c) adv[c] += qb.values[q][i] * w[velocity.dof(c, loc[i])];
      }
      adv = fr.projector * adv;  // P_h w
      const MatX g = tangential_gradients(fr, qb.grads[q]);
      VecX gdotw(nloc);
      for (int b = 0; b < nloc; ++b) gdotw[b] = g.col(b).dot(adv);
      // entry((a,c),(b,d)) += w N_a P_cd (g_b . P_h w)
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          const double pcd = wq * fr.projector(c, d);
          if (pcd == 0.0) continue;
          for (int a = 0; a < nloc; ++a) {
            const double na = pcd * qb.values[q][a];
            for (int b = 0; b < nloc; ++b) local(c * nloc + a, d * nloc + b) += na * gdotw[b];
          }
        }
      }
    }
    scatter_vector_block(velocity, loc, local, out);
  };
  return from_triplets(velocity.dof_count(), velocity.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

SpMat assemble_skew_convection(const FESpace& velocity, const VecX& w,
                               const AssemblyOptions& opts) {
  if (w.size() != velocity.dof_count()) throw Error("assemble_skew_convection: size mismatch");
  const auto& mesh = velocity.mesh();
  const QuadBasis qb = tabulate(velocity, effective_quadrature_degree(velocity, opts));
  const int nloc = velocity.reference().node_count();
  // D part: entry((a,c),(b,d)) = int N_b n_d (H w)_c N_a; assembled locally
  // together with C, then combined as (C - C^T)/2 - (D - D^T)/2.
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    const auto& loc = velocity.element_scalar_nodes(e);
    MatX local_c = MatX::Zero(3 * nloc, 3 * nloc);
    MatX local_d = MatX::Zero(3 * nloc, 3 * nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q], /*with_weingarten=*/true);
      const double wq = qb.rule.weights[q] * fr.surface_measure;
      Vec3 zval = Vec3::Zero();
      for (int i = 0; i < nloc; ++i) {
        for (int c = 0; c < 3; ++c) zval[c] += qb.values[q][i] * w[velocity.dof(c, loc[i])];
      }
      const Vec3 adv = fr.projector * zval;
      const Vec3 hz = fr.weingarten * zval;
      const MatX g = tangential_gradients(fr, qb.grads[q]);
      VecX gdotw(nloc);
      for (int b = 0; b < nloc; ++b) gdotw[b] = g.col(b).dot(adv);
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          const double pcd = wq * fr.projector(c, d);
          const double hn = wq * hz[c] * fr.normal[d];
          for (int a = 0; a < nloc; ++a) {
            const double na = qb.values[q][a];
            for (int b = 0; b < nloc; ++b) {
              if (pcd != 0.0) local_c(c * nloc + a, d * nloc + b) += pcd * na * gdotw[b];
              if (hn != 0.0)
                local_d(c * nloc + a, d * nloc + b) += hn * na * qb.values[q][b];
            }
          }
        }
      }
    }
    MatX local = 0.5 * (local_c - local_c.transpose()) - 0.5 * (local_d - local_d.transpose());
    scatter_vector_block(velocity, loc, local, out);
  };
  return from_triplets(velocity.dof_count(), velocity.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

SpMat assemble_penalty(const FESpace& velocity, double tau, NormalMode mode,
                       const AssemblyOptions& opts) {
  if (tau <= 0.0) throw Error("assemble_penalty: tau must be positive");
  const auto& mesh = velocity.mesh();
  const QuadBasis qb = tabulate(velocity, effective_quadrature_degree(velocity, opts));
  const int nloc = velocity.reference().node_count();
  auto kernel = [&](int e, std::vector<Triplet>& out) {
    MatX local = MatX::Zero(3 * nloc, 3 * nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double wq = tau * qb.rule.weights[q] * fr.surface_measure;
      Vec3 n = fr.normal;
      if (mode == NormalMode::Improved) {
        n = mesh.surface.normal(mesh.surface.closest_point(fr.position));
      }
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          const double nn = wq * n[c] * n[d];
          for (int a = 0; a < nloc; ++a) {
            const double na = nn * qb.values[q][a];
            for (int b = 0; b < nloc; ++b) {
              local(c * nloc + a, d * nloc + b) += na * qb.values[q][b];
            }
          }
        }
      }
    }
    scatter_vector_block(velocity, velocity.element_scalar_nodes(e), local, out);
  };
  return from_triplets(velocity.dof_count(), velocity.dof_count(),
                       run_chunked(mesh.element_count(), opts.threads, kernel));
}

VecX assemble_forcing(const FESpace& velocity, const std::function<Vec3(const Vec3&, double)>& f,
                      double t, const AssemblyOptions& opts) {
  const auto& mesh = velocity.mesh();
  const QuadBasis qb = tabulate(velocity, effective_quadrature_degree(velocity, opts));
  const int nloc = velocity.reference().node_count();
  const int n_elements = mesh.element_count();

  // Element-local loads computed (possibly in parallel) first, accumulated in
  // element order afterwards.
  std::vector<VecX> locals(n_elements);
  auto compute = [&](int e) {
    VecX local = VecX::Zero(3 * nloc);
    for (int q = 0; q < qb.rule.size(); ++q) {
      const ElementFrame fr = element_frame(mesh, e, qb.rule.points[q]);
      const double wq = qb.rule.weights[q] * fr.surface_measure;
      const Vec3 fv = f(fr.position, t);
      for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < nloc; ++a) local[c * nloc + a] += wq * fv[c] * qb.values[q][a];
      }
    }
    locals[e] = std::move(local);
  };
  if (opts.threads <= 1) {
    for (int e = 0; e < n_elements; ++e) compute(e);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int tix = 0; tix < opts.threads; ++tix) {
      pool.emplace_back([&] {
        for (int e = next.fetch_add(1); e < n_elements; e = next.fetch_add(1)) compute(e);
      });
    }
    for (auto& th : pool) th.join();
  }

  VecX rhs = VecX::Zero(velocity.dof_count());
  for (int e = 0; e < n_elements; ++e) {
    const auto& loc = velocity.element_scalar_nodes(e);
    for (int c = 0; c < 3; ++c) {
      for (int a = 0; a < nloc; ++a) rhs[velocity.dof(c, loc[a])] += locals[e][c * nloc + a];
    }
  }
  return rhs;
}

Vec3 tangential_gradient_at(const FESpace& scalar_space, const VecX& coeffs, int element,
                            const Vec2& ref_pt) {
  if (scalar_space.components() != 1) throw Error("tangential_gradient_at: scalar space required");
  const ElementFrame fr = element_frame(scalar_space.mesh(), element, ref_pt);
  const auto grads = scalar_space.reference().gradients(ref_pt);
  const auto& loc = scalar_space.element_scalar_nodes(element);
  Vec2 ref_grad = Vec2::Zero();
  for (size_t i = 0; i < loc.size(); ++i) {
    ref_grad += coeffs[loc[i]] * Vec2(grads(i, 0), grads(i, 1));
  }
  return fr.pullback * ref_grad;
}

Mat3 tangential_gradient_at_vector(const FESpace& vector_space, const VecX& coeffs, int element,
                                   const Vec2& ref_pt) {
  if (vector_space.components() != 3)
    throw Error("tangential_gradient_at_vector: vector space required");
  const ElementFrame fr = element_frame(vector_space.mesh(), element, ref_pt);
  const auto grads = vector_space.reference().gradients(ref_pt);
  const auto& loc = vector_space.element_scalar_nodes(element);
  Eigen::Matrix<double, 3, 2> ref_jac = Eigen::Matrix<double, 3, 2>::Zero();
  for (size_t i = 0; i < loc.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      ref_jac(c, 0) += coeffs[vector_space.dof(c, loc[i])] * grads(i, 0);
      ref_jac(c, 1) += coeffs[vector_space.dof(c, loc[i])] * grads(i, 1);
    }
  }
  return ref_jac * fr.pullback.transpose();
}

SpMat BlockSystem::monolithic() const {
  const int n_u = nu();
  const int n_p = np();
  const int n_l = nl();
  std::vector<Triplet> trips;
  trips.reserve(A.nonZeros() + 2 * Bp.nonZeros() + 2 * (with_lambda ? Bl.nonZeros() : 0) +
                2 * n_p);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int k = 0; k < Bp.outerSize(); ++k) {
    for (SpMat::InnerIterator it(Bp, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = n_u + static_cast<int>(it.col());
      trips.emplace_back(r, c, it.value());
      trips.emplace_back(c, r, it.value());
    }
  }
  if (with_lambda) {
    for (int k = 0; k < Bl.outerSize(); ++k) {
      for (SpMat::InnerIterator it(Bl, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = n_u + n_p + static_cast<int>(it.col());
        trips.emplace_back(r, c, it.value());
        trips.emplace_back(c, r, it.value());
      }
    }
  }
  const int mean_col = n_u + n_p + n_l;
  for (int j = 0; j < n_p; ++j) {
    if (mean[j] != 0.0) {
      trips.emplace_back(n_u + j, mean_col, mean[j]);
      trips.emplace_back(mean_col, n_u + j, mean[j]);
    }
  }
  SpMat m(size(), size());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

VecX BlockSystem::padded_rhs(const VecX& fu) const {
  VecX rhs = VecX::Zero(size());
  rhs.head(nu()) = fu;
  return rhs;
}

}  // namespace surfns
