#pragma once

#include <functional>

#include "surfns/fespace.hpp"

namespace surfns {

enum class NormalMode { Discrete, Improved };

struct AssemblyOptions {
  // <= 0 means the default 2*degree + k_g + 2, capped at 12.
  int quadrature_degree = -1;
  int threads = 1;
};

int effective_quadrature_degree(const FESpace& space, const AssemblyOptions& opts);

/// Mass matrix; block-diagonal over components for vector spaces.
SpMat assemble_mass(const FESpace& space, const AssemblyOptions& opts = {});

/// Strain form int E_h(w) : E_h(v).
SpMat assemble_strain(const FESpace& velocity, const AssemblyOptions& opts = {});

/// a_h(w, v) = int E_h(w):E_h(v) + int w . v.
SpMat assemble_a_h(const FESpace& velocity, const AssemblyOptions& opts = {});

/// Tangential stiffness int grad_{Gamma_h} u . grad_{Gamma_h} v
/// (componentwise for vector spaces).
SpMat assemble_tangential_stiffness(const FESpace& space, const AssemblyOptions& opts = {});

struct ConstraintBlocks {
  SpMat Bp;   // n_u x n_p, entry (i,j) = int phi_i . grad_{Gamma_h} psi_j
  SpMat Bl;   // n_u x n_l, entry (i,j) = int chi_j (phi_i . n_h)
  VecX mean;  // n_p, entry j = int psi_j
};

ConstraintBlocks assemble_b_L(const FESpace& velocity, const FESpace& pressure,
                              const FESpace& lambda, const AssemblyOptions& opts = {});

/// Plain inertia matrix C(w): entry (i,j) = int ((P_h w . grad^cov) phi_j) . phi_i.
SpMat assemble_convection(const FESpace& velocity, const VecX& w,
                          const AssemblyOptions& opts = {});

/// Skew-symmetrized inertia with the two curvature correction terms; exactly
/// antisymmetric as a matrix.
SpMat assemble_skew_convection(const FESpace& velocity, const VecX& w,
                               const AssemblyOptions& opts = {});

/// tau * int (w . n)(v . n) with either the element normal n_h or the exact
/// normal composed with the closest-point projection.
SpMat assemble_penalty(const FESpace& velocity, double tau, NormalMode mode,
                       const AssemblyOptions& opts = {});

/// Load vector int f(x, t) . phi_i; the callable receives quadrature points
/// on Gamma_h and handles any composition with the projection itself.
VecX assemble_forcing(const FESpace& velocity,
                      const std::function<Vec3(const Vec3&, double)>& f, double t,
                      const AssemblyOptions& opts = {});

Vec3 tangential_gradient_at(const FESpace& scalar_space, const VecX& coeffs, int element,
                            const Vec2& ref_pt);
Mat3 tangential_gradient_at_vector(const FESpace& vector_space, const VecX& coeffs, int element,
                                   const Vec2& ref_pt);

/// Saddle-point system with unknown layout [u | p | lambda | mean-multiplier];
/// the lambda block is absent in the penalty formulation.
struct BlockSystem {
  SpMat A;
  SpMat Bp;
  SpMat Bl;
  VecX mean;
  bool with_lambda = true;

  int nu() const { return static_cast<int>(A.rows()); }
  int np() const { return static_cast<int>(Bp.cols()); }
  int nl() const { return with_lambda ? static_cast<int>(Bl.cols()) : 0; }
  int size() const { return nu() + np() + nl() + 1; }

  SpMat monolithic() const;
  VecX padded_rhs(const VecX& fu) const;
};

}  // namespace surfns
