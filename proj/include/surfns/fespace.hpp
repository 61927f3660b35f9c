#pragma once

#include <functional>
#include <memory>

#include "surfns/mesh.hpp"

namespace surfns {

/// Scalar or vector Lagrange space S^k on a high-order mesh. Vector DOFs are
/// laid out component-major: all x-components, then y, then z.
class FESpace {
 public:
  FESpace(const HighOrderMesh& mesh, int degree, int components);

  const HighOrderMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int scalar_count() const { return numbering_.count; }
  int dof_count() const { return components_ * numbering_.count; }

  int dof(int component, int scalar_node) const {
    return component * numbering_.count + scalar_node;
  }

  const std::vector<int>& element_scalar_nodes(int element) const {
    return numbering_.element_nodes[element];
  }

  const Vec3& dof_coordinate(int scalar_node) const { return dof_coords_[scalar_node]; }
  const std::vector<Vec3>& dof_coordinates() const { return dof_coords_; }

  const ReferenceElement& reference() const { return reference_element(degree_); }

  /// Nodal interpolation of an ambient field evaluated at the DOF
  /// coordinates (which lie on Gamma_h). Fields given on Gamma compose with
  /// the closest-point projection inside the callable.
  VecX interpolate(const std::function<double(const Vec3&)>& f) const;
  VecX interpolate(const std::function<Vec3(const Vec3&)>& f) const;

  /// Field value at (element, ref point) from a coefficient vector.
  double eval_scalar(const VecX& coeffs, int element, const Vec2& ref_pt) const;
  Vec3 eval_vector(const VecX& coeffs, int element, const Vec2& ref_pt) const;

 private:
  const HighOrderMesh* mesh_;
  int degree_;
  int components_;
  NodeNumbering numbering_;
  std::vector<Vec3> dof_coords_;
};

/// Taylor-Hood bundle: velocity (vector, degree k_u), pressure (k_u - 1), and
/// tangentiality multiplier (k_lambda).
struct THSpaces {
  std::shared_ptr<FESpace> velocity;
  std::shared_ptr<FESpace> pressure;
  std::shared_ptr<FESpace> lambda;
};

THSpaces build_taylor_hood(const HighOrderMesh& mesh, int ku, int klambda);

}  // namespace surfns
