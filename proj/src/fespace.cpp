#include "surfns/fespace.hpp"

namespace surfns {

FESpace::FESpace(const HighOrderMesh& mesh, int degree, int components)
    : mesh_(&mesh), degree_(degree), components_(components) {
  if (components != 1 && components != 3) throw Error("FESpace: components must be 1 or 3");
  numbering_ = (degree == mesh.geometric_degree) ? mesh.numbering
                                                 : number_nodes(mesh.topology, degree);
  dof_coords_.resize(numbering_.count);
  for (int g = 0; g < numbering_.count; ++g) {
    dof_coords_[g] = geometry_position(mesh, numbering_.node_owner_element[g],
                                       numbering_.node_ref_points[g]);
  }
}

VecX FESpace::interpolate(const std::function<double(const Vec3&)>& f) const {
  if (components_ != 1) throw Error("interpolate: scalar field on a vector space");
  VecX out(dof_count());
  for (int g = 0; g < scalar_count(); ++g) out[g] = f(dof_coords_[g]);
  return out;
}

VecX FESpace::interpolate(const std::function<Vec3(const Vec3&)>& f) const {
  if (components_ != 3) throw Error("interpolate: vector field on a scalar space");
  VecX out(dof_count());
  for (int g = 0; g < scalar_count(); ++g) {
    const Vec3 v = f(dof_coords_[g]);
    for (int c = 0; c < 3; ++c) out[dof(c, g)] = v[c];
  }
  return out;
}

double FESpace::eval_scalar(const VecX& coeffs, int element, const Vec2& ref_pt) const {
  const auto& loc = numbering_.element_nodes[element];
  const VecX vals = reference().values(ref_pt);
  double s = 0.0;
  for (size_t i = 0; i < loc.size(); ++i) s += vals[i] * coeffs[loc[i]];
  return s;
}

Vec3 FESpace::eval_vector(const VecX& coeffs, int element, const Vec2& ref_pt) const {
  const auto& loc = numbering_.element_nodes[element];
  const VecX vals = reference().values(ref_pt);
  Vec3 v = Vec3::Zero();
  for (size_t i = 0; i < loc.size(); ++i) {
    for (int c = 0; c < 3; ++c) v[c] += vals[i] * coeffs[dof(c, loc[i])];
  }
  return v;
}

THSpaces build_taylor_hood(const HighOrderMesh& mesh, int ku, int klambda) {
  if (ku < 2) throw Error("build_taylor_hood: k_u must be >= 2");
  if (klambda != ku && klambda != ku - 1) {
    throw Error("build_taylor_hood: k_lambda must be k_u or k_u - 1");
  }
  THSpaces s;
  s.velocity = std::make_shared<FESpace>(mesh, ku, 3);
  s.pressure = std::make_shared<FESpace>(mesh, ku - 1, 1);
  s.lambda = std::make_shared<FESpace>(mesh, klambda, 1);
  return s;
}

}  // namespace surfns
