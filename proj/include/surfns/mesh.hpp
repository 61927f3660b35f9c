#pragma once

#include <array>
#include <vector>

#include "surfns/lagrange.hpp"
#include "surfns/quadrature.hpp"
#include "surfns/surface.hpp"
#include "surfns/types.hpp"

namespace surfns {

/// Closed, consistently outward-oriented triangulation with all vertices on
/// the exact surface.
struct MeshTopology {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;      // (lo, hi) vertex ids
  std::vector<std::array<int, 3>> tri_edges;  // edge ids of (v0v1, v1v2, v2v0)

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int face_count() const { return static_cast<int>(triangles.size()); }
  int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
};

/// Global numbering of the degree-k Lagrange nodes of a topology: vertex
/// nodes first, then per-edge interior nodes (walked from the lower to the
/// higher vertex index), then per-face interior nodes.
struct NodeNumbering {
  int degree = 1;
  int count = 0;
  std::vector<std::vector<int>> element_nodes;  // canonical local order
  std::vector<Vec2> node_ref_points;            // one reference point per global node
  std::vector<int> node_owner_element;          // first element touching the node
};

NodeNumbering number_nodes(const MeshTopology& topo, int degree);

/// Curved triangulation of geometric degree k_g; element maps are Lagrange
/// interpolants of the closest-point projection of the affine nodes.
struct HighOrderMesh {
  Surface surface;
  MeshTopology topology;
  int geometric_degree = 1;
  std::vector<Vec3> geometry_nodes;
  NodeNumbering numbering;
  double h = 0.0;       // max affine element diameter
  double h_min = 0.0;   // min affine element diameter
  double sigma = 1.0;   // quasi-uniformity constant h/h_min

  int element_count() const { return topology.face_count(); }
};

/// Geometry data of one element at one reference point.
struct ElementFrame {
  Vec3 position;
  Eigen::Matrix<double, 3, 2> jacobian;
  Vec3 normal;             // n_h, outward
  Mat3 projector;          // P_h = I - n_h (x) n_h
  double surface_measure;  // |d_xi F x d_eta F|
  Mat3 weingarten;         // H_h = grad^cov_{Gamma_h} n_h
  // Pullback G = J (J^T J)^{-1}: tangential gradient of a scalar FE function
  // is G * ref_gradient.
  Eigen::Matrix<double, 3, 2> pullback;
};

MeshTopology build_base_mesh(const Surface& surface, int refinements);

HighOrderMesh elevate_geometry(const Surface& surface, const MeshTopology& base, int kg);

ElementFrame element_frame(const HighOrderMesh& mesh, int element, const Vec2& ref_pt,
                           bool with_weingarten = false);

/// Position of a global geometry/FE node evaluated through the element map.
Vec3 geometry_position(const HighOrderMesh& mesh, int element, const Vec2& ref_pt);

}  // namespace surfns
