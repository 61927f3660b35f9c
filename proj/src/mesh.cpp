#include "surfns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace surfns {

namespace {

struct IcoMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

IcoMesh icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  m.vertices = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : m.vertices) v.normalize();
  m.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  return m;
}

IcoMesh subdivide_on_sphere(const IcoMesh& in) {
  IcoMesh out;
  out.vertices = in.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec3 p = (out.vertices[a] + out.vertices[b]).normalized();
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& t : in.triangles) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  return out;
}

void build_edges(MeshTopology& topo) {
  std::map<std::pair<int, int>, int> edge_id;
  topo.tri_edges.resize(topo.triangles.size());
  std::vector<int> incidence;
  for (size_t f = 0; f < topo.triangles.size(); ++f) {
    const auto& t = topo.triangles[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      int id;
      if (it == edge_id.end()) {
        id = static_cast<int>(topo.edges.size());
        topo.edges.push_back({key.first, key.second});
        edge_id.emplace(key, id);
        incidence.push_back(0);
      } else {
        id = it->second;
      }
      topo.tri_edges[f][k] = id;
      incidence[id] += 1;
    }
  }
  for (int c : incidence) {
    if (c != 2) throw Error("build_base_mesh: mesh is not a closed 2-manifold");
  }
}

}  // namespace

MeshTopology build_base_mesh(const Surface& surface, int refinements) {
  if (refinements < 0) throw Error("build_base_mesh: refinements must be >= 0");
  IcoMesh ico = icosahedron();
  for (int r = 0; r < refinements; ++r) ico = subdivide_on_sphere(ico);

  MeshTopology topo;
  topo.vertices.reserve(ico.vertices.size());
  for (const auto& p : ico.vertices) topo.vertices.push_back(surface.map_from_unit_sphere(p));
  topo.triangles = std::move(ico.triangles);
  build_edges(topo);

  // The icosahedron is oriented counterclockwise from outside and both the
  // radial scaling and the sphere-to-surface map preserve orientation; check
  // against the exact normal anyway.
  for (const auto& t : topo.triangles) {
    const Vec3 a = topo.vertices[t[0]];
    const Vec3 b = topo.vertices[t[1]];
    const Vec3 c = topo.vertices[t[2]];
    const Vec3 nh = (b - a).cross(c - a);
    const Vec3 n = surface.normal(surface.closest_point((a + b + c) / 3.0));
    if (nh.dot(n) <= 0.0) throw Error("build_base_mesh: inward-oriented element");
  }
  return topo;
}

NodeNumbering number_nodes(const MeshTopology& topo, int degree) {
  if (degree < 1 || degree > 3) throw UnsupportedDegree("number_nodes: degree must be 1..3");
  const int per_edge = degree - 1;
  const int per_face = (degree - 1) * (degree - 2) / 2;
  const ReferenceElement& re = reference_element(degree);

  NodeNumbering nn;
  nn.degree = degree;
  nn.count = topo.vertex_count() + topo.edge_count() * per_edge + topo.face_count() * per_face;
  nn.element_nodes.resize(topo.face_count());
  nn.node_ref_points.assign(nn.count, Vec2::Zero());
  nn.node_owner_element.assign(nn.count, -1);

  const int edge_base = topo.vertex_count();
  const int face_base = edge_base + topo.edge_count() * per_edge;

  for (int f = 0; f < topo.face_count(); ++f) {
    const auto& tri = topo.triangles[f];
    std::vector<int>& loc = nn.element_nodes[f];
    loc.resize(re.node_count());
    loc[0] = tri[0];
    loc[1] = tri[1];
    loc[2] = tri[2];
    int next = 3;
    for (int le = 0; le < 3; ++le) {
      const int a = tri[le];
      const int b = tri[(le + 1) % 3];
      const int e = topo.tri_edges[f][le];
      const bool forward = topo.edges[e][0] == a;  // local walk matches lo->hi walk
      (void)b;
      for (int t = 0; t < per_edge; ++t) {
        const int slot = forward ? t : per_edge - 1 - t;
        loc[next + t] = edge_base + e * per_edge + slot;
      }
      next += per_edge;
    }
    for (int t = 0; t < per_face; ++t) loc[next + t] = face_base + f * per_face + t;

    for (int i = 0; i < re.node_count(); ++i) {
      const int g = loc[i];
      if (nn.node_owner_element[g] < 0) {
        nn.node_owner_element[g] = f;
        nn.node_ref_points[g] = re.nodes[i];
      }
    }
  }
  return nn;
}

HighOrderMesh elevate_geometry(const Surface& surface, const MeshTopology& base, int kg) {
  if (kg < 1 || kg > 3) throw UnsupportedDegree("elevate_geometry: k_g must be in {1,2,3}");
  HighOrderMesh mesh;
  mesh.surface = surface;
  mesh.topology = base;
  mesh.geometric_degree = kg;
  mesh.numbering = number_nodes(base, kg);

  mesh.geometry_nodes.resize(mesh.numbering.count);
  for (int v = 0; v < base.vertex_count(); ++v) mesh.geometry_nodes[v] = base.vertices[v];

  // Interpolated closest-point projection: every non-vertex node is the
  // projection of the affine position of its reference Lagrange point.
  const ReferenceElement& re = reference_element(kg);
  for (int f = 0; f < base.face_count(); ++f) {
    const auto& loc = mesh.numbering.element_nodes[f];
    const Vec3 a = base.vertices[base.triangles[f][0]];
    const Vec3 b = base.vertices[base.triangles[f][1]];
    const Vec3 c = base.vertices[base.triangles[f][2]];
    for (int i = 3; i < re.node_count(); ++i) {
      const int g = loc[i];
      if (mesh.numbering.node_owner_element[g] != f) continue;
      const Vec2 rp = re.nodes[i];
      const Vec3 affine = (1.0 - rp[0] - rp[1]) * a + rp[0] * b + rp[1] * c;
      mesh.geometry_nodes[g] = surface.closest_point(affine);
    }
  }

  double hmax = 0.0, hmin = std::numeric_limits<double>::max();
  for (const auto& t : base.triangles) {
    const Vec3 a = base.vertices[t[0]];
    const Vec3 b = base.vertices[t[1]];
    const Vec3 c = base.vertices[t[2]];
    const double d = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
    hmax = std::max(hmax, d);
    hmin = std::min(hmin, d);
  }
  mesh.h = hmax;
  mesh.h_min = hmin;
  mesh.sigma = hmax / hmin;
  return mesh;
}

Vec3 geometry_position(const HighOrderMesh& mesh, int element, const Vec2& ref_pt) {
  const ReferenceElement& re = reference_element(mesh.geometric_degree);
  const VecX vals = re.values(ref_pt);
  const auto& loc = mesh.numbering.element_nodes[element];
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < re.node_count(); ++i) p += vals[i] * mesh.geometry_nodes[loc[i]];
  return p;
}

ElementFrame element_frame(const HighOrderMesh& mesh, int element, const Vec2& ref_pt,
                           bool with_weingarten) {
  const ReferenceElement& re = reference_element(mesh.geometric_degree);
  const auto& loc = mesh.numbering.element_nodes[element];
  const VecX vals = re.values(ref_pt);
  const auto grads = re.gradients(ref_pt);

  ElementFrame fr;
  fr.position = Vec3::Zero();
  fr.jacobian.setZero();
  for (int i = 0; i < re.node_count(); ++i) {
    const Vec3& node = mesh.geometry_nodes[loc[i]];
    fr.position += vals[i] * node;
    fr.jacobian.col(0) += grads(i, 0) * node;
    fr.jacobian.col(1) += grads(i, 1) * node;
  }

  const Vec3 cross = fr.jacobian.col(0).cross(fr.jacobian.col(1));
  fr.surface_measure = cross.norm();
  if (fr.surface_measure < 1e-14) throw DegenerateElement("element_frame: degenerate element");
  fr.normal = cross / fr.surface_measure;
  fr.projector = tangent_projector(fr.normal);

  Eigen::Matrix2d jtj = fr.jacobian.transpose() * fr.jacobian;
  Eigen::Matrix2d jtj_inv;
  const double det = jtj(0, 0) * jtj(1, 1) - jtj(0, 1) * jtj(1, 0);
  jtj_inv << jtj(1, 1), -jtj(0, 1), -jtj(1, 0), jtj(0, 0);
  jtj_inv /= det;
  fr.pullback = fr.jacobian * jtj_inv;

  fr.weingarten.setZero();
  if (with_weingarten && mesh.geometric_degree > 1) {
    const auto d2 = re.second_derivatives(ref_pt);
    Vec3 fxx = Vec3::Zero(), fxy = Vec3::Zero(), fyy = Vec3::Zero();
    for (int i = 0; i < re.node_count(); ++i) {
      const Vec3& node = mesh.geometry_nodes[loc[i]];
      fxx += d2(i, 0) * node;
      fxy += d2(i, 1) * node;
      fyy += d2(i, 2) * node;
    }
    const Vec3 j0 = fr.jacobian.col(0);
    const Vec3 j1 = fr.jacobian.col(1);
    // d/dxi^a of the unnormalized normal c = j0 x j1, then of n = c/|c|.
    const Vec3 dc_dxi = fxx.cross(j1) + j0.cross(fxy);
    const Vec3 dc_deta = fxy.cross(j1) + j0.cross(fyy);
    Eigen::Matrix<double, 3, 2> dn;
    dn.col(0) = fr.projector * dc_dxi / fr.surface_measure;
    dn.col(1) = fr.projector * dc_deta / fr.surface_measure;
    fr.weingarten = dn * jtj_inv * fr.jacobian.transpose();
  }
  return fr;
}

}  // namespace surfns
