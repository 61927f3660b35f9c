#include "surfns/io.hpp"

#include <cstdio>
#include <ostream>
#include <vector>

namespace surfns {

std::string format_sci(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", value);
  return buf;
}

void write_vtk(std::ostream& out, const THSpaces& spaces, const VecX& velocity,
               const VecX& pressure, const VecX& lambda) {
  const FESpace& vel = *spaces.velocity;
  const HighOrderMesh& mesh = vel.mesh();
  const int s = mesh.geometric_degree - 1;  // uniform reference refinements
  const int per_side = 1 << s;

  // Per-element lattice of (per_side+1)(per_side+2)/2 reference points,
  // duplicated across element borders.
  std::vector<Vec2> ref_pts;
  std::vector<std::array<int, 3>> ref_tris;
  {
    std::vector<std::vector<int>> row_ids;
    int id = 0;
    for (int i = 0; i <= per_side; ++i) {
      row_ids.emplace_back();
      for (int j = 0; j <= per_side - i; ++j) {
        ref_pts.emplace_back(double(j) / per_side, double(i) / per_side);
        row_ids.back().push_back(id++);
      }
    }
    for (int i = 0; i < per_side; ++i) {
      for (int j = 0; j < per_side - i; ++j) {
        ref_tris.push_back({row_ids[i][j], row_ids[i][j + 1], row_ids[i + 1][j]});
        if (j + 1 <= per_side - i - 1) {
          ref_tris.push_back({row_ids[i][j + 1], row_ids[i + 1][j + 1], row_ids[i + 1][j]});
        }
      }
    }
  }

  const int pts_per_elem = static_cast<int>(ref_pts.size());
  const int n_points = mesh.element_count() * pts_per_elem;
  const int n_tris = mesh.element_count() * static_cast<int>(ref_tris.size());

  out << "# vtk DataFile Version 2.0\n";
  out << "surfns surface fields\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << n_points << " double\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (const Vec2& rp : ref_pts) {
      const Vec3 p = geometry_position(mesh, e, rp);
      out << format_sci(p[0]) << " " << format_sci(p[1]) << " " << format_sci(p[2]) << "\n";
    }
  }
  out << "POLYGONS " << n_tris << " " << 4 * n_tris << "\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    const int base = e * pts_per_elem;
    for (const auto& t : ref_tris) {
      out << "3 " << base + t[0] << " " << base + t[1] << " " << base + t[2] << "\n";
    }
  }
  out << "POINT_DATA " << n_points << "\n";
  out << "VECTORS velocity double\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (const Vec2& rp : ref_pts) {
      const Vec3 v = vel.eval_vector(velocity, e, rp);
      out << format_sci(v[0]) << " " << format_sci(v[1]) << " " << format_sci(v[2]) << "\n";
    }
  }
  out << "SCALARS pressure double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (const Vec2& rp : ref_pts) {
      out << format_sci(spaces.pressure->eval_scalar(pressure, e, rp)) << "\n";
    }
  }
  out << "SCALARS lambda double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (const Vec2& rp : ref_pts) {
      const double l =
          lambda.size() > 0 ? spaces.lambda->eval_scalar(lambda, e, rp) : 0.0;
      out << format_sci(l) << "\n";
    }
  }
}

void write_matrix_market(std::ostream& out, const SpMat& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows() << " " << matrix.cols() << " " << matrix.nonZeros() << "\n";
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SpMat::InnerIterator it(matrix, k); it; ++it) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%d %d %.16e\n", static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      out << buf;
    }
  }
}

}  // namespace surfns
