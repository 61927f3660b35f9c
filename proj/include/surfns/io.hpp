#pragma once

#include <iosfwd>
#include <string>

#include "surfns/fespace.hpp"

namespace surfns {

/// Number formatted in scientific notation with 6 significant digits.
std::string format_sci(double value);

/// VTK legacy ASCII 2.0 POLYDATA export; high-order elements are written as
/// 4^(k_g - 1) flat sub-triangles. Point data arrays: "velocity" (3
/// components), "pressure", "lambda".
void write_vtk(std::ostream& out, const THSpaces& spaces, const VecX& velocity,
               const VecX& pressure, const VecX& lambda);

/// MatrixMarket coordinate format (1-based indices).
void write_matrix_market(std::ostream& out, const SpMat& matrix);

}  // namespace surfns
