#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace surfns {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// CSR storage (row-major) throughout; column indices per row are sorted and
// deduplicated by construction.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Tangent-plane projector P = I - n (x) n.
inline Mat3 tangent_projector(const Vec3& n) {
  return Mat3::Identity() - n * n.transpose();
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class OutOfReach : public Error {
 public:
  using Error::Error;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class EigensolveFailure : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  using Error::Error;
};

}  // namespace surfns
