#pragma once

#include <functional>

#include "surfns/types.hpp"

namespace surfns {

/// Analytic closed surface embedded in R^3, described either as a sphere or
/// through a level set phi with analytic first and second derivatives.
/// Provides the closest-point projection pi, signed distance d, unit outward
/// normal n and the Weingarten map H = grad_Gamma n.
class Surface {
 public:
  enum class Kind { Sphere, LevelSet };

  struct LevelSetDesc {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<Mat3(const Vec3&)> hessian;
    // Optional diffeomorphism from the unit sphere onto the surface; used
    // only for placing base-mesh vertices exactly on the surface.
    std::function<Vec3(const Vec3&)> sphere_map;
  };

  static Surface sphere(double radius);

  /// The varying-curvature surface
  ///   phi(x) = x1^2/4 + x2^2 + 4 x3^2 / (1 + sin(pi x1)/2)^2 - 1,
  /// together with the sphere-to-surface map
  ///   F(p) = (2 p0, p1, p2 (1 + sin(2 pi p0)/2) / 2).
  static Surface varying_curvature();

  static Surface level_set(LevelSetDesc desc);

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  bool has_sphere_map() const;
  Vec3 map_from_unit_sphere(const Vec3& p) const;

  /// Closest point on the surface to a query x in the reach band.
  Vec3 closest_point(const Vec3& x) const;

  /// Signed distance, positive outside.
  double signed_distance(const Vec3& x) const;

  /// Unit outward normal at a point p on the surface.
  Vec3 normal(const Vec3& p) const;

  /// Weingarten map H = P (hess phi / |grad phi|) P at p on the surface;
  /// satisfies H n = 0, H = P H P, H symmetric.
  Mat3 weingarten(const Vec3& p) const;

  /// Finite-difference Weingarten map (central differences of the extended
  /// normal field n∘pi); the test oracle for the analytic path.
  Mat3 weingarten_fd(const Vec3& p, double step = 1e-5) const;

  Mat3 projector(const Vec3& p) const { return tangent_projector(normal(p)); }

  double level_set_value(const Vec3& x) const;
  Vec3 level_set_gradient(const Vec3& x) const;

  double projection_tolerance = 1e-12;
  int max_newton_iters = 50;

  Surface() = default;  // unit sphere

 private:
  Kind kind_ = Kind::Sphere;
  double radius_ = 1.0;
  LevelSetDesc desc_;
};

}  // namespace surfns
