#pragma once

#include <string>

#include "rollslide/se3.hpp"

namespace rollslide {

/// First- and second-order chart geometry at a point.
///
/// `metric` is diag(|f_u|, |f_v|) for an orthogonal chart f (mm per unit of
/// chart coordinate), `curvature` is [x y]^T [z_u/|f_u|, z_v/|f_v|] (1/mm)
/// and `torsion` is y^T [x_u/|f_u|, x_v/|f_v|] (1/mm), with x, y the unit
/// chart tangents and z = x cross y the outward normal.
struct SurfaceGeometry {
  Mat2 metric = Mat2::Identity();
  Mat2 curvature = Mat2::Zero();
  Eigen::RowVector2d torsion = Eigen::RowVector2d::Zero();
};

/// Analytic primitives with an orthogonal chart. All curved kinds except the
/// plane are surfaces of revolution about the body z axis, parametrized by
/// u = azimuth and v = the profile parameter (latitude for spheres and
/// spheroids, height for the cylinder, tube angle for the torus).
class ParametricSurface {
 public:
  enum class Kind { Plane, Sphere, Hemisphere, Cylinder, Spheroid, Torus };

  static ParametricSurface plane();
  static ParametricSurface sphere(double radius);
  /// Upper (z >= 0) half of a sphere; the chart covers latitudes [0, pi/2).
  static ParametricSurface hemisphere(double radius);
  static ParametricSurface cylinder(double radius);
  /// Ellipsoid with semi-axes (a, b, c). Only spheroids (a == b) have an
  /// orthogonal latitude-longitude chart; anything else throws
  /// InvalidArgument.
  static ParametricSurface ellipsoid(double a, double b, double c);
  static ParametricSurface torus(double major_radius, double tube_radius);

  Kind kind() const { return kind_; }
  std::string name() const;

  /// Throws ChartSingularity near poles or outside the chart's domain.
  void check_domain(double u, double v) const;

  Vec3 position(double u, double v) const;
  /// Columns x, y, z of the chart frame at (u, v).
  Mat3 frame(double u, double v) const;
  SurfaceGeometry geometry(double u, double v) const;

  /// Chart coordinates of the surface point nearest to `p` along the
  /// profile (exact for points on the surface).
  Vec2 chart_of(const Vec3& p) const;

 private:
  struct Profile {
    double rho, h, drho, dh, ddrho, ddh;
  };
  Profile profile(double v) const;

  Kind kind_ = Kind::Plane;
  double a_ = 0.0;  // radius, equatorial semi-axis or major radius
  double c_ = 0.0;  // polar semi-axis or tube radius
};

/// Closed-form geometry of `surface` at chart point (u, v).
SurfaceGeometry primitive_geometry(const ParametricSurface& surface, double u,
                                   double v);

}  // namespace rollslide
