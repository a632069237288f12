#include "rollslide/surfaces.hpp"

#include <cmath>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr double kPoleMargin = 1e-6;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  }
}

}  // namespace

ParametricSurface ParametricSurface::plane() { return {}; }

ParametricSurface ParametricSurface::sphere(double radius) {
  require_positive(radius, "radius");
  ParametricSurface s;
  s.kind_ = Kind::Sphere;
  s.a_ = s.c_ = radius;
  return s;
}

ParametricSurface ParametricSurface::hemisphere(double radius) {
  ParametricSurface s = sphere(radius);
  s.kind_ = Kind::Hemisphere;
  return s;
}

ParametricSurface ParametricSurface::cylinder(double radius) {
  require_positive(radius, "radius");
  ParametricSurface s;
  s.kind_ = Kind::Cylinder;
  s.a_ = radius;
  return s;
}

ParametricSurface ParametricSurface::ellipsoid(double a, double b, double c) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(c, "c");
  if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
    throw Error(ErrorCode::InvalidArgument,
                "triaxial ellipsoids have no orthogonal latitude-longitude chart");
  }
  ParametricSurface s;
  s.kind_ = Kind::Spheroid;
  s.a_ = a;
  s.c_ = c;
  return s;
}

ParametricSurface ParametricSurface::torus(double major_radius, double tube_radius) {
  require_positive(major_radius, "major_radius");
  require_positive(tube_radius, "tube_radius");
  if (tube_radius >= major_radius) {
    throw Error(ErrorCode::InvalidArgument, "tube radius must be below major radius");
  }
  ParametricSurface s;
  s.kind_ = Kind::Torus;
  s.a_ = major_radius;
  s.c_ = tube_radius;
  return s;
}

std::string ParametricSurface::name() const {
  switch (kind_) {
    case Kind::Plane: return "plane";
    case Kind::Sphere: return "sphere";
    case Kind::Hemisphere: return "hemisphere";
    case Kind::Cylinder: return "cylinder";
    case Kind::Spheroid: return "spheroid";
    case Kind::Torus: return "torus";
  }
  return "unknown";
}

void ParametricSurface::check_domain(double u, double v) const {
  if (!std::isfinite(u) || !std::isfinite(v)) {
    throw Error(ErrorCode::ChartSingularity, "non-finite chart coordinates");
  }
  switch (kind_) {
    case Kind::Sphere:
    case Kind::Spheroid:
      if (std::abs(v) > M_PI / 2 - kPoleMargin) {
        throw Error(ErrorCode::ChartSingularity,
                    "latitude " + std::to_string(v) + " is at a pole");
      }
      break;
    case Kind::Hemisphere:
      if (v < 0.0 || v > M_PI / 2 - kPoleMargin) {
        throw Error(ErrorCode::ChartSingularity,
                    "latitude " + std::to_string(v) + " is outside the hemisphere chart");
      }
      break;
    default:
      break;
  }
}

ParametricSurface::Profile ParametricSurface::profile(double v) const {
  const double s = std::sin(v);
  const double c = std::cos(v);
  switch (kind_) {
    case Kind::Sphere:
    case Kind::Hemisphere:
    case Kind::Spheroid:
      return {a_ * c, c_ * s, -a_ * s, c_ * c, -a_ * c, -c_ * s};
    case Kind::Cylinder:
      return {a_, v, 0.0, 1.0, 0.0, 0.0};
    case Kind::Torus:
      return {a_ + c_ * c, c_ * s, -c_ * s, c_ * c, -c_ * c, -c_ * s};
    case Kind::Plane:
      break;
  }
  return {0, 0, 0, 0, 0, 0};
}

Vec3 ParametricSurface::position(double u, double v) const {
  if (kind_ == Kind::Plane) return {u, v, 0.0};
  const Profile p = profile(v);
  return {p.rho * std::cos(u), p.rho * std::sin(u), p.h};
}

Mat3 ParametricSurface::frame(double u, double v) const {
  if (kind_ == Kind::Plane) return Mat3::Identity();
  const Profile p = profile(v);
  const double s = std::hypot(p.drho, p.dh);
  const double cu = std::cos(u);
  const double su = std::sin(u);
  Mat3 r;
  r.col(0) = Vec3(-su, cu, 0.0);
  r.col(1) = Vec3(p.drho * cu, p.drho * su, p.dh) / s;
  r.col(2) = Vec3(p.dh * cu, p.dh * su, -p.drho) / s;
  return r;
}

SurfaceGeometry ParametricSurface::geometry(double u, double v) const {
  check_domain(u, v);
  SurfaceGeometry g;
  if (kind_ == Kind::Plane) return g;
  const Profile p = profile(v);
  const double s = std::hypot(p.drho, p.dh);
  g.metric = Vec2(p.rho, s).asDiagonal();
  g.curvature = Vec2(p.dh / (s * p.rho),
                     (p.drho * p.ddh - p.dh * p.ddrho) / (s * s * s))
                    .asDiagonal();
  g.torsion = Eigen::RowVector2d(-p.drho / (s * p.rho), 0.0);
  return g;
}

Vec2 ParametricSurface::chart_of(const Vec3& p) const {
  if (kind_ == Kind::Plane) return {p.x(), p.y()};
  const double u = std::atan2(p.y(), p.x());
  const double rho = std::hypot(p.x(), p.y());
  switch (kind_) {
    case Kind::Cylinder:
      return {u, p.z()};
    case Kind::Torus:
      return {u, std::atan2(p.z(), rho - a_)};
    default:
      // Spheroid latitude from the parametric (reduced) angle.
      return {u, std::atan2(p.z() / c_, rho / a_)};
  }
}

SurfaceGeometry primitive_geometry(const ParametricSurface& surface, double u,
                                   double v) {
  return surface.geometry(u, v);
}

}  // namespace rollslide
