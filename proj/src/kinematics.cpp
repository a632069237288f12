#include "rollslide/kinematics.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr double kSingularTol = 1e-9;

struct PlanarSolve {
  Vec2 h0, h1;
};

// Solves E K1 h1 - A E K0 h0 = -w_xy and h1 - A h0 = -v_xy, where A is the
// in-plane block of R_rel^T (a reflection for ideal contact).
PlanarSolve solve_planar(const Vec2& w_xy, const Vec2& v_xy, const Mat2& K0,
                         const Mat2& K1, const Mat2& A) {
  const Mat2 E = rot90();
  const Mat2 S = E * K1 * A - A * E * K0;
  const Eigen::JacobiSVD<Mat2> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < kSingularTol) {
    throw Error(ErrorCode::SingularRelativeCurvature,
                "relative curvature has singular value " +
                    std::to_string(svd.singularValues()(1)));
  }
  const Vec2 rhs = E * K1 * v_xy - w_xy;
  PlanarSolve out;
  out.h0 = svd.solve(rhs);
  out.h1 = A * out.h0 - v_xy;
  return out;
}

}  // namespace

ContactFrame mesh_contact_frame(const ManifoldMesh& mesh, const SurfacePoint& p,
                                const Vec3& x_hint) {
  const SurfacePoint q = p.normalized();
  const TangentFrame t = tangent_basis(mesh, q, x_hint);
  ContactFrame f;
  f.rotation.col(0) = t.x;
  f.rotation.col(1) = t.y;
  f.rotation.col(2) = t.z;
  f.position = mesh.position(q);
  f.surface_point = q;
  return f;
}

ContactFrame chart_contact_frame(const ParametricSurface& surface, double u, double v) {
  surface.check_domain(u, v);
  ContactFrame f;
  f.rotation = surface.frame(u, v);
  f.position = surface.position(u, v);
  f.chart = Vec2(u, v);
  return f;
}

Mat2 rot90() {
  Mat2 e;
  e << 0.0, -1.0, 1.0, 0.0;
  return e;
}

Twist induced_contact_twist(const SurfaceGeometry& geom, const Vec2& g_dot) {
  const Vec2 h = geom.metric * g_dot;
  const Vec2 w = rot90() * geom.curvature * h;
  Twist t;
  t.angular = Vec3(w.x(), w.y(), geom.torsion.dot(h));
  t.linear = Vec3(h.x(), h.y(), 0.0);
  return t;
}

Pose ideal_contact_pose(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Pose p;
  p.rotation << c, s, 0.0, s, -c, 0.0, 0.0, 0.0, -1.0;
  return p;
}

double spin_angle(const Mat3& relative_rotation) {
  // x1 expressed in frame 0 is (cos psi, sin psi, 0) for the ideal pose.
  return std::atan2(relative_rotation(1, 0), relative_rotation(0, 0));
}

Twist relative_contact_twist(const Pose& T_WB0, const Twist& V_WB0, const Pose& T_WB1,
                             const Twist& V_WB1, const Pose& T_B1L1) {
  const Pose T_L1B1 = T_B1L1.inverse();
  const Pose T_L1B0 = T_L1B1 * T_WB1.inverse() * T_WB0;
  return transform_twist(T_L1B1, V_WB1) - transform_twist(T_L1B0, V_WB0);
}

Twist solve_body1_twist(const Twist& V_L0L1, const Pose& T_WB0, const Twist& V_WB0,
                        const Pose& T_WB1, const Pose& T_B1L1) {
  const Pose T_L1B0 = T_B1L1.inverse() * T_WB1.inverse() * T_WB0;
  return transform_twist(T_B1L1, V_L0L1 + transform_twist(T_L1B0, V_WB0));
}

ContactVelocities solve_contact_velocities(const Twist& V_L0L1, const Mat2& K0,
                                           const Mat2& K1, const Mat3& R_rel) {
  const Mat2 A = R_rel.transpose().topLeftCorner<2, 2>();
  const PlanarSolve s = solve_planar(V_L0L1.angular.head<2>(), V_L0L1.linear.head<2>(),
                                     K0, K1, A);
  ContactVelocities out;
  out.g_dot0 = s.h0;
  out.g_dot1 = s.h1;
  out.separation_speed = V_L0L1.linear.z();
  out.spin_rate = V_L0L1.angular.z();
  return out;
}

ContactVelocities solve_contact_velocities(const Twist& V_L0L1,
                                           const SurfaceGeometry& geom0,
                                           const SurfaceGeometry& geom1,
                                           const Mat3& R_rel) {
  const Mat3 Rt = R_rel.transpose();
  const Mat2 A = Rt.topLeftCorner<2, 2>();
  const PlanarSolve s = solve_planar(V_L0L1.angular.head<2>(), V_L0L1.linear.head<2>(),
                                     geom0.curvature, geom1.curvature, A);
  ContactVelocities out;
  out.g_dot0 = geom0.metric.inverse() * s.h0;
  out.g_dot1 = geom1.metric.inverse() * s.h1;
  const Twist c0 = induced_contact_twist(geom0, out.g_dot0);
  const Twist c1 = induced_contact_twist(geom1, out.g_dot1);
  out.spin_rate = V_L0L1.angular.z() + c1.angular.z() - Rt.row(2).dot(c0.angular);
  out.separation_speed = V_L0L1.linear.z() - Rt.row(2).dot(c0.linear);
  return out;
}

double default_curvature_step(const ManifoldMesh& mesh) {
  return std::max(0.5 * mesh.mean_edge_length(), 1e-3);
}

Mat2 estimate_curvature(const ManifoldMesh& mesh, const ContactFrame& frame, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "curvature step must be positive");
  }
  const SurfacePoint& p = frame.surface_point;
  auto normal_at = [&](const Vec3& dir) {
    const GeodesicTrace t = trace_geodesic(mesh, p, dir, h);
    return interpolated_normal(mesh, t.end);
  };
  const Vec3 x = frame.x();
  const Vec3 y = frame.y();
  const Vec3 dx = (normal_at(x) - normal_at(-x)) / (2.0 * h);
  const Vec3 dy = (normal_at(y) - normal_at(-y)) / (2.0 * h);
  Mat2 k;
  k << x.dot(dx), x.dot(dy), y.dot(dx), y.dot(dy);
  return 0.5 * (k + k.transpose());
}

}  // namespace rollslide
