#pragma once

#include <optional>

#include "rollslide/geodesic.hpp"
#include "rollslide/surfaces.hpp"

namespace rollslide {

/// Surface-bound frame, expressed in its body's frame. Columns of `rotation`
/// are x, y, z with z the outward normal.
struct ContactFrame {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
  SurfacePoint surface_point;
  std::optional<Vec2> chart;  // (u, v) when bound to a ParametricSurface

  Pose pose() const { return {rotation, position}; }
  Vec3 x() const { return rotation.col(0); }
  Vec3 y() const { return rotation.col(1); }
  Vec3 z() const { return rotation.col(2); }
};

/// Frame on a mesh at `p`, z the interpolated normal, x the hint projected
/// onto the tangent plane.
ContactFrame mesh_contact_frame(const ManifoldMesh& mesh, const SurfacePoint& p,
                                const Vec3& x_hint);

/// Chart frame of a primitive at (u, v).
ContactFrame chart_contact_frame(const ParametricSurface& surface, double u, double v);

/// Rotation by +90 degrees in the tangent plane.
Mat2 rot90();

/// Body twist of the contact frame induced by chart velocity `g_dot`:
/// angular xy = E K M g, angular z = T M g, linear xy = M g, linear z = 0.
Twist induced_contact_twist(const SurfaceGeometry& geom, const Vec2& g_dot);

/// Ideal relative contact pose for spin angle psi: coincident origins,
/// anti-parallel normals, x1 at angle psi from x0 and y1 mirrored.
Pose ideal_contact_pose(double psi);

/// Spin angle of a relative rotation, assuming it is (close to) ideal.
double spin_angle(const Mat3& relative_rotation);

/// Relative twist between the local frames L0 and L1 (expressed in L1) from
/// the bodies' body twists. `T_B1L1` is body1's contact frame.
Twist relative_contact_twist(const Pose& T_WB0, const Twist& V_WB0, const Pose& T_WB1,
                             const Twist& V_WB1, const Pose& T_B1L1);

/// Inverse of relative_contact_twist in its V_WB1 argument.
Twist solve_body1_twist(const Twist& V_L0L1, const Pose& T_WB0, const Twist& V_WB0,
                        const Pose& T_WB1, const Pose& T_B1L1);

struct ContactVelocities {
  Vec2 g_dot0 = Vec2::Zero();
  Vec2 g_dot1 = Vec2::Zero();
  double separation_speed = 0.0;  // mm/s, unresolved linear z
  double spin_rate = 0.0;         // rad/s, relative spin about the normal
};

/// Geodesic-chart solve (M = I, torsion and spin rows ignored) of the
/// rolling-sliding equations for both contacts' coordinate velocities.
/// `R_rel` is the rotation of contact frame 1 in contact frame 0. Throws
/// SingularRelativeCurvature when the relative curvature system has a
/// singular value below 1e-9.
ContactVelocities solve_contact_velocities(const Twist& V_L0L1, const Mat2& K0,
                                           const Mat2& K1, const Mat3& R_rel);

/// Full solve with metric and torsion (analytic charts). Returns chart-rate
/// velocities; `spin_rate` includes the torsion terms.
ContactVelocities solve_contact_velocities(const Twist& V_L0L1,
                                           const SurfaceGeometry& geom0,
                                           const SurfaceGeometry& geom1,
                                           const Mat3& R_rel);

/// Default central-difference step for estimate_curvature.
double default_curvature_step(const ManifoldMesh& mesh);

/// Central-difference curvature of the interpolated normal field, traced
/// +-h along the frame's x and y, in (x, y) coordinates and symmetrized.
Mat2 estimate_curvature(const ManifoldMesh& mesh, const ContactFrame& frame, double h);

}  // namespace rollslide
