#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rollslide {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Rigid transform. Rotation is kept orthonormal by every producer in this
/// library; translation is in millimeters.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Eigen::Matrix4d matrix() const;
};

Pose operator*(const Pose& a, const Pose& b);

/// Spatial velocity stacked as [angular; linear] (rad/s, mm/s).
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  static Twist zero() { return {}; }
  static Twist from_vector(const Vec6& v) {
    return {v.head<3>(), v.tail<3>()};
  }

  Vec6 vector() const {
    Vec6 v;
    v << angular, linear;
    return v;
  }

  Twist operator+(const Twist& o) const {
    return {angular + o.angular, linear + o.linear};
  }
  Twist operator-(const Twist& o) const {
    return {angular - o.angular, linear - o.linear};
  }
  Twist operator*(double s) const { return {angular * s, linear * s}; }
};

Mat3 hat(const Vec3& w);
Vec3 vee(const Mat3& m);

/// SO(3) exponential of a rotation vector (Rodrigues).
Mat3 exp_so3(const Vec3& rotvec);

/// SO(3) logarithm. Throws AngleNearPi within 1e-6 of pi.
Vec3 log_so3(const Mat3& rotation);

/// Rotation angle in [0, pi], accurate near both ends.
double rotation_angle(const Mat3& rotation);

Pose exp_map(const Twist& xi, double dt = 1.0);

/// Principal-branch logarithm; throws AngleNearPi within 1e-6 of pi.
Twist log_map(const Pose& pose);

/// 6x6 adjoint acting on [angular; linear] twists.
Mat6 adjoint(const Pose& pose);

inline Twist transform_twist(const Pose& pose, const Twist& xi) {
  return Twist::from_vector(adjoint(pose) * xi.vector());
}

/// Nearest rotation in the Frobenius sense (polar decomposition).
Mat3 nearest_rotation(const Mat3& m);

/// Classical RK4 on dT/dt = T * hat(body_twist) for a constant body twist,
/// followed by polar renormalization of the rotation.
Pose rk4_pose_step(const Pose& pose, const Twist& body_twist, double dt);

/// RK4 on dR/dt = R * hat(body_omega), renormalized.
Mat3 rk4_rotation_step(const Mat3& rotation, const Vec3& body_omega, double dt);

/// Axis-angle vector a with exp(a) * z1 == -z0. When z1 == z0 the rotation is
/// by pi about the unit axis orthogonal to z0 with the largest |x| component
/// (ties go to +x, then +y).
Vec3 axis_angle_anti_align(const Vec3& z0, const Vec3& z1);

}  // namespace rollslide
