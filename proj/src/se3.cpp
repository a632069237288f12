#include "rollslide/se3.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "rollslide/error.hpp"

namespace rollslide {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AngleNearPi: return "AngleNearPi";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::NonManifoldVertex: return "NonManifoldVertex";
    case ErrorCode::OpenBoundary: return "OpenBoundary";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::NotPenetrating: return "NotPenetrating";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::DegenerateHint: return "DegenerateHint";
    case ErrorCode::StuckAtVertex: return "StuckAtVertex";
    case ErrorCode::SingularRelativeCurvature: return "SingularRelativeCurvature";
    case ErrorCode::ChartSingularity: return "ChartSingularity";
    case ErrorCode::SpinIkDiverged: return "SpinIkDiverged";
    case ErrorCode::RankDeficientConstraints: return "RankDeficientConstraints";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose operator*(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

namespace {

// Coefficients of the SO(3)/SE(3) series, Taylor-expanded near zero.
struct SeriesCoeffs {
  double a;  // sin t / t
  double b;  // (1 - cos t) / t^2
  double c;  // (t - sin t) / t^3
};

SeriesCoeffs series(double t) {
  const double t2 = t * t;
  if (t < 1e-4) {
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  return {std::sin(t) / t, (1.0 - std::cos(t)) / t2, (t - std::sin(t)) / (t2 * t)};
}

}  // namespace

Mat3 exp_so3(const Vec3& rotvec) {
  const double t = rotvec.norm();
  const SeriesCoeffs k = series(t);
  const Mat3 w = hat(rotvec);
  return Mat3::Identity() + k.a * w + k.b * w * w;
}

double rotation_angle(const Mat3& rotation) {
  const Vec3 s = 0.5 * vee(rotation - rotation.transpose());
  const double c = 0.5 * (rotation.trace() - 1.0);
  return std::atan2(s.norm(), c);
}

Vec3 log_so3(const Mat3& rotation) {
  const double t = rotation_angle(rotation);
  if (t > M_PI - 1e-6) {
    throw Error(ErrorCode::AngleNearPi,
                "rotation angle " + std::to_string(t) + " is within 1e-6 of pi");
  }
  const Vec3 s = 0.5 * vee(rotation - rotation.transpose());
  if (t < 1e-4) {
    // sin t / t series inverted
    return s * (1.0 + t * t / 6.0 + 7.0 * t * t * t * t / 360.0);
  }
  if (t < M_PI - 1e-2) {
    return s * (t / std::sin(t));
  }
  // Near pi, sin t is small: recover the axis from the symmetric part.
  const Mat3 sym = 0.5 * (rotation + rotation.transpose()) -
                   std::cos(t) * Mat3::Identity();
  Eigen::Index col = 0;
  sym.diagonal().maxCoeff(&col);
  Vec3 axis = sym.col(col).normalized();
  if (axis.dot(s) < 0.0) axis = -axis;
  return axis * t;
}

Pose exp_map(const Twist& xi, double dt) {
  const Vec3 w = xi.angular * dt;
  const Vec3 v = xi.linear * dt;
  const double t = w.norm();
  const SeriesCoeffs k = series(t);
  const Mat3 wh = hat(w);
  const Mat3 wh2 = wh * wh;
  const Mat3 rot = Mat3::Identity() + k.a * wh + k.b * wh2;
  const Mat3 left_jacobian = Mat3::Identity() + k.b * wh + k.c * wh2;
  return {rot, left_jacobian * v};
}

Twist log_map(const Pose& pose) {
  const Vec3 w = log_so3(pose.rotation);
  const double t = w.norm();
  const Mat3 wh = hat(w);
  double d;
  if (t < 1e-4) {
    d = 1.0 / 12.0 + t * t / 720.0;
  } else {
    d = (1.0 - t * std::sin(t) / (2.0 * (1.0 - std::cos(t)))) / (t * t);
  }
  const Mat3 inv_left_jacobian = Mat3::Identity() - 0.5 * wh + d * wh * wh;
  return {w, inv_left_jacobian * pose.translation};
}

Mat6 adjoint(const Pose& pose) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = pose.rotation;
  ad.bottomRightCorner<3, 3>() = pose.rotation;
  ad.bottomLeftCorner<3, 3>() = hat(pose.translation) * pose.rotation;
  return ad;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Pose rk4_pose_step(const Pose& pose, const Twist& body_twist, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rk4_pose_step requires dt > 0");
  }
  Eigen::Matrix4d xi = Eigen::Matrix4d::Zero();
  xi.topLeftCorner<3, 3>() = hat(body_twist.angular);
  xi.topRightCorner<3, 1>() = body_twist.linear;

  const Eigen::Matrix4d t0 = pose.matrix();
  const Eigen::Matrix4d k1 = t0 * xi;
  const Eigen::Matrix4d k2 = (t0 + 0.5 * dt * k1) * xi;
  const Eigen::Matrix4d k3 = (t0 + 0.5 * dt * k2) * xi;
  const Eigen::Matrix4d k4 = (t0 + dt * k3) * xi;
  const Eigen::Matrix4d t1 = t0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return {nearest_rotation(t1.topLeftCorner<3, 3>()), t1.topRightCorner<3, 1>()};
}

Mat3 rk4_rotation_step(const Mat3& rotation, const Vec3& body_omega, double dt) {
  return rk4_pose_step({rotation, Vec3::Zero()}, {body_omega, Vec3::Zero()}, dt)
      .rotation;
}

Vec3 axis_angle_anti_align(const Vec3& z0, const Vec3& z1) {
  const Vec3 target = -z0;
  const Vec3 cross = z1.cross(target);
  const double s = cross.norm();
  const double c = z1.dot(target);
  const double angle = std::atan2(s, c);
  if (angle < 1e-15) return Vec3::Zero();
  if (s > 1e-12) return cross / s * angle;
  // z1 == z0: rotate by pi about a deterministic axis orthogonal to z0.
  Vec3 axis = Vec3::UnitX() - z0 * z0.x();
  if (axis.norm() < 1e-9) axis = Vec3::UnitY() - z0 * z0.y();
  return axis.normalized() * M_PI;
}

}  // namespace rollslide
