#include <doctest.h>

#include <cmath>
#include <random>

#include "rollslide/error.hpp"
#include "rollslide/se3.hpp"

using namespace rollslide;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Pose random_pose(std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(1e-3, max_angle);
  Vec3 axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-3) axis = Vec3(u(rng), u(rng), u(rng));
  Pose p;
  p.rotation = exp_so3(axis.normalized() * ang(rng));
  p.translation = 50.0 * Vec3(u(rng), u(rng), u(rng));
  return p;
}

}  // namespace

TEST_CASE("exp_map of the zero twist is the identity") {
  const Pose p = exp_map(Twist::zero(), 3.7);
  CHECK(max_abs(p.matrix() - Eigen::Matrix4d::Identity()) == 0.0);
}

TEST_CASE("exp_map half turn about z") {
  const Pose p = exp_map({Vec3(0, 0, M_PI), Vec3::Zero()}, 1.0);
  Mat3 expected;
  expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK(max_abs(p.rotation - expected) < 1e-12);
  CHECK(p.translation.norm() < 1e-12);
}

TEST_CASE("exp_map screw motion matches the closed form") {
  // Frozen from the numpy oracle: Rz(90 deg), t = (1, 1, 0).
  const Pose p = exp_map({Vec3(0, 0, 1), Vec3(1, 0, 0)}, M_PI / 2);
  Mat3 Rz;
  Rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(max_abs(p.rotation - Rz) < 1e-12);
  CHECK(max_abs(p.translation - Vec3(1, 1, 0)) < 1e-12);
}

TEST_CASE("log_map special cases") {
  const Twist z = log_map(Pose::identity());
  CHECK(z.vector().norm() == 0.0);

  Pose t;
  t.translation = Vec3(0, 0, 5);
  const Twist xi = log_map(t);
  CHECK(xi.angular.norm() < 1e-15);
  CHECK(max_abs(xi.linear - Vec3(0, 0, 5)) < 1e-15);
}

TEST_CASE("log_map rejects angles at pi") {
  Pose p;
  p.rotation = exp_so3(Vec3(M_PI, 0, 0));
  try {
    (void)log_map(p);
    FAIL("expected AngleNearPi");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AngleNearPi);
  }
}

TEST_CASE("exp/log roundtrip over 1000 seeded poses") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(rng, M_PI - 1e-3);
    const Pose q = exp_map(log_map(p));
    worst = std::max(worst, max_abs(p.matrix() - q.matrix()));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("exp_map is accurate for tiny rotations") {
  const Twist xi{Vec3(1e-9, -2e-9, 3e-10), Vec3(1, 2, 3)};
  const Pose p = exp_map(xi);
  CHECK(max_abs(p.translation - Vec3(1, 2, 3)) < 1e-8);
  const Twist back = log_map(p);
  CHECK(max_abs(back.vector() - xi.vector()) < 1e-12);
}

TEST_CASE("adjoint examples") {
  CHECK(max_abs(adjoint(Pose::identity()) - Mat6::Identity()) == 0.0);

  Pose r;
  r.rotation = exp_so3(Vec3(0.3, -0.2, 0.9));
  const Mat6 A = adjoint(r);
  CHECK(max_abs(A.topLeftCorner<3, 3>() - r.rotation) < 1e-15);
  CHECK(max_abs(A.bottomRightCorner<3, 3>() - r.rotation) < 1e-15);
  CHECK(max_abs(A.topRightCorner<3, 3>()) == 0.0);
  CHECK(max_abs(A.bottomLeftCorner<3, 3>()) < 1e-15);
}

TEST_CASE("adjoint inverse and composition") {
  std::mt19937_64 rng(11);
  double inv_err = 0.0;
  double comp_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Pose a = random_pose(rng, 3.0);
    const Pose b = random_pose(rng, 3.0);
    inv_err = std::max(inv_err, max_abs(adjoint(a) * adjoint(a.inverse()) - Mat6::Identity()));
    comp_err = std::max(comp_err, max_abs(adjoint(a * b) - adjoint(a) * adjoint(b)));
  }
  CHECK(inv_err <= 1e-9);
  CHECK(comp_err <= 1e-9);
}

TEST_CASE("adjoint transports twists consistently with conjugation") {
  // T * exp(xi) * T^-1 == exp(Ad(T) xi)
  std::mt19937_64 rng(3);
  const Pose T = random_pose(rng, 2.0);
  const Twist xi{Vec3(0.2, -0.1, 0.4), Vec3(1.0, 2.0, -0.5)};
  const Pose lhs = T * exp_map(xi) * T.inverse();
  const Pose rhs = exp_map(transform_twist(T, xi));
  CHECK(max_abs(lhs.matrix() - rhs.matrix()) < 1e-9);
}

TEST_CASE("rk4 with zero twist leaves the pose unchanged") {
  std::mt19937_64 rng(5);
  const Pose p = random_pose(rng, 2.0);
  const Pose q = rk4_pose_step(p, Twist::zero(), 0.01);
  CHECK(max_abs(p.matrix() - q.matrix()) < 1e-12);
}

TEST_CASE("rk4 closes a constant-rate orbit") {
  const double w = 0.7;
  const int n = 400;
  const double dt = 2.0 * M_PI / (w * n);
  Pose p;
  for (int i = 0; i < n; ++i) p = rk4_pose_step(p, {Vec3(0, 0, w), Vec3(1, 0, 0)}, dt);
  CHECK(max_abs(p.rotation - Mat3::Identity()) < 1e-6);
  CHECK(p.translation.norm() < 1e-6);
}

TEST_CASE("rk4 per-step error is fifth order") {
  const Twist xi{Vec3(0.4, -0.3, 0.8), Vec3(2.0, -1.0, 0.5)};
  auto err = [&](double dt) {
    const Pose rk = rk4_pose_step(Pose::identity(), xi, dt);
    return max_abs(rk.matrix() - exp_map(xi, dt).matrix());
  };
  const double e1 = err(0.2);
  const double e2 = err(0.1);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("rk4 keeps the rotation determinant at one over 1e5 steps") {
  Pose p;
  const Twist xi{Vec3(0.9, -0.4, 1.3), Vec3(0.1, 0.2, 0.3)};
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    p = rk4_pose_step(p, xi, 0.01);
    if (i % 1000 == 0) worst = std::max(worst, std::abs(p.rotation.determinant() - 1.0));
  }
  worst = std::max(worst, std::abs(p.rotation.determinant() - 1.0));
  CHECK(worst <= 1e-9);
  CHECK(max_abs(p.rotation.transpose() * p.rotation - Mat3::Identity()) <= 1e-9);
}

TEST_CASE("axis_angle_anti_align") {
  CHECK(axis_angle_anti_align(Vec3(0, 0, 1), Vec3(0, 0, -1)).norm() < 1e-15);

  const Vec3 a = axis_angle_anti_align(Vec3(0, 0, 1), Vec3(0, 0, 1));
  CHECK(std::abs(a.norm() - M_PI) < 1e-12);
  CHECK(std::abs(a.normalized().dot(Vec3(0, 0, 1))) < 1e-12);
  CHECK(max_abs(a.normalized() - Vec3(1, 0, 0)) < 1e-12);

  const Vec3 b = axis_angle_anti_align(Vec3(0, 0, 1), Vec3(1, 0, 0));
  CHECK(max_abs(exp_so3(b) * Vec3(1, 0, 0) - Vec3(0, 0, -1)) < 1e-9);

  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 z0 = Vec3(n(rng), n(rng), n(rng)).normalized();
    const Vec3 z1 = Vec3(n(rng), n(rng), n(rng)).normalized();
    worst = std::max(worst, max_abs(exp_so3(axis_angle_anti_align(z0, z1)) * z1 + z0));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("nearest_rotation projects a perturbed matrix back onto SO(3)") {
  Mat3 m = exp_so3(Vec3(0.1, 0.2, 0.3));
  m(0, 1) += 1e-4;
  const Mat3 r = nearest_rotation(m);
  CHECK(max_abs(r.transpose() * r - Mat3::Identity()) < 1e-14);
  CHECK(std::abs(r.determinant() - 1.0) < 1e-14);
  CHECK(max_abs(r - m) < 1e-3);
}
