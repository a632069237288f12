#include "rollslide/integrators.hpp"

#include <cmath>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr double kSpinFdStep = 1e-6;
constexpr double kMinDisplacement = 1e-9;

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

double spin_objective(const SpinFamily& fam, const Mat3& R_shadow, double psi) {
  const double theta = rotation_angle(fam.at(psi).transpose() * R_shadow);
  return theta * theta;
}

}  // namespace

Twist stabilize(const ContactState& state, const Twist& V_L0L1, const StabilizerGains& gains) {
  const Pose rel = state.relative_pose();
  // Ideal pose seen from C1; zero translation, so the spin choice only
  // affects the rotation, which is replaced below anyway.
  Pose error = rel.inverse() * ideal_contact_pose(0.0);
  const Vec3 z0_in_c1 = rel.rotation.transpose().col(2);
  error.rotation = exp_so3(axis_angle_anti_align(z0_in_c1, Vec3::UnitZ()));
  const Twist v = log_map(error);
  return {V_L0L1.angular + gains.k_omega * v.angular, V_L0L1.linear + gains.k_v * v.linear};
}

StabilizerGains per_step_gains(const StabilizerGains& gains, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  return {gains.k_omega / dt, gains.k_v / dt};
}

Mat3 SpinFamily::at(double psi) const {
  return left * ideal_contact_pose(psi).rotation * right;
}

SpinFamily spin_family(const ContactState& state) {
  return {state.pose0.rotation * state.frame0.rotation, state.frame1.rotation.transpose()};
}

double solve_spin_psi(const Mat3& R_shadow, const Mat3& left, const Mat3& right,
                      double psi_init, const SpinSolveOptions& options) {
  const SpinFamily fam{left, right};
  const double h = kSpinFdStep;
  double psi = wrap_angle(psi_init);
  for (int it = 0; it < options.max_iters; ++it) {
    const double f = spin_objective(fam, R_shadow, psi);
    const double fp = spin_objective(fam, R_shadow, psi + h);
    const double fm = spin_objective(fam, R_shadow, psi - h);
    const double grad = (fp - fm) / (2.0 * h);
    const double curv = (fp - 2.0 * f + fm) / (h * h);
    if (!(curv > 1e-8)) {
      // Away from the basin: restart from the best of a coarse sweep.
      double best = psi;
      double best_f = f;
      for (int k = 0; k < 72; ++k) {
        const double cand = -M_PI + 2.0 * M_PI * k / 72.0;
        const double fc = spin_objective(fam, R_shadow, cand);
        if (fc < best_f) {
          best_f = fc;
          best = cand;
        }
      }
      if (best == psi) {
        throw Error(ErrorCode::SpinIkDiverged, "spin objective has no descent direction");
      }
      psi = best;
      continue;
    }
    const double step = grad / curv;
    psi = wrap_angle(psi - step);
    if (std::abs(step) < options.tol) return psi;
    // Central differences bottom out around 1e-11 rad; accept a stalled
    // iterate that no longer improves the objective.
    if (std::abs(step) < 1e3 * options.tol &&
        spin_objective(fam, R_shadow, psi) >= f) {
      return psi;
    }
  }
  throw Error(ErrorCode::SpinIkDiverged,
              "spin solve did not converge in " + std::to_string(options.max_iters) +
                  " iterations");
}

Pose mated_pose1(const ContactState& state, double psi) {
  return state.pose0 * state.frame0.pose() * ideal_contact_pose(psi) *
         state.frame1.pose().inverse();
}

ContactFrame follow_frame(const ManifoldMesh& mesh, const ContactFrame& previous,
                          const SurfacePoint& p) {
  const SurfacePoint q = p.normalized();
  const Vec3 z = interpolated_normal(mesh, q);
  const Vec3 d = mesh.position(q) - previous.position;
  Vec3 hint = previous.x();
  if (d.norm() >= kMinDisplacement) {
    const Vec3 t = d - d.dot(z) * z;
    if (t.norm() >= kMinDisplacement) hint = t;
  }
  if ((hint - hint.dot(z) * z).norm() < 1e-6 * hint.norm()) hint = previous.y();
  return mesh_contact_frame(mesh, q, hint);
}

AdvanceResult advance_contacts(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                               ContactState& state, const Twist& V_L0L1, double dt) {
  AdvanceResult out;
  const Mat2 K0 = estimate_curvature(mesh0, state.frame0, default_curvature_step(mesh0));
  const Mat2 K1 = estimate_curvature(mesh1, state.frame1, default_curvature_step(mesh1));
  out.velocities =
      solve_contact_velocities(V_L0L1, K0, K1, state.relative_pose().rotation);

  auto move = [&](const ManifoldMesh& mesh, ContactFrame& frame, const Vec2& g_dot) {
    const double length = g_dot.norm() * dt;
    if (!(length > 0.0)) return 0.0;
    const Vec3 dir = frame.x() * g_dot.x() + frame.y() * g_dot.y();
    const GeodesicTrace trace = trace_geodesic(mesh, frame.surface_point, dir, length);
    state.vertex_hits += trace.vertex_hits;
    frame = follow_frame(mesh, frame, trace.end);
    return trace.length_traced;
  };
  out.traced0 = move(mesh0, state.frame0, out.velocities.g_dot0);
  out.traced1 = move(mesh1, state.frame1, out.velocities.g_dot1);
  state.accumulated_geodesic0 += out.traced0;
  state.accumulated_geodesic1 += out.traced1;
  return out;
}

ContactState geodesic_step(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                           const ContactState& state, const Twist& V_L0L1, double dt,
                           const StepMode& mode, const Twist& V_WB0) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  ContactState s = state;
  const bool body0_moves = V_WB0.vector().squaredNorm() > 0.0;

  if (mode.kind == StepMode::Kind::ExactMate) {
    const Twist V_WB1 =
        solve_body1_twist(V_L0L1, s.pose0, V_WB0, s.pose1, s.frame1.pose());
    advance_contacts(mesh0, mesh1, s, V_L0L1, dt);
    if (body0_moves) s.pose0 = rk4_pose_step(s.pose0, V_WB0, dt);
    s.shadow_rotation1 = rk4_rotation_step(s.shadow_rotation1, V_WB1.angular, dt);
    const SpinFamily fam = spin_family(s);
    const double psi_init =
        spin_angle(fam.left.transpose() * s.pose1.rotation * fam.right.transpose());
    s.psi = solve_spin_psi(s.shadow_rotation1, fam.left, fam.right, psi_init);
    s.pose1 = mated_pose1(s, s.psi);
    return s;
  }

  const Twist V = stabilize(s, V_L0L1, per_step_gains(mode.gains, dt));
  const Twist V_WB1 = solve_body1_twist(V, s.pose0, V_WB0, s.pose1, s.frame1.pose());
  advance_contacts(mesh0, mesh1, s, V, dt);
  if (body0_moves) s.pose0 = rk4_pose_step(s.pose0, V_WB0, dt);
  s.pose1 = rk4_pose_step(s.pose1, V_WB1, dt);
  s.shadow_rotation1 = s.pose1.rotation;
  return s;
}

ContactState collision_step(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                            const ContactState& state, const Twist& V_L0L1, double dt,
                            const StabilizerGains& gains, const Twist& V_WB0,
                            unsigned seed) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  ContactState s = state;
  const Twist V = stabilize(s, V_L0L1, per_step_gains(gains, dt));
  const Twist V_WB1 = solve_body1_twist(V, s.pose0, V_WB0, s.pose1, s.frame1.pose());
  if (V_WB0.vector().squaredNorm() > 0.0) s.pose0 = rk4_pose_step(s.pose0, V_WB0, dt);
  s.pose1 = rk4_pose_step(s.pose1, V_WB1, dt);
  s.shadow_rotation1 = s.pose1.rotation;

  const CollisionReport report = collide(mesh0, s.pose0, mesh1, s.pose1, seed);
  SurfacePoint p0;
  SurfacePoint p1;
  if (report.status == ContactStatus::Penetrating) {
    const Vec3 c = weighted_penetration_centroid(report);
    p0 = closest_point(mesh0, s.pose0, c).point;
    p1 = closest_point(mesh1, s.pose1, c).point;
  } else {
    p0 = report.witness_a;
    p1 = report.witness_b;
  }
  const ContactFrame f0 = follow_frame(mesh0, s.frame0, p0);
  const ContactFrame f1 = follow_frame(mesh1, s.frame1, p1);
  s.accumulated_geodesic0 += (f0.position - s.frame0.position).norm();
  s.accumulated_geodesic1 += (f1.position - s.frame1.position).norm();
  s.frame0 = f0;
  s.frame1 = f1;
  return s;
}

ContactState primitive_step(const ParametricSurface& surface0,
                            const ParametricSurface& surface1, const ContactState& state,
                            const Twist& V_L0L1, double dt, const Twist& V_WB0) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!state.frame0.chart || !state.frame1.chart) {
    throw Error(ErrorCode::InvalidArgument, "primitive step needs chart coordinates");
  }
  ContactState s = state;
  const Vec2 c0 = *s.frame0.chart;
  const Vec2 c1 = *s.frame1.chart;
  const SurfaceGeometry g0 = surface0.geometry(c0.x(), c0.y());
  const SurfaceGeometry g1 = surface1.geometry(c1.x(), c1.y());
  const ContactVelocities vel = solve_contact_velocities(
      V_L0L1, g0, g1, ideal_contact_pose(s.psi).rotation);

  const Twist V_WB1 = solve_body1_twist(V_L0L1, s.pose0, V_WB0, s.pose1, s.frame1.pose());
  s.pose0 = s.pose0 * exp_map(V_WB0, dt);
  s.pose1 = s.pose1 * exp_map(V_WB1, dt);
  s.shadow_rotation1 = s.pose1.rotation;

  const Vec2 n0 = c0 + vel.g_dot0 * dt;
  const Vec2 n1 = c1 + vel.g_dot1 * dt;
  s.frame0 = chart_contact_frame(surface0, n0.x(), n0.y());
  s.frame1 = chart_contact_frame(surface1, n1.x(), n1.y());
  s.psi = wrap_angle(s.psi - vel.spin_rate * dt);
  s.accumulated_geodesic0 += (g0.metric * vel.g_dot0).norm() * dt;
  s.accumulated_geodesic1 += (g1.metric * vel.g_dot1).norm() * dt;
  return s;
}

SurfacePoint project_to_mesh(const ParametricSurface& surface, const Vec2& chart,
                             const ManifoldMesh& mesh, const Pose& pose) {
  const Vec3 p = surface.position(chart.x(), chart.y());
  const Vec3 n = surface.frame(chart.x(), chart.y()).col(2);
  const double lift = 2.0 * mesh.mean_edge_length();
  const Vec3 origin = pose.apply(p + lift * n);
  const auto hit = ray_cast(mesh, pose, origin, -(pose.rotation * n));
  if (hit && hit->t <= 2.0 * lift) return hit->point;
  return closest_point(mesh, pose, pose.apply(p)).point;
}

}  // namespace rollslide
