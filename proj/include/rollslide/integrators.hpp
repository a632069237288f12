#pragma once

#include "rollslide/kinematics.hpp"
#include "rollslide/query.hpp"

namespace rollslide {

/// Paired contact frames, body poses and per-contact path bookkeeping.
struct ContactState {
  ContactFrame frame0;  // on body0, body0 coordinates
  ContactFrame frame1;  // on body1, body1 coordinates
  Pose pose0;           // T_WB0
  Pose pose1;           // T_WB1
  Mat3 shadow_rotation1 = Mat3::Identity();
  double accumulated_geodesic0 = 0.0;  // mm
  double accumulated_geodesic1 = 0.0;  // mm
  double psi = 0.0;                    // spin angle (primitive charts)
  long vertex_hits = 0;                // straightest-rule events so far

  /// Contact frames in the world.
  Pose world_frame0() const { return pose0 * frame0.pose(); }
  Pose world_frame1() const { return pose1 * frame1.pose(); }
  /// T_C0C1.
  Pose relative_pose() const { return world_frame0().inverse() * world_frame1(); }
};

struct StabilizerGains {
  double k_omega = 0.05;
  double k_v = 0.05;
};

/// Rate-form stabilizer: V + [k_omega w; k_v v] where [w; v] is the log of
/// the error between the current and the ideal relative contact pose, with
/// only the normals' anti-alignment counted as rotational error.
Twist stabilize(const ContactState& state, const Twist& V_L0L1, const StabilizerGains& gains);

/// Gains applied per step: dividing by dt makes each step remove the fraction
/// k of the current error.
StabilizerGains per_step_gains(const StabilizerGains& gains, double dt);

struct StepMode {
  enum class Kind { ExactMate, Stabilize };
  Kind kind = Kind::ExactMate;
  StabilizerGains gains;

  static StepMode exact_mate() { return {}; }
  static StepMode stabilized(StabilizerGains g) { return {Kind::Stabilize, g}; }
};

struct SpinSolveOptions {
  double tol = 1e-10;
  int max_iters = 50;
};

/// psi minimizing the rotation angle between R_shadow and
/// left * R_ideal(psi) * right, by Newton iteration on the squared angle with
/// central differences. Throws SpinIkDiverged.
double solve_spin_psi(const Mat3& R_shadow, const Mat3& left, const Mat3& right,
                      double psi_init, const SpinSolveOptions& options = {});

/// Body1 rotation family for the current contact frames:
/// R_WB1(psi) = left * R_ideal(psi) * right.
struct SpinFamily {
  Mat3 left;
  Mat3 right;
  Mat3 at(double psi) const;
};
SpinFamily spin_family(const ContactState& state);

/// Pose of body1 that places its contact frame ideally against body0's for
/// spin psi.
Pose mated_pose1(const ContactState& state, double psi);

/// New frame at `p` whose x axis follows the displacement from the previous
/// frame's origin, falling back to the previous x for sub-1e-9 mm moves.
ContactFrame follow_frame(const ManifoldMesh& mesh, const ContactFrame& previous,
                          const SurfacePoint& p);

struct AdvanceResult {
  ContactVelocities velocities;
  double traced0 = 0.0;
  double traced1 = 0.0;
};

/// Moves both contacts along their meshes for one explicit Euler step of the
/// geodesic-chart kinematics; body poses are left untouched.
AdvanceResult advance_contacts(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                               ContactState& state, const Twist& V_L0L1, double dt);

/// One geodesic-tracing step. ExactMate reconstructs body1 from the traced
/// contacts and the spin resolved against the shadow orientation; Stabilize
/// integrates body1 with the stabilized twist. Body0 moves with V_WB0.
ContactState geodesic_step(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                           const ContactState& state, const Twist& V_L0L1, double dt,
                           const StepMode& mode, const Twist& V_WB0 = Twist::zero());

/// One collision-detection step: stabilize, integrate both bodies with RK4,
/// then re-derive the contacts from the collision query.
ContactState collision_step(const ManifoldMesh& mesh0, const ManifoldMesh& mesh1,
                            const ContactState& state, const Twist& V_L0L1, double dt,
                            const StabilizerGains& gains,
                            const Twist& V_WB0 = Twist::zero(), unsigned seed = 0);

/// One primitive-chart step: explicit Euler on chart coordinates and spin,
/// body1 integrated open loop. Frames must carry chart coordinates.
ContactState primitive_step(const ParametricSurface& surface0,
                            const ParametricSurface& surface1, const ContactState& state,
                            const Twist& V_L0L1, double dt,
                            const Twist& V_WB0 = Twist::zero());

/// Mesh point under a primitive chart point: ray along the inward analytic
/// normal from just outside the surface, else the closest point. `pose`
/// places both the primitive and the mesh.
SurfacePoint project_to_mesh(const ParametricSurface& surface, const Vec2& chart,
                             const ManifoldMesh& mesh, const Pose& pose);

}  // namespace rollslide
