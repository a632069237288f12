#include "rollslide/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rollslide/generators.hpp"
#include "rollslide/io.hpp"

namespace rollslide {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kContactCircleDiameter = 20.0;
constexpr double kSphereDiameter = 10.0;
constexpr double kGraspSpinRate = 0.1;  // rad/s about the object's axis
constexpr double kObjectHeight = 55.0;  // object center above the palm, mm
constexpr double kRestFlexion = 0.25;   // rad
constexpr double kEllipsoidSpacing = 8.0;

// Generic orientation so the sphere mesh's path is not aligned with its
// triangulation.
const Vec3 kSphereMeshRotation(0.3, -0.7, 0.45);

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table,
             const char* what) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& [name, value] : table) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (n == lower) return value;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + s + "'");
}

ojson pose_json(const Pose& p) {
  ojson r = ojson::array();
  for (int i = 0; i < 3; ++i) r.push_back({p.rotation(i, 0), p.rotation(i, 1), p.rotation(i, 2)});
  return {{"rotation", r},
          {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

ojson vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

ojson config_json(const RunConfig& c) {
  const ResolutionTier tier = resolution_tier(c.resolution);
  return {{"scenario", to_string(c.scenario)},
          {"method", to_string(c.method)},
          {"resolution", to_string(c.resolution)},
          {"dt", c.dt},
          {"duration", c.duration},
          {"seed", c.seed},
          {"tube_diameter", c.tube_diameter},
          {"gains", {{"k_omega", c.gains.k_omega}, {"k_v", c.gains.k_v}}},
          {"weights", {{"w_palm", c.weights.w_palm}, {"w_smooth", c.weights.w_smooth}}},
          {"hand", ojson::parse(hand_layout_json(c.hand))},
          {"tier",
           {{"sphere_subdivisions", tier.sphere_subdivisions},
            {"torus_major", tier.torus_major},
            {"torus_minor", tier.torus_minor}}}};
}

double mean_over(const std::vector<MetricsRow>& rows, double t0, double t1,
                 double MetricsRow::*field, bool max_instead = false) {
  double acc = max_instead ? 0.0 : 0.0;
  int n = 0;
  for (const MetricsRow& r : rows) {
    if (r.t < t0 - 1e-9 || r.t >= t1 - 1e-9) continue;
    if (max_instead) {
      acc = std::max(acc, r.*field);
    } else {
      acc += r.*field;
    }
    ++n;
  }
  if (n == 0) return 0.0;
  return max_instead ? acc : acc / n;
}

// ---------------------------------------------------------------- ring runs

struct RingScene {
  bool inside = true;
  RingRolling rolling;
  ManifoldMesh ring;
  ManifoldMesh sphere;
  ParametricSurface torus;
  ParametricSurface ball;
  Vec3 omega_world;
};

RingScene make_ring_scene(const RunConfig& cfg) {
  const ResolutionTier tier = resolution_tier(cfg.resolution);
  const bool inside = cfg.scenario == Scenario::SphereRingInside;
  const double rc = 0.5 * kContactCircleDiameter;
  const double rt = 0.5 * cfg.tube_diameter;
  RingScene s{
      inside,
      ring_rolling(inside, cfg.duration > 0.0 ? cfg.duration : 10.0, rc, 0.5 * kSphereDiameter),
      make_ring(kContactCircleDiameter, cfg.tube_diameter,
                inside ? RingSide::Inner : RingSide::Outer, tier.torus_major, tier.torus_minor),
      transformed(make_icosphere(kSphereDiameter, tier.sphere_subdivisions),
                  Pose{exp_so3(kSphereMeshRotation), Vec3::Zero()}),
      ParametricSurface::torus(inside ? rc + rt : rc - rt, rt),
      ParametricSurface::sphere(0.5 * kSphereDiameter),
      Vec3::Zero()};
  s.omega_world = Vec3(0.0, 0.0, s.rolling.omega_z);
  return s;
}

// Analytic placement: contact at (rc, 0, 0), sphere on the ring's side.
Pose analytic_sphere_pose(const RingScene& s) {
  return {Mat3::Identity(), Vec3(s.rolling.center_radius, 0.0, 0.0)};
}

ContactState initial_ring_state(const RingScene& s, Method method) {
  ContactState st;
  st.pose0 = Pose::identity();
  st.pose1 = analytic_sphere_pose(s);
  const Vec3 contact(s.rolling.contact_radius, 0.0, 0.0);
  if (method == Method::Primitive) {
    st.frame0 = chart_contact_frame(s.torus, 0.0, s.inside ? M_PI : 0.0);
    st.frame1 = chart_contact_frame(s.ball, s.inside ? 0.0 : M_PI, 0.0);
    st.psi = spin_angle(st.relative_pose().rotation);
    st.shadow_rotation1 = st.pose1.rotation;
    return st;
  }
  const Vec3 tangent = Vec3::UnitY();
  st.frame0 = mesh_contact_frame(s.ring, closest_point(s.ring, st.pose0, contact).point, tangent);
  st.frame1 =
      mesh_contact_frame(s.sphere, closest_point(s.sphere, st.pose1, contact).point, tangent);
  const SpinFamily fam = spin_family(st);
  const double psi = solve_spin_psi(st.pose1.rotation, fam.left, fam.right,
                                    spin_angle(st.relative_pose().rotation));
  st.psi = psi;
  st.pose1 = mated_pose1(st, psi);
  st.shadow_rotation1 = st.pose1.rotation;
  return st;
}

struct ContactPoints {
  Vec3 p0, p1, z0, z1;
};

ContactPoints ring_contact_points(const RingScene& s, const ContactState& st, Method method) {
  if (method != Method::Primitive) {
    const Pose w0 = st.world_frame0();
    const Pose w1 = st.world_frame1();
    return {w0.translation, w1.translation, w0.rotation.col(2), w1.rotation.col(2)};
  }
  const SurfacePoint q0 = project_to_mesh(s.torus, *st.frame0.chart, s.ring, st.pose0);
  const SurfacePoint q1 = project_to_mesh(s.ball, *st.frame1.chart, s.sphere, st.pose1);
  return {st.pose0.apply(s.ring.position(q0)), st.pose1.apply(s.sphere.position(q1)),
          st.pose0.rotation * interpolated_normal(s.ring, q0),
          st.pose1.rotation * interpolated_normal(s.sphere, q1)};
}

RunResult run_ring(const RunConfig& cfg) {
  const RingScene scene = make_ring_scene(cfg);
  const long n = cfg.steps();
  ContactState st = initial_ring_state(scene, cfg.method);

  std::vector<MetricsRow> rows;
  rows.reserve(n + 1);
  ojson steps = ojson::array();

  auto record = [&](double t, double sliding) {
    const ContactPoints cp = ring_contact_points(scene, st, cfg.method);
    const CollisionReport rep = collide(scene.ring, st.pose0, scene.sphere, st.pose1, cfg.seed);
    MetricsRow r;
    r.t = t;
    r.separation = metric_separation(rep);
    r.alignment = metric_alignment(cp.z0, cp.z1);
    r.slippage = metric_slippage(st);
    r.sliding = sliding;
    r.total_geodesic = 0.5 * (st.accumulated_geodesic0 + st.accumulated_geodesic1);
    r.centroid = 0.5 * (cp.p0 + cp.p1);
    rows.push_back(r);
    return ojson{{"t", t},
                 {"pose0", pose_json(st.pose0)},
                 {"pose1", pose_json(st.pose1)},
                 {"contact0", vec_json(cp.p0)},
                 {"contact1", vec_json(cp.p1)}};
  };

  const ojson initial = record(0.0, 0.0);
  for (long k = 1; k <= n; ++k) {
    try {
      const Twist V{st.world_frame1().rotation.transpose() * scene.omega_world, Vec3::Zero()};
      double sliding = metric_sliding(V);
      switch (cfg.method) {
        case Method::Geodesic:
          st = geodesic_step(scene.ring, scene.sphere, st, V, cfg.dt, StepMode::exact_mate());
          break;
        case Method::Collision:
          sliding = metric_sliding(stabilize(st, V, per_step_gains(cfg.gains, cfg.dt)));
          st = collision_step(scene.ring, scene.sphere, st, V, cfg.dt, cfg.gains, Twist::zero(),
                              cfg.seed);
          break;
        case Method::Primitive:
          st = primitive_step(scene.torus, scene.ball, st, V, cfg.dt);
          break;
      }
      steps.push_back(record(static_cast<double>(k) * cfg.dt, sliding));
    } catch (const Error& e) {
      throw IntegrationFailure(k, e);
    }
  }

  RunResult result;
  result.config = cfg;
  result.vertex_hits = st.vertex_hits;
  const double truth = 2.0 * M_PI * scene.rolling.contact_radius;
  const RingSummary sum = summarize_ring(rows, truth);

  ojson traj{{"scenario", to_string(cfg.scenario)},
             {"method", to_string(cfg.method)},
             {"initial", initial},
             {"steps", steps}};
  result.trajectory_json = traj.dump(1) + "\n";

  ojson summary{{"config", config_json(cfg)},
                {"steps", sum.steps},
                {"final_total_geodesic", sum.final_total_geodesic},
                {"ground_truth", sum.ground_truth},
                {"relative_error", sum.relative_error},
                {"max_abs_separation", sum.max_abs_separation},
                {"mean_alignment_error", sum.mean_alignment_error},
                {"min_alignment", sum.min_alignment},
                {"max_abs_slippage", sum.max_abs_slippage},
                {"final_slippage", sum.final_slippage},
                {"max_sliding", sum.max_sliding},
                {"centroid_radial_drift", sum.centroid_radial_drift},
                {"diagnostics",
                 {{"vertex_hits", st.vertex_hits},
                  {"ring_vertices", scene.ring.num_vertices()},
                  {"sphere_vertices", scene.sphere.num_vertices()},
                  {"omega_z", scene.rolling.omega_z}}}};
  result.summary_json = summary.dump(2) + "\n";
  result.metrics.push_back(std::move(rows));
  return result;
}

// --------------------------------------------------------------- grasp runs

struct GraspScene {
  HandModel hand;
  ManifoldMesh object;
  Pose object_pose;
  HandConfig config;
  std::vector<int> fingers;
  std::vector<ContactState> contacts;
};

ManifoldMesh grasp_object(const RunConfig& cfg) {
  const ResolutionTier tier = resolution_tier(cfg.resolution);
  if (cfg.scenario == Scenario::GraspCylinder) {
    return make_cylinder(20.0, 110.0, tier.torus_major, tier.torus_major / 4);
  }
  return make_ellipsoid(10.0, 10.0, 15.0, tier.sphere_subdivisions);
}

double finger_separation(const GraspScene& g, int finger, unsigned seed) {
  const HandPoses fk = forward_kinematics(g.hand, g.config);
  return metric_separation(
      collide(g.object, g.object_pose, *g.hand.distal_mesh, fk.fingers[finger].distal, seed));
}

ContactState grasp_contact(const GraspScene& g, int finger, unsigned seed) {
  const HandPoses fk = forward_kinematics(g.hand, g.config);
  const Pose& distal = fk.fingers[finger].distal;
  const ManifoldMesh& capsule = *g.hand.distal_mesh;
  const CollisionReport rep = collide(g.object, g.object_pose, capsule, distal, seed);
  SurfacePoint p0 = rep.witness_a;
  SurfacePoint p1 = rep.witness_b;
  if (rep.status == ContactStatus::Penetrating) {
    const Vec3 c = weighted_penetration_centroid(rep);
    p0 = closest_point(g.object, g.object_pose, c).point;
    p1 = closest_point(capsule, distal, c).point;
  }
  const Vec3 palm_x = g.config.palm.rotation.col(0);
  ContactState st;
  st.pose0 = g.object_pose;
  st.pose1 = distal;
  st.frame0 = mesh_contact_frame(g.object, p0, g.object_pose.rotation.transpose() * palm_x);
  st.frame1 = mesh_contact_frame(capsule, p1, distal.rotation.transpose() * palm_x);
  st.shadow_rotation1 = distal.rotation;
  return st;
}

GraspScene make_grasp_scene(const RunConfig& cfg) {
  HandLayout layout = cfg.hand;
  if (cfg.scenario == Scenario::GraspEllipsoid) {
    layout.finger_spacing = std::min(layout.finger_spacing, kEllipsoidSpacing);
  }
  GraspScene g{make_hand(layout), grasp_object(cfg), Pose{}, HandConfig{}, {}, {}};
  // Object axis (body z) along the palm x axis.
  g.object_pose = {exp_so3(Vec3(0.0, M_PI / 2, 0.0)), Vec3(0.0, 0.0, kObjectHeight)};
  for (int k = 0; k < kNumFingers; ++k) {
    joint(g.config, k, 0) = kRestFlexion;
    // Close the IP joint until the distal capsule touches the object.
    double lo = -1.0;
    joint(g.config, k, 2) = lo;
    if (finger_separation(g, k, cfg.seed) <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "finger " + std::to_string(k) +
                                                  " starts inside the object");
    }
    double hi = lo;
    bool bracketed = false;
    for (double q = lo + 0.05; q <= 2.0; q += 0.05) {
      joint(g.config, k, 2) = q;
      if (finger_separation(g, k, cfg.seed) <= 0.0) {
        hi = q;
        bracketed = true;
        break;
      }
      lo = q;
    }
    if (!bracketed) {
      throw Error(ErrorCode::InvalidArgument,
                  "finger " + std::to_string(k) + " cannot reach the object");
    }
    for (int it = 0; it < 50 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      joint(g.config, k, 2) = mid;
      (finger_separation(g, k, cfg.seed) > 0.0 ? lo : hi) = mid;
    }
    joint(g.config, k, 2) = lo;
    g.fingers.push_back(k);
  }
  for (int k : g.fingers) g.contacts.push_back(grasp_contact(g, k, cfg.seed));
  return g;
}

RunResult run_grasp(const RunConfig& cfg) {
  if (cfg.method != Method::Geodesic) {
    throw Error(ErrorCode::InvalidArgument, "grasp scenarios use the geodesic method");
  }
  GraspScene g = make_grasp_scene(cfg);
  const ManifoldMesh& capsule = *g.hand.distal_mesh;
  const long n = cfg.steps();
  const double reversal = 0.5 * cfg.duration;
  const int nc = static_cast<int>(g.contacts.size());
  std::vector<std::vector<MetricsRow>> rows(nc);
  std::vector<double> sliding(nc, 0.0);
  ojson steps = ojson::array();
  long vertex_hits = 0;

  auto record = [&](double t) {
    ojson contacts = ojson::array();
    for (int i = 0; i < nc; ++i) {
      const ContactState& st = g.contacts[i];
      const CollisionReport rep = collide(g.object, st.pose0, capsule, st.pose1, cfg.seed);
      const Pose w0 = st.world_frame0();
      const Pose w1 = st.world_frame1();
      MetricsRow r;
      r.t = t;
      r.separation = metric_separation(rep);
      r.alignment = metric_alignment(st);
      r.slippage = metric_slippage(st);
      r.sliding = sliding[i];
      r.total_geodesic = 0.5 * (st.accumulated_geodesic0 + st.accumulated_geodesic1);
      r.centroid = 0.5 * (w0.translation + w1.translation);
      rows[i].push_back(r);
      contacts.push_back({{"contact0", vec_json(w0.translation)},
                          {"contact1", vec_json(w1.translation)}});
    }
    ojson joints = ojson::array();
    for (int j = 0; j < g.config.joints.size(); ++j) joints.push_back(g.config.joints[j]);
    return ojson{{"t", t},
                 {"object", pose_json(g.object_pose)},
                 {"palm", pose_json(g.config.palm)},
                 {"joints", joints},
                 {"contacts", contacts}};
  };

  const ojson initial = record(0.0);
  HandVector u_prev = HandVector::Zero();
  for (long k = 1; k <= n; ++k) {
    try {
      const double t = static_cast<double>(k - 1) * cfg.dt;
      const double rate = t < reversal - 1e-9 ? kGraspSpinRate : -kGraspSpinRate;
      const Twist V_O{Vec3(0.0, 0.0, rate), Vec3::Zero()};
      const StabilizerGains gains = per_step_gains(cfg.gains, cfg.dt);
      std::vector<Twist> targets;
      for (const ContactState& st : g.contacts) {
        targets.push_back(stabilize(st, Twist::zero(), gains));
      }
      const ContactJacobians J =
          contact_jacobians(g.hand, g.config, g.object_pose, g.contacts, g.fingers);
      PlanInput in;
      in.J_H = J.J_H;
      in.J_O = J.J_O;
      in.object_twist = V_O.vector();
      in.targets = targets;
      in.u_dot_prev = u_prev;
      in.weights = cfg.weights;
      const PlanResult plan = plan_step(in);
      const Eigen::VectorXd realized = J.J_H * plan.u_dot + J.J_O * V_O.vector();

      for (int i = 0; i < nc; ++i) {
        const Twist V = Twist::from_vector(realized.segment<6>(6 * i));
        sliding[i] = metric_sliding(V);
        advance_contacts(g.object, capsule, g.contacts[i], V, cfg.dt);
      }
      g.config = integrate(g.config, plan.u_dot, cfg.dt);
      g.object_pose = g.object_pose * exp_map(V_O, cfg.dt);
      const HandPoses fk = forward_kinematics(g.hand, g.config);
      for (int i = 0; i < nc; ++i) {
        g.contacts[i].pose0 = g.object_pose;
        g.contacts[i].pose1 = fk.fingers[g.fingers[i]].distal;
        g.contacts[i].shadow_rotation1 = g.contacts[i].pose1.rotation;
      }
      u_prev = plan.u_dot;
      steps.push_back(record(static_cast<double>(k) * cfg.dt));
    } catch (const Error& e) {
      throw IntegrationFailure(k, e);
    }
  }
  for (const ContactState& st : g.contacts) vertex_hits += st.vertex_hits;

  RunResult result;
  result.config = cfg;
  result.vertex_hits = vertex_hits;
  ojson traj{{"scenario", to_string(cfg.scenario)},
             {"method", to_string(cfg.method)},
             {"initial", initial},
             {"steps", steps}};
  result.trajectory_json = traj.dump(1) + "\n";

  ojson per_contact = ojson::array();
  double worst_sep = 0.0;
  for (int i = 0; i < nc; ++i) {
    const ContactSummary cs = summarize_contact(rows[i], reversal, cfg.duration);
    worst_sep = std::max(worst_sep, cs.max_abs_separation);
    per_contact.push_back({{"finger", g.fingers[i]},
                           {"max_abs_separation", cs.max_abs_separation},
                           {"pre_reversal_sliding_mean", cs.pre_reversal_sliding_mean},
                           {"reversal_sliding_peak", cs.reversal_sliding_peak},
                           {"final_sliding_mean", cs.final_sliding_mean},
                           {"max_sliding", cs.max_sliding},
                           {"final_total_geodesic", cs.final_total_geodesic},
                           {"max_abs_slippage", cs.max_abs_slippage}});
  }
  ojson summary{{"config", config_json(cfg)},
                {"steps", n},
                {"reversal_time", reversal},
                {"max_abs_separation", worst_sep},
                {"contacts", per_contact},
                {"diagnostics", {{"vertex_hits", vertex_hits}}}};
  result.summary_json = summary.dump(2) + "\n";
  result.metrics = std::move(rows);
  return result;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SphereRingInside: return "SphereRingInside";
    case Scenario::SphereRingOutside: return "SphereRingOutside";
    case Scenario::GraspCylinder: return "GraspCylinder";
    case Scenario::GraspEllipsoid: return "GraspEllipsoid";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Geodesic: return "Geodesic";
    case Method::Collision: return "Collision";
    case Method::Primitive: return "Primitive";
  }
  return "?";
}

std::string to_string(Resolution r) {
  switch (r) {
    case Resolution::Fine: return "Fine";
    case Resolution::Medium: return "Medium";
    case Resolution::Coarse: return "Coarse";
  }
  return "?";
}

Scenario parse_scenario(const std::string& s) {
  return parse_enum<Scenario>(s,
                              {{"SphereRingInside", Scenario::SphereRingInside},
                               {"SphereRingOutside", Scenario::SphereRingOutside},
                               {"GraspCylinder", Scenario::GraspCylinder},
                               {"GraspEllipsoid", Scenario::GraspEllipsoid}},
                              "scenario");
}

Method parse_method(const std::string& s) {
  return parse_enum<Method>(s,
                            {{"Geodesic", Method::Geodesic},
                             {"Collision", Method::Collision},
                             {"Primitive", Method::Primitive}},
                            "method");
}

Resolution parse_resolution(const std::string& s) {
  return parse_enum<Resolution>(s,
                                {{"Fine", Resolution::Fine},
                                 {"Medium", Resolution::Medium},
                                 {"Coarse", Resolution::Coarse}},
                                "resolution");
}

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) bad("duration must be >= 0");
  if (duration / dt > 1e8) bad("too many steps");
  if (!(gains.k_omega >= 0.0) || !(gains.k_v >= 0.0)) bad("gains must be >= 0");
  if (!(weights.w_palm >= 0.0) || !(weights.w_smooth >= 0.0)) bad("weights must be >= 0");
  if (!(tube_diameter > 0.0) || tube_diameter >= kContactCircleDiameter) {
    bad("tube diameter must be in (0, 20) mm");
  }
  make_hand(hand);
}

long RunConfig::steps() const {
  return static_cast<long>(std::floor(duration / dt + 1e-9));
}

ResolutionTier resolution_tier(Resolution r) {
  switch (r) {
    case Resolution::Fine: return {4, 96, 48};
    case Resolution::Medium: return {3, 48, 24};
    case Resolution::Coarse: return {2, 24, 12};
  }
  return {4, 96, 48};
}

RingRolling ring_rolling(bool inside, double period, double contact_radius,
                         double sphere_radius) {
  if (!(period > 0.0) || !(contact_radius > 0.0) || !(sphere_radius > 0.0) ||
      (inside && sphere_radius >= contact_radius)) {
    throw Error(ErrorCode::InvalidArgument, "invalid ring rolling parameters");
  }
  RingRolling r;
  r.contact_radius = contact_radius;
  r.sphere_radius = sphere_radius;
  const double orbit = 2.0 * M_PI / period;  // contact's angular rate about the ring axis
  r.contact_speed = orbit * contact_radius;
  // Rolling without slip about the contact: the center moves at
  // orbit * center_radius and sits sphere_radius from the contact point.
  r.center_radius = inside ? contact_radius - sphere_radius : contact_radius + sphere_radius;
  r.omega_z = (inside ? -1.0 : 1.0) * orbit * r.center_radius / sphere_radius;
  return r;
}

RingSummary summarize_ring(const std::vector<MetricsRow>& rows, double ground_truth) {
  RingSummary s;
  s.ground_truth = ground_truth;
  if (rows.empty()) return s;
  s.steps = static_cast<long>(rows.size()) - 1;
  s.final_total_geodesic = rows.back().total_geodesic;
  s.relative_error = std::abs(s.final_total_geodesic - ground_truth) / ground_truth;
  s.final_slippage = rows.back().slippage;
  const double r0 = rows.front().centroid.head<2>().norm();
  double align_err = 0.0;
  for (const MetricsRow& r : rows) {
    s.max_abs_separation = std::max(s.max_abs_separation, std::abs(r.separation));
    align_err += 180.0 - r.alignment;
    s.min_alignment = std::min(s.min_alignment, r.alignment);
    s.max_abs_slippage = std::max(s.max_abs_slippage, std::abs(r.slippage));
    s.max_sliding = std::max(s.max_sliding, r.sliding);
    s.centroid_radial_drift =
        std::max(s.centroid_radial_drift, std::abs(r.centroid.head<2>().norm() - r0));
  }
  s.mean_alignment_error = align_err / static_cast<double>(rows.size());
  return s;
}

ContactSummary summarize_contact(const std::vector<MetricsRow>& rows, double reversal_time,
                                 double duration) {
  ContactSummary s;
  if (rows.empty()) return s;
  for (const MetricsRow& r : rows) {
    s.max_abs_separation = std::max(s.max_abs_separation, std::abs(r.separation));
    s.max_sliding = std::max(s.max_sliding, r.sliding);
    s.max_abs_slippage = std::max(s.max_abs_slippage, std::abs(r.slippage));
  }
  s.final_total_geodesic = rows.back().total_geodesic;
  // Rows at t hold the sliding of the step that ended at t.
  s.pre_reversal_sliding_mean =
      mean_over(rows, reversal_time - 1.0 + 1e-9, reversal_time + 1e-9, &MetricsRow::sliding);
  s.reversal_sliding_peak = mean_over(rows, reversal_time + 1e-9, reversal_time + 0.5 + 1e-9,
                                      &MetricsRow::sliding, true);
  s.final_sliding_mean =
      mean_over(rows, duration - 1.0 + 1e-9, duration + 1e-9, &MetricsRow::sliding);
  return s;
}

IntegrationFailure::IntegrationFailure(long step, const Error& cause)
    : Error(cause.code(), "step " + std::to_string(step) + ": " + cause.what()), step_(step) {}

RunResult run(const RunConfig& config) {
  config.validate();
  switch (config.scenario) {
    case Scenario::SphereRingInside:
    case Scenario::SphereRingOutside:
      return run_ring(config);
    case Scenario::GraspCylinder:
    case Scenario::GraspEllipsoid:
      return run_grasp(config);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario");
}

void write_run(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  if (result.metrics.size() == 1) {
    write_text_file(dir / "metrics.csv", metrics_csv(result.metrics.front()));
  } else {
    for (std::size_t i = 0; i < result.metrics.size(); ++i) {
      write_text_file(dir / ("metrics_c" + std::to_string(i + 1) + ".csv"),
                      metrics_csv(result.metrics[i]));
    }
  }
  write_text_file(dir / "trajectory.json", result.trajectory_json);
  write_text_file(dir / "summary.json", result.summary_json);
}

std::vector<RunResult> run_many(const std::vector<RunConfig>& configs, int jobs) {
  for (const RunConfig& c : configs) c.validate();
  jobs = std::max(1, jobs);
  std::vector<RunResult> results(configs.size());
  std::size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::future<RunResult>> batch;
    const std::size_t start = next;
    for (int j = 0; j < jobs && next < configs.size(); ++j, ++next) {
      batch.push_back(std::async(std::launch::async, [&configs, next] { return run(configs[next]); }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }
  return results;
}

std::string run_name(const RunConfig& config) {
  return to_string(config.scenario) + "_" + to_string(config.method) + "_" +
         to_string(config.resolution);
}

std::string compare_table(const std::vector<std::filesystem::path>& run_dirs) {
  const char* keys[] = {"final_total_geodesic", "relative_error", "max_abs_separation",
                        "mean_alignment_error", "max_abs_slippage", "max_sliding"};
  std::ostringstream out;
  char buf[64];
  out << "run";
  for (const char* k : keys) out << '\t' << k;
  out << '\n';
  for (const auto& dir : run_dirs) {
    ojson s;
    try {
      s = ojson::parse(read_text_file(dir / "summary.json"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, (dir / "summary.json").string() + ": " + e.what());
    }
    out << dir.filename().string();
    for (const char* k : keys) {
      if (s.contains(k) && s[k].is_number()) {
        std::snprintf(buf, sizeof buf, "%.6g", s[k].get<double>());
        out << '\t' << buf;
      } else {
        out << "\t-";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rollslide
