// One PASS/FAIL line per acceptance criterion. Exit status is 0 unless
// --strict is given and a criterion fails.

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "rollslide/experiment.hpp"
#include "rollslide/generators.hpp"
#include "rollslide/integrators.hpp"
#include "rollslide/kinematics.hpp"
#include "rollslide/planner.hpp"
#include "rollslide/query.hpp"

using namespace rollslide;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Timed {
  RunResult result;
  RingSummary summary;
  double seconds;
};

Timed ring_run(Scenario s, Method m, Resolution r) {
  RunConfig c;
  c.scenario = s;
  c.method = m;
  c.resolution = r;
  const auto t0 = Clock::now();
  Timed t{run(c), {}, 0.0};
  t.seconds = seconds_since(t0);
  t.summary = summarize_ring(t.result.metrics.front(), 20.0 * M_PI);
  return t;
}

const char* side(Scenario s) { return s == Scenario::SphereRingInside ? "inside" : "outside"; }

// ---------------------------------------------------------------- oracles

Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, M_PI - 1e-3);
  Pose p;
  p.rotation = exp_so3(angle(rng) * Vec3(n(rng), n(rng), n(rng)).normalized());
  p.translation = 10.0 * Vec3(n(rng), n(rng), n(rng));
  return p;
}

HandConfig random_config(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  HandConfig c;
  c.palm.rotation = exp_so3(0.5 * Vec3(n(rng), n(rng), n(rng)));
  c.palm.translation = 10.0 * Vec3(n(rng), n(rng), n(rng));
  for (int i = 0; i < c.joints.size(); ++i) c.joints[i] = 0.4 * n(rng);
  return c;
}

Twist fd_distal_twist(const HandModel& hand, const HandConfig& c, int finger, int col) {
  const double d = 1e-6;
  HandVector e = HandVector::Zero();
  e[col] = 1.0;
  const Pose T = forward_kinematics(hand, c).fingers[finger].distal;
  const Pose Tp = forward_kinematics(hand, integrate(c, e, d)).fingers[finger].distal;
  const Pose Tm = forward_kinematics(hand, integrate(c, e, -d)).fingers[finger].distal;
  return (log_map(T.inverse() * Tp) - log_map(T.inverse() * Tm)) * (1.0 / (2.0 * d));
}

std::vector<ContactState> make_contacts(const HandModel& hand, const HandConfig& c,
                                        const Pose& object, std::mt19937_64& rng, int count) {
  std::normal_distribution<double> n(0.0, 1.0);
  const HandPoses poses = forward_kinematics(hand, c);
  std::vector<ContactState> out;
  for (int k = 0; k < count; ++k) {
    ContactState s;
    s.pose0 = object;
    s.pose1 = poses.fingers[k].distal;
    s.frame1.rotation = exp_so3(Vec3(n(rng), n(rng), n(rng)));
    s.frame1.position = 5.0 * Vec3(n(rng), n(rng), n(rng));
    out.push_back(s);
  }
  return out;
}

// Least-squares form of the planner's program: min |L u - y|^2 s.t. A u = b.
void oracle_kkt(const PlanInput& in, Eigen::MatrixXd& K, Eigen::VectorXd& rhs) {
  const int c = static_cast<int>(in.J_H.rows() / 6);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(3 * c + 6 + kHandDof, kHandDof);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(L.rows());
  const Eigen::VectorXd drift = in.J_O * in.object_twist;
  int r = 0;
  for (int i = 0; i < c; ++i) {
    for (int row : {2, 3, 4}) {
      L.row(r) = in.J_H.row(6 * i + row);
      y[r++] = -drift[6 * i + row];
    }
  }
  for (int k = 0; k < 6; ++k) L(r++, k) = std::sqrt(in.weights.w_palm);
  for (int k = 0; k < kHandDof; ++k) {
    L(r, k) = std::sqrt(in.weights.w_smooth);
    y[r++] = std::sqrt(in.weights.w_smooth) * in.u_dot_prev[k];
  }
  Eigen::MatrixXd A(c, kHandDof);
  Eigen::VectorXd b(c);
  for (int i = 0; i < c; ++i) {
    A.row(i) = in.J_H.row(6 * i + 5);
    b[i] = -drift[6 * i + 5];
  }
  K = Eigen::MatrixXd::Zero(kHandDof + c, kHandDof + c);
  K.topLeftCorner(kHandDof, kHandDof) = L.transpose() * L;
  K.topRightCorner(kHandDof, c) = A.transpose();
  K.bottomLeftCorner(c, kHandDof) = A;
  rhs.resize(kHandDof + c);
  rhs << L.transpose() * y, b;
}

void criterion6() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);

  double roundtrip = 0.0, composition = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(rng);
    roundtrip = std::max(roundtrip, max_abs(p.matrix() - exp_map(log_map(p)).matrix()));
    const Pose q = random_pose(rng);
    composition =
        std::max(composition, max_abs(adjoint(p * q) - adjoint(p) * adjoint(q)) /
                                  std::max(1.0, max_abs(adjoint(p * q))));
  }

  const HandModel hand = make_hand();
  double jac = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const HandConfig c = random_config(rng);
    for (int k = 0; k < kNumFingers; ++k) {
      const auto J = distal_body_jacobian(hand, c, k);
      for (int col = 0; col < kHandDof; ++col) {
        jac = std::max(jac, max_abs(J.col(col) - fd_distal_twist(hand, c, k, col).vector()));
      }
    }
  }

  double kkt = 0.0, agree = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const HandConfig c = random_config(rng);
    const Pose object{exp_so3(0.3 * Vec3(n(rng), n(rng), n(rng))), Vec3(0, 0, 50)};
    const auto contacts = make_contacts(hand, c, object, rng, 3);
    const ContactJacobians J = contact_jacobians(hand, c, object, contacts, {0, 1, 2});
    PlanInput in;
    in.J_H = J.J_H;
    in.J_O = J.J_O;
    in.object_twist << 0.1 * n(rng), 0.1 * n(rng), 0.1 * n(rng), n(rng), n(rng), n(rng);
    for (int k = 0; k < kHandDof; ++k) in.u_dot_prev[k] = 0.01 * n(rng);
    const PlanResult r = plan_step(in);
    kkt = std::max({kkt, r.stationarity_residual, r.feasibility_residual});
    Eigen::MatrixXd K;
    Eigen::VectorXd rhs;
    oracle_kkt(in, K, rhs);
    const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().pseudoInverse() * rhs;
    agree = std::max(agree, max_abs(sol.head(kHandDof) - r.u_dot));
  }

  const double secs = seconds_since(t0);
  const bool ok = roundtrip <= 1e-9 && composition <= 1e-9 && jac <= 1e-5 && kkt <= 1e-9 &&
                  agree <= 1e-8 && secs < 10.0;
  report(6, ok,
         fmt("exp/log %.1e, adjoint %.1e, jacobian fd %.1e, kkt %.1e, pinv %.1e, %.2f s",
             roundtrip, composition, jac, kkt, agree, secs));
}

// ------------------------------------------------------------- curvature

void criterion5() {
  // Worst case bounds the fine tier; the mean is the convergence measure.
  std::vector<double> worst, mean;
  for (int sub : {2, 3, 4}) {
    const ManifoldMesh m = make_icosphere(10.0, sub);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    double w = 0.0, sum = 0.0;
    const int samples = 50;
    for (int i = 0; i < samples; ++i) {
      const SurfacePoint p =
          closest_point(m, Pose::identity(), 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized())
              .point;
      const ContactFrame f = mesh_contact_frame(m, p, Vec3(n(rng), n(rng), n(rng)));
      const Mat2 K = estimate_curvature(m, f, default_curvature_step(m));
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Mat2>(K).eigenvalues();
      const double e = std::max(std::abs(ev[0] - 0.2), std::abs(ev[1] - 0.2)) / 0.2;
      w = std::max(w, e);
      sum += e;
    }
    worst.push_back(w);
    mean.push_back(sum / samples);
  }
  const bool ok = worst[2] <= 0.05 && mean[2] < mean[1] && mean[1] < mean[0];
  report(5, ok,
         fmt("fine worst %.2f%%; mean error coarse %.2f%%, medium %.2f%%, fine %.2f%%",
             100 * worst[2], 100 * mean[0], 100 * mean[1], 100 * mean[2]));
}

// ------------------------------------------------------------- stabilizer

void criterion7() {
  const ManifoldMesh plane = make_box(Vec3(60, 60, 2), 4);
  const ManifoldMesh sphere = make_icosphere(10.0, 4);
  ContactState st;
  const Vec3 n = sphere.vertex(0).normalized();
  const Mat3 down = exp_so3(axis_angle_anti_align(Vec3::UnitZ(), n));
  st.pose1.rotation = exp_so3(Vec3(0, 5.0 * M_PI / 180.0, 0)) * down;
  st.pose1.translation = Vec3(0, 0, 1.5) - st.pose1.rotation * sphere.vertex(0);
  st.frame1 = mesh_contact_frame(sphere, sphere.vertex_point(0), down.transpose() * Vec3::UnitX());
  st.frame0 = mesh_contact_frame(
      plane, closest_point(plane, st.pose0, st.world_frame1().translation).point, Vec3::UnitX());

  auto gap = [](const ContactState& s) {
    return (s.world_frame1().translation - s.world_frame0().translation).norm();
  };
  auto mis = [](const ContactState& s) {
    const Vec3 z0 = s.world_frame0().rotation.col(2);
    const Vec3 z1 = s.world_frame1().rotation.col(2);
    return std::atan2(z0.cross(-z1).norm(), z0.dot(-z1));
  };
  const double g0 = gap(st), m0 = mis(st);
  for (int i = 0; i < 200; ++i) {
    st = collision_step(plane, sphere, st, Twist::zero(), 0.01, StabilizerGains{});
  }
  const double gr = gap(st) / g0, mr = mis(st) / m0;
  report(7, gr < 0.01 && mr < 0.01,
         fmt("after 200 steps: gap %.2e of initial, misalignment %.2e of initial", gr, mr));
}

// ------------------------------------------------------------------ grasp

void criterion8() {
  RunConfig c;
  c.scenario = Scenario::GraspCylinder;
  const auto t0 = Clock::now();
  const RunResult r = run(c);
  const double secs = seconds_since(t0);
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < r.metrics.size(); ++i) {
    const ContactSummary s = summarize_contact(r.metrics[i], 0.5 * c.duration, c.duration);
    ok = ok && s.pre_reversal_sliding_mean < 1.0 && s.final_sliding_mean < 1.0 &&
         s.max_abs_separation < 0.5 && s.reversal_sliding_peak > s.pre_reversal_sliding_mean;
    detail += fmt("c%zu sliding pre %.3f, reversal peak %.3f, final %.3f mm/s, sep %.4f mm; ",
                  i + 1, s.pre_reversal_sliding_mean, s.reversal_sliding_peak,
                  s.final_sliding_mean, s.max_abs_separation);
  }
  ok = ok && r.metrics.size() == 4;
  report(8, ok, detail + fmt("%.1f s", secs));
}

// ------------------------------------------------------------ determinism

void criterion9() {
  bool ok = true;
  for (Scenario s : {Scenario::SphereRingInside, Scenario::GraspEllipsoid}) {
    for (Method m : {Method::Geodesic, Method::Collision, Method::Primitive}) {
      if (s == Scenario::GraspEllipsoid && m != Method::Geodesic) continue;
      RunConfig c;
      c.scenario = s;
      c.method = m;
      c.resolution = Resolution::Medium;
      c.duration = 1.0;
      c.seed = 11;
      const RunResult a = run(c);
      const RunResult b = run(c);
      ok = ok && a.summary_json == b.summary_json && a.trajectory_json == b.trajectory_json;
      for (size_t i = 0; i < a.metrics.size(); ++i) {
        ok = ok && metrics_csv(a.metrics[i]) == metrics_csv(b.metrics[i]);
      }
    }
  }
  report(9, ok, "repeated runs compared byte for byte (ring x 3 methods, ellipsoid grasp)");
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::strcmp(argv[i], "--strict") == 0;

  const Scenario sides[] = {Scenario::SphereRingInside, Scenario::SphereRingOutside};

  // 1 and 4: geodesic fine and medium.
  std::vector<Timed> geo_fine;
  {
    bool ok = true;
    std::string detail;
    for (Scenario s : sides) {
      for (Resolution res : {Resolution::Fine, Resolution::Medium}) {
        Timed t = ring_run(s, Method::Geodesic, res);
        ok = ok && t.summary.relative_error <= 0.02 && t.seconds < 60.0;
        detail += fmt("%s/%s %.3f mm (%.2f%%, %.1f s); ", side(s), to_string(res).c_str(),
                      t.summary.final_total_geodesic, 100 * t.summary.relative_error, t.seconds);
        if (res == Resolution::Fine) geo_fine.push_back(std::move(t));
      }
    }
    report(1, ok, detail);
  }

  // 2: coarse ordering.
  {
    bool ok = true;
    std::string detail;
    for (Scenario s : sides) {
      const Timed g = ring_run(s, Method::Geodesic, Resolution::Coarse);
      const Timed c = ring_run(s, Method::Collision, Resolution::Coarse);
      const double eg = std::abs(g.summary.final_total_geodesic - 20.0 * M_PI);
      const double ec = std::abs(c.summary.final_total_geodesic - 20.0 * M_PI);
      ok = ok && ec > eg && g.summary.relative_error <= 0.10;
      detail += fmt("%s: collision err %.3f mm, geodesic err %.3f mm (%.2f%%); ", side(s), ec, eg,
                    100 * g.summary.relative_error);
    }
    report(2, ok, detail);
  }

  // 3: primitive separation vs geodesic, fine.
  {
    bool ok = true;
    std::string detail;
    for (size_t i = 0; i < 2; ++i) {
      const Timed p = ring_run(sides[i], Method::Primitive, Resolution::Fine);
      const double ratio =
          p.summary.max_abs_separation / std::max(geo_fine[i].summary.max_abs_separation, 1e-300);
      ok = ok && ratio > 10.0;
      detail += fmt("%s: primitive %.4f mm vs geodesic %.4f mm (%.1fx); ", side(sides[i]),
                    p.summary.max_abs_separation, geo_fine[i].summary.max_abs_separation, ratio);
    }
    report(3, ok, detail);
  }

  // 4: ideal contact on the fine geodesic runs.
  {
    bool ok = true;
    std::string detail;
    for (size_t i = 0; i < 2; ++i) {
      const RingSummary& s = geo_fine[i].summary;
      ok = ok && s.max_abs_separation < 0.05 && s.min_alignment > 179.0 &&
           s.max_abs_slippage < 0.5;
      detail += fmt("%s: sep %.4f mm, min alignment %.3f deg, slippage %.4f mm; ",
                    side(sides[i]), s.max_abs_separation, s.min_alignment, s.max_abs_slippage);
    }
    report(4, ok, detail);
  }

  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();

  std::printf("%d of 9 criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
