#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rollslide/error.hpp"
#include "rollslide/experiment.hpp"
#include "rollslide/metrics.hpp"

using namespace rollslide;
using nlohmann::json;

namespace {

RunConfig ring_config(Scenario s, Method m, Resolution r, double duration) {
  RunConfig c;
  c.scenario = s;
  c.method = m;
  c.resolution = r;
  c.duration = duration;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rigid planar rolling: the sphere point at the contact has zero velocity.
// Center at radius c moves with Omega*c; omega_z*(R - c) must cancel it.
double oracle_omega_z(double R, double r, bool inside, double period) {
  const double Omega = 2.0 * M_PI / period;
  const double c = inside ? R - r : R + r;
  return -Omega * c / (R - c);
}

}  // namespace

TEST_CASE("metric primitives") {
  CHECK(metric_sliding(Twist::zero()) == 0.0);
  CHECK(metric_sliding(Twist{Vec3::Zero(), Vec3(3, 4, 0)}) == doctest::Approx(5.0));
  CHECK(metric_sliding(Twist{Vec3(1, 2, 3), Vec3(0, 0, 7)}) == 0.0);
  CHECK(metric_alignment(Vec3(0, 0, 1), Vec3(0, 0, -1)) == doctest::Approx(180.0));
  CHECK(metric_alignment(Vec3(0, 0, 1), Vec3(0, 0, 1)) == doctest::Approx(0.0));
  CHECK(metric_alignment(Vec3(1, 0, 0), Vec3(0, 2, 0)) == doctest::Approx(90.0));

  CollisionReport sep;
  sep.status = ContactStatus::Separated;
  sep.distance_or_depth = 0.3;
  CHECK(metric_separation(sep) == doctest::Approx(0.3));
  CollisionReport pen;
  pen.status = ContactStatus::Penetrating;
  pen.penetration_points = {{Vec3::Zero(), 0.1}, {Vec3::Zero(), 0.3}};
  pen.distance_or_depth = 0.3;
  CHECK(metric_separation(pen) == doctest::Approx(-0.2));
}

TEST_CASE("ring rolling reference") {
  for (bool inside : {true, false}) {
    const RingRolling rr = ring_rolling(inside, 10.0);
    CHECK(rr.omega_z == doctest::Approx(oracle_omega_z(10.0, 5.0, inside, 10.0)).epsilon(1e-12));
    CHECK(rr.center_radius == doctest::Approx(inside ? 5.0 : 15.0));
    CHECK(rr.contact_speed * 10.0 == doctest::Approx(20.0 * M_PI).epsilon(1e-12));
  }
  CHECK(ring_rolling(true, 10.0).omega_z == doctest::Approx(-0.62832).epsilon(1e-5));
  CHECK(ring_rolling(false, 10.0).omega_z == doctest::Approx(1.88496).epsilon(1e-5));
}

TEST_CASE("enum parsing and config validation") {
  CHECK(parse_scenario("SphereRingOutside") == Scenario::SphereRingOutside);
  CHECK(parse_method("Primitive") == Method::Primitive);
  CHECK(parse_resolution("Coarse") == Resolution::Coarse);
  for (auto s : {Scenario::SphereRingInside, Scenario::SphereRingOutside, Scenario::GraspCylinder,
                 Scenario::GraspEllipsoid}) {
    CHECK(parse_scenario(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_scenario("Ring"), Error);
  CHECK_THROWS_AS(parse_method(""), Error);
  CHECK_THROWS_AS(parse_resolution("Ultra"), Error);

  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps() == 1000);
  c.dt = 0.1;
  c.duration = 0.3;
  CHECK(c.steps() == 3);
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.dt = -0.01;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.duration = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.gains.k_v = -0.1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.tube_diameter = 25.0;
  CHECK_THROWS_AS(c.validate(), Error);

  CHECK(run_name(ring_config(Scenario::SphereRingInside, Method::Collision, Resolution::Medium,
                             1.0)) == "SphereRingInside_Collision_Medium");
}

TEST_CASE("metrics csv roundtrip") {
  std::vector<MetricsRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].t = 0.01 * i;
    rows[i].separation = -1.0 / 3.0 + i;
    rows[i].alignment = 179.9 + 1e-7 * i;
    rows[i].slippage = std::exp(i);
    rows[i].sliding = 1e-300 * i;
    rows[i].total_geodesic = M_PI * i;
    rows[i].centroid = Vec3(i, -i, 0.1);
  }
  const std::string text = metrics_csv(rows);
  CHECK(text.rfind("t,", 0) == 0);
  const auto back = parse_metrics_csv(text);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].separation == rows[i].separation);
    CHECK(back[i].alignment == rows[i].alignment);
    CHECK(back[i].slippage == rows[i].slippage);
    CHECK(back[i].sliding == rows[i].sliding);
    CHECK(back[i].total_geodesic == rows[i].total_geodesic);
    CHECK(back[i].centroid == rows[i].centroid);
  }
  CHECK_THROWS_AS(parse_metrics_csv("t,separation\n1,2\n"), Error);
}

TEST_CASE("duration zero gives an empty trajectory") {
  for (Method m : {Method::Geodesic, Method::Collision, Method::Primitive}) {
    const RunResult r = run(ring_config(Scenario::SphereRingInside, m, Resolution::Coarse, 0.0));
    REQUIRE(r.metrics.size() == 1);
    CHECK(r.metrics[0].size() == 1);
    CHECK(r.metrics[0][0].t == 0.0);
    const json traj = json::parse(r.trajectory_json);
    CHECK(traj["steps"].empty());
    CHECK(json::parse(r.summary_json)["steps"] == 0);
  }
}

TEST_CASE("row count and summary are recomputable from the csv") {
  for (Method m : {Method::Geodesic, Method::Collision, Method::Primitive}) {
    CAPTURE(to_string(m));
    RunConfig c = ring_config(Scenario::SphereRingOutside, m, Resolution::Coarse, 0.37);
    const RunResult r = run(c);
    const auto rows = parse_metrics_csv(metrics_csv(r.metrics[0]));
    CHECK(static_cast<long>(rows.size()) == c.steps() + 1);
    CHECK(rows.size() == 38);

    const json s = json::parse(r.summary_json);
    const RingSummary re = summarize_ring(rows, 20.0 * M_PI);
    CHECK(s["steps"].get<long>() == re.steps);
    CHECK(std::abs(s["final_total_geodesic"].get<double>() - re.final_total_geodesic) <= 1e-12);
    CHECK(std::abs(s["max_abs_separation"].get<double>() - re.max_abs_separation) <= 1e-12);
    CHECK(std::abs(s["mean_alignment_error"].get<double>() - re.mean_alignment_error) <= 1e-12);
    CHECK(std::abs(s["max_abs_slippage"].get<double>() - re.max_abs_slippage) <= 1e-12);
    CHECK(std::abs(s["relative_error"].get<double>() - re.relative_error) <= 1e-12);
  }
}

TEST_CASE("one-second revolution tracks the reference distance") {
  // The prescribed twist always completes one revolution within the duration.
  const RunResult r =
      run(ring_config(Scenario::SphereRingInside, Method::Geodesic, Resolution::Medium, 1.0));
  const auto& rows = r.metrics[0];
  CHECK(rows.back().total_geodesic == doctest::Approx(20.0 * M_PI).epsilon(0.03));
  for (const MetricsRow& row : rows) {
    CHECK(std::abs(row.separation) < 0.2);
    CHECK(row.alignment > 178.0);
  }
}

TEST_CASE("runs are deterministic") {
  for (Scenario s : {Scenario::SphereRingInside, Scenario::GraspCylinder}) {
    RunConfig c = ring_config(s, Method::Geodesic, Resolution::Coarse, 0.2);
    c.seed = 7;
    const RunResult a = run(c);
    const RunResult b = run(c);
    CHECK(a.summary_json == b.summary_json);
    CHECK(a.trajectory_json == b.trajectory_json);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (size_t i = 0; i < a.metrics.size(); ++i) {
      CHECK(metrics_csv(a.metrics[i]) == metrics_csv(b.metrics[i]));
    }
  }
}

TEST_CASE("run_many keeps order and matches serial runs") {
  std::vector<RunConfig> cs;
  for (Method m : {Method::Primitive, Method::Geodesic, Method::Collision}) {
    cs.push_back(ring_config(Scenario::SphereRingInside, m, Resolution::Coarse, 0.1));
  }
  const auto par = run_many(cs, 3);
  REQUIRE(par.size() == cs.size());
  for (size_t i = 0; i < cs.size(); ++i) {
    CHECK(par[i].config.method == cs[i].method);
    CHECK(par[i].summary_json == run(cs[i]).summary_json);
  }
}

TEST_CASE("grasp run writes one table per contact") {
  RunConfig c = ring_config(Scenario::GraspCylinder, Method::Geodesic, Resolution::Coarse, 0.1);
  const RunResult r = run(c);
  CHECK(r.metrics.size() == 4);
  for (const auto& rows : r.metrics) CHECK(rows.size() == 11);
  const json s = json::parse(r.summary_json);
  CHECK(s["contacts"].size() == 4);

  c.method = Method::Collision;
  CHECK_THROWS_AS(run(c), Error);
}

TEST_CASE("write_run and compare_table") {
  const auto dir = std::filesystem::temp_directory_path() / "rollslide_test_experiment";
  std::filesystem::remove_all(dir);
  const RunConfig c =
      ring_config(Scenario::SphereRingInside, Method::Primitive, Resolution::Coarse, 0.05);
  const RunResult r = run(c);
  write_run(r, dir / run_name(c));
  CHECK(slurp(dir / run_name(c) / "summary.json") == r.summary_json);
  CHECK(parse_metrics_csv(slurp(dir / run_name(c) / "metrics.csv")).size() == 6);
  CHECK(std::filesystem::exists(dir / run_name(c) / "trajectory.json"));

  const std::string table = compare_table({dir / run_name(c)});
  CHECK(table.find("run\tfinal_total_geodesic") == 0);
  CHECK(table.find(run_name(c)) != std::string::npos);
  CHECK_THROWS_AS(compare_table({dir / "missing"}), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("integration failure carries the step index") {
  RunConfig c = ring_config(Scenario::GraspCylinder, Method::Geodesic, Resolution::Coarse, 0.3);
  c.gains.k_omega = 1e9;
  c.gains.k_v = 1e9;
  try {
    run(c);
    FAIL("expected IntegrationFailure");
  } catch (const IntegrationFailure& e) {
    CHECK(e.step() >= 1);
    CHECK(e.step() <= c.steps());
  }
}
