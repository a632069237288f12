#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rollslide/error.hpp"
#include "rollslide/generators.hpp"
#include "rollslide/geodesic.hpp"
#include "rollslide/query.hpp"

using namespace rollslide;

namespace {

SurfacePoint on_mesh(const ManifoldMesh& m, const Vec3& p) {
  return closest_point(m, Pose::identity(), p).point;
}

}  // namespace

TEST_CASE("tangent basis on a flat face") {
  const ManifoldMesh box = make_box(Vec3(40, 40, 2), 4);
  const SurfacePoint p = on_mesh(box, Vec3(1.3, 2.1, 1.0));
  const TangentFrame f = tangent_basis(box, p, Vec3(1, 0, 0));
  CHECK((f.z - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((f.x - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK((f.y - Vec3(0, 1, 0)).norm() < 1e-12);

  const TangentFrame g = tangent_basis(box, p, Vec3(1, 0, 0.5));
  CHECK((g.x - Vec3(1, 0, 0)).norm() < 1e-12);

  try {
    (void)tangent_basis(box, p, Vec3(0, 0, 3));
    FAIL("expected DegenerateHint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateHint);
  }
}

TEST_CASE("tangent basis on the icosphere is orthonormal and right-handed") {
  const ManifoldMesh m = make_icosphere(10.0, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const SurfacePoint p = on_mesh(m, 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized());
    const TangentFrame f = tangent_basis(m, p, Vec3(n(rng), n(rng), n(rng)));
    Mat3 R;
    R << f.x, f.y, f.z;
    CHECK((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(R.determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("flat trace displaces by the requested length") {
  const ManifoldMesh box = make_box(Vec3(40, 40, 2), 4);
  const SurfacePoint p = on_mesh(box, Vec3(-3.1, 0.7, 1.0));
  const GeodesicTrace t = trace_geodesic(box, p, Vec3(1, 0, 0), 7.0);
  CHECK((box.position(t.end) - Vec3(3.9, 0.7, 1.0)).norm() < 1e-9);
  CHECK(std::abs(t.length_traced - 7.0) < 1e-9);
  CHECK((transport_direction(box, t) - Vec3(1, 0, 0)).norm() < 1e-9);
  CHECK_FALSE(t.crossed_edges.empty());
}

TEST_CASE("zero-length trace is the identity") {
  const ManifoldMesh m = make_icosphere(10.0, 2);
  const SurfacePoint p = on_mesh(m, Vec3(1, 2, 4).normalized() * 5.0);
  const TangentVector tv{p, Vec2(0.6, 0.8), 0.0};
  const GeodesicTrace t = trace_geodesic(m, tv);
  CHECK(t.end.face == p.face);
  CHECK((t.end.barycentric - p.barycentric).norm() < 1e-15);
  CHECK((t.end_dir - tv.dir).norm() < 1e-15);
  CHECK(t.length_traced == 0.0);
}

TEST_CASE("great circles on the fine icosphere") {
  const ManifoldMesh m = make_icosphere(10.0, 4);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> antipode, closure;
  for (int i = 0; i < 40; ++i) {
    const Vec3 q = 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized();
    const SurfacePoint p = on_mesh(m, q);
    const Vec3 start = m.position(p);
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).cross(start).normalized();

    const GeodesicTrace half = trace_geodesic(m, p, dir, 5.0 * M_PI);
    CHECK(std::abs(half.length_traced - 5.0 * M_PI) < 1e-9);
    antipode.push_back((m.position(half.end) + start).norm());

    const GeodesicTrace full = trace_geodesic(m, p, dir, 10.0 * M_PI);
    closure.push_back((m.position(full.end) - start).norm());
  }
  // Medians: a few headings run nearly along edges and drift further.
  std::nth_element(antipode.begin(), antipode.begin() + 20, antipode.end());
  std::nth_element(closure.begin(), closure.begin() + 20, closure.end());
  CHECK(antipode[20] < 0.005 * 10.0);
  CHECK(closure[20] < 0.01 * 5.0);
}

TEST_CASE("great-circle closure error shrinks with resolution") {
  std::vector<double> mean_error;
  for (int sub : {2, 3, 4}) {
    const ManifoldMesh m = make_icosphere(10.0, sub);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < 20; ++i) {
      const SurfacePoint p = on_mesh(m, 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized());
      const Vec3 start = m.position(p);
      const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).cross(start);
      sum += (m.position(trace_geodesic(m, p, dir, 10.0 * M_PI).end) - start).norm();
    }
    mean_error.push_back(sum / 20.0);
  }
  CHECK(mean_error[1] < mean_error[0]);
  CHECK(mean_error[2] < mean_error[1]);
}

TEST_CASE("quarter great circle through the pole keeps heading") {
  const ManifoldMesh m = make_icosphere(10.0, 4);
  const SurfacePoint p = on_mesh(m, Vec3(5, 0, 0));
  const GeodesicTrace t = trace_geodesic(m, p, Vec3(0, 0, 1), 2.5 * M_PI);
  const Vec3 d = transport_direction(m, t);
  CHECK(std::abs(d.norm() - 1.0) < 1e-12);
  CHECK((m.position(t.end) - Vec3(0, 0, 5)).norm() < 0.05);
  // Heading in the pole's tangent plane.
  CHECK(std::abs(std::atan2(d.y(), -d.x())) < 0.02);
  CHECK(std::abs(d.dot(interpolated_normal(m, t.end))) < std::sin(3.0 * M_PI / 180.0));
  CHECK(std::abs(d.dot(m.face_normal(t.end.face))) < 1e-9);
}

TEST_CASE("tracing back along the reversed direction returns to the start") {
  const ManifoldMesh sphere = make_icosphere(10.0, 4);
  const ManifoldMesh box = make_box(Vec3(40, 40, 2), 4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const ManifoldMesh* m : {&sphere, &box}) {
    for (int i = 0; i < 20; ++i) {
      const double L = 3.0;
      const Vec3 q = m == &box ? Vec3(6 * n(rng), 6 * n(rng), 1.0)
                               : 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized();
      const SurfacePoint p = on_mesh(*m, q);
      const Vec2 d = Vec2(n(rng), n(rng)).normalized();
      const GeodesicTrace fwd = trace_geodesic(*m, TangentVector{p, d, L});
      const GeodesicTrace back = trace_geodesic(*m, TangentVector{fwd.end, -fwd.end_dir, L});
      CHECK((m->position(back.end) - m->position(p)).norm() < 1e-6 * L);
    }
  }
}

TEST_CASE("traces compose additively") {
  const ManifoldMesh m = make_icosphere(10.0, 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const SurfacePoint p = on_mesh(m, 5.0 * Vec3(n(rng), n(rng), n(rng)).normalized());
    const Vec2 d = Vec2(n(rng), n(rng)).normalized();
    const double L1 = 1.7, L2 = 2.9;
    const GeodesicTrace whole = trace_geodesic(m, TangentVector{p, d, L1 + L2});
    const GeodesicTrace a = trace_geodesic(m, TangentVector{p, d, L1});
    const GeodesicTrace b = trace_geodesic(m, TangentVector{a.end, a.end_dir, L2});
    CHECK((m.position(whole.end) - m.position(b.end)).norm() < 1e-9);
    CHECK((whole.end_dir_world - b.end_dir_world).norm() < 1e-9);
  }
}

TEST_CASE("a trace straight through a vertex splits the vertex angle") {
  // Box corner regions are flat except at the 8 corners; an icosphere vertex
  // has angle deficit, so passing through it must still give a unit
  // tangent heading away from the vertex.
  const ManifoldMesh m = make_icosphere(10.0, 1);
  const int v = 0;
  const SurfacePoint start = on_mesh(m, m.vertex(v) * 1.0 + Vec3(0.3, 0.2, 0.1));
  const Vec3 to_v = m.vertex(v) - m.position(start);
  const GeodesicTrace t = trace_geodesic(m, start, to_v, 2.0 * to_v.norm());
  CHECK(std::abs(t.length_traced - 2.0 * to_v.norm()) < 1e-9);
  CHECK(std::abs(transport_direction(m, t).norm() - 1.0) < 1e-12);
}
