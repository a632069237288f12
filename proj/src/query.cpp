#include "rollslide/query.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rollslide/bvh.hpp"
#include "rollslide/error.hpp"

namespace rollslide {

namespace {

// Fixed, generic ray directions for the parity test.
const std::array<Vec3, 8>& parity_directions() {
  static const std::array<Vec3, 8> dirs = [] {
    std::array<Vec3, 8> d{
        Vec3(0.5773502691896258, 0.5773502691896258 + 1.234e-3, 0.5773502691896258 - 2.718e-3),
        Vec3(-0.3141592653589793, 0.8660254037844386, 0.3892883236),
        Vec3(0.7071067811865476, -0.1618033988749895, -0.6881909602355868),
        Vec3(-0.6180339887498948, -0.5257311121191336, 0.5845),
        Vec3(0.1234567, 0.9876543, -0.0975310),
        Vec3(-0.8017837257372732, 0.2672612419124244, -0.5345224838248488),
        Vec3(0.4082482904638631, -0.8164965809277261, 0.4082482904638631 + 3.3e-3),
        Vec3(-0.2357022603955159, -0.2357022603955159 + 7.1e-3, -0.9428090415820634),
    };
    for (Vec3& v : d) v.normalize();
    return d;
  }();
  return dirs;
}

}  // namespace

ClosestPoint closest_point(const ManifoldMesh& mesh, const Pose& pose,
                           const Vec3& query) {
  const Vec3 local = pose.inverse().apply(query);
  const ClosestHit hit = mesh.bvh().closest(local);
  return {SurfacePoint{hit.face, hit.barycentric}, std::sqrt(hit.distance_sq)};
}

std::optional<RayCastHit> ray_cast(const ManifoldMesh& mesh, const Pose& pose,
                                   const Vec3& origin, const Vec3& dir) {
  const Pose inv = pose.inverse();
  const auto hit = mesh.bvh().ray_nearest(inv.apply(origin), inv.rotation * dir);
  if (!hit) return std::nullopt;
  return RayCastHit{SurfacePoint{hit->face, hit->barycentric}, hit->t};
}

bool contains(const ManifoldMesh& mesh, const Vec3& local_point, unsigned seed) {
  const Bvh& bvh = mesh.bvh();
  if (!bvh.bounds().contains(local_point)) return false;
  const auto& dirs = parity_directions();
  int votes_inside = 0;
  int votes = 0;
  for (std::size_t attempt = 0; attempt < dirs.size(); ++attempt) {
    const Vec3& dir = dirs[(seed + attempt) % dirs.size()];
    bool degenerate = false;
    const int crossings = bvh.ray_crossings(local_point, dir, degenerate);
    if (!degenerate) return crossings % 2 == 1;
    ++votes;
    votes_inside += crossings % 2;
  }
  // Every direction grazed an edge: the point sits on the surface.
  return 2 * votes_inside > votes;
}

CollisionReport collide(const ManifoldMesh& mesh_a, const Pose& pose_a,
                        const ManifoldMesh& mesh_b, const Pose& pose_b,
                        unsigned seed) {
  if (!pose_a.rotation.allFinite() || !pose_a.translation.allFinite() ||
      !pose_b.rotation.allFinite() || !pose_b.translation.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "collide: non-finite pose");
  }
  CollisionReport report;
  const Pose a_from_b = pose_a.inverse() * pose_b;
  const Pose b_from_a = a_from_b.inverse();

  struct Deepest {
    double depth = -1.0;
    SurfacePoint on_a;
    SurfacePoint on_b;
  } deepest;

  // Vertices of `inner` that lie inside `outer`.
  auto sample = [&](const ManifoldMesh& inner, const Pose& inner_pose,
                    const ManifoldMesh& outer, const Pose& outer_from_inner,
                    bool inner_is_b) {
    const Box3& bounds = outer.bvh().bounds();
    for (int v = 0; v < inner.num_vertices(); ++v) {
      const Vec3 local = outer_from_inner.apply(inner.vertex(v));
      if (!bounds.contains(local)) continue;
      if (!contains(outer, local, seed)) continue;
      const ClosestHit hit = outer.bvh().closest(local);
      const double depth = std::sqrt(hit.distance_sq);
      if (!(depth > 0.0)) continue;
      report.penetration_points.push_back({inner_pose.apply(inner.vertex(v)), depth});
      if (depth > deepest.depth) {
        const SurfacePoint on_inner = inner.vertex_point(v);
        const SurfacePoint on_outer{hit.face, hit.barycentric};
        deepest.depth = depth;
        deepest.on_a = inner_is_b ? on_outer : on_inner;
        deepest.on_b = inner_is_b ? on_inner : on_outer;
      }
    }
  };
  sample(mesh_b, pose_b, mesh_a, a_from_b, true);
  sample(mesh_a, pose_a, mesh_b, b_from_a, false);

  if (!report.penetration_points.empty()) {
    report.status = ContactStatus::Penetrating;
    report.distance_or_depth = deepest.depth;
    report.witness_a = deepest.on_a;
    report.witness_b = deepest.on_b;
    return report;
  }

  const TrianglePairHit hit = mesh_a.bvh().min_distance(mesh_b.bvh(), a_from_b);
  if (hit.face_a < 0 || hit.face_b < 0) {
    throw Error(ErrorCode::InvalidArgument, "collide: no closest triangle pair");
  }
  report.status = ContactStatus::Separated;
  report.distance_or_depth = hit.distance;
  report.witness_a = mesh_a.barycentric_of(hit.face_a, hit.point_a).normalized();
  report.witness_b =
      mesh_b.barycentric_of(hit.face_b, b_from_a.apply(hit.point_b)).normalized();
  return report;
}

Vec3 weighted_penetration_centroid(const CollisionReport& report) {
  if (report.status != ContactStatus::Penetrating || report.penetration_points.empty()) {
    throw Error(ErrorCode::NotPenetrating, "report has no penetration samples");
  }
  Vec3 sum = Vec3::Zero();
  double weight = 0.0;
  for (const PenetrationPoint& p : report.penetration_points) {
    sum += p.depth * p.position;
    weight += p.depth;
  }
  return sum / weight;
}

}  // namespace rollslide
