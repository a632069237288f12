#pragma once

#include <optional>
#include <vector>

#include "rollslide/mesh.hpp"

namespace rollslide {

struct ClosestPoint {
  SurfacePoint point;
  double distance = 0.0;  // mm, world frame
};

struct RayCastHit {
  SurfacePoint point;
  double t = 0.0;  // mm along the unit direction
};

enum class ContactStatus { Separated, Penetrating };

struct PenetrationPoint {
  Vec3 position;  // world frame
  double depth = 0.0;
};

/// Result of a narrow-phase query between two placed meshes.
///
/// Separated: `distance_or_depth` is the minimum distance and the witnesses
/// realize it. Penetrating: `distance_or_depth` is the maximum depth, the
/// witnesses are the deepest sample and its closest point on the other mesh.
struct CollisionReport {
  ContactStatus status = ContactStatus::Separated;
  double distance_or_depth = 0.0;
  SurfacePoint witness_a;
  SurfacePoint witness_b;
  std::vector<PenetrationPoint> penetration_points;
};

/// Globally nearest surface point to a world-frame query.
ClosestPoint closest_point(const ManifoldMesh& mesh, const Pose& pose,
                           const Vec3& query);

/// Nearest positive-t intersection of a world-frame ray, if any.
std::optional<RayCastHit> ray_cast(const ManifoldMesh& mesh, const Pose& pose,
                                   const Vec3& origin, const Vec3& dir);

/// Ray-parity inside test in the mesh's local frame. Directions are drawn
/// from a fixed table and retried when a hit grazes an edge; `seed` offsets
/// the table.
bool contains(const ManifoldMesh& mesh, const Vec3& local_point,
              unsigned seed = 0);

/// Penetration samples are mesh vertices lying inside the other body, each
/// with its depth to the other surface.
CollisionReport collide(const ManifoldMesh& mesh_a, const Pose& pose_a,
                        const ManifoldMesh& mesh_b, const Pose& pose_b,
                        unsigned seed = 0);

/// Depth-weighted mean of the penetration samples. Throws NotPenetrating.
Vec3 weighted_penetration_centroid(const CollisionReport& report);

}  // namespace rollslide
