#pragma once

#include <optional>
#include <vector>

#include <Eigen/Geometry>

#include "rollslide/mesh.hpp"

namespace rollslide {

using Box3 = Eigen::AlignedBox3d;

struct ClosestHit {
  int face = -1;
  Vec3 barycentric = Vec3::Zero();
  double distance_sq = 0.0;
};

struct RayHit {
  int face = -1;
  Vec3 barycentric = Vec3::Zero();
  double t = 0.0;
};

struct TrianglePairHit {
  int face_a = -1;
  int face_b = -1;
  Vec3 point_a = Vec3::Zero();  // in frame A
  Vec3 point_b = Vec3::Zero();  // in frame A
  double distance = 0.0;
};

/// Closest point on triangle (a, b, c) to p, as barycentric weights.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c);

/// Moller-Trumbore; returns (t, barycentric) for t > t_min.
std::optional<std::pair<double, Vec3>> intersect_ray_triangle(
    const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
    const Vec3& c, double t_min = 1e-12);

/// Distance between two triangles with witness points; 0 if they intersect.
struct TriangleDistance {
  double distance;
  Vec3 point_a;
  Vec3 point_b;
};
TriangleDistance triangle_triangle_distance(const std::array<Vec3, 3>& ta,
                                            const std::array<Vec3, 3>& tb);

/// Axis-aligned bounding-volume hierarchy over a mesh's faces, in the mesh's
/// local frame. Ties on equal distance or equal ray parameter go to the
/// lowest face index.
class Bvh {
 public:
  Bvh(const std::vector<Vec3>& vertices, const std::vector<Face>& faces);

  const Box3& bounds() const { return nodes_.front().box; }

  ClosestHit closest(const Vec3& query) const;
  std::optional<RayHit> ray_nearest(const Vec3& origin, const Vec3& dir) const;

  /// Number of positive-t crossings; `degenerate` is set when any hit lies
  /// within `edge_eps` of a triangle edge or the origin is on the surface.
  int ray_crossings(const Vec3& origin, const Vec3& dir, bool& degenerate,
                    double edge_eps = 1e-9) const;

  /// Minimum distance between this mesh and `other` placed by `a_from_b`.
  TrianglePairHit min_distance(const Bvh& other, const Pose& a_from_b) const;

 private:
  struct Node {
    Box3 box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
    bool leaf() const { return left < 0; }
  };

  int build(int first, int count, std::vector<Vec3>& centroids, int depth);
  const std::array<Vec3, 3>& triangle(int face) const { return triangles_[face]; }

  std::vector<std::array<Vec3, 3>> triangles_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
};

}  // namespace rollslide
