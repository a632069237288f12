#pragma once

#include <vector>

#include "rollslide/mesh.hpp"

namespace rollslide {

/// Orthonormal in-plane basis of a face: e1 along its first edge, e2 = n x e1.
struct FaceBasis {
  Vec3 e1;
  Vec3 e2;
};
FaceBasis face_basis(const ManifoldMesh& mesh, int face);

/// A direction at a surface point, expressed in the base face's FaceBasis.
struct TangentVector {
  SurfacePoint base;
  Vec2 dir = Vec2::UnitX();
  double length = 0.0;  // mm
};

struct GeodesicTrace {
  SurfacePoint end;
  Vec2 end_dir = Vec2::UnitX();  // in the end face's FaceBasis
  Vec3 end_dir_world = Vec3::UnitX();  // same direction, mesh frame
  double length_traced = 0.0;
  std::vector<int> crossed_edges;  // halfedges left through
  int vertex_hits = 0;
};

/// Right-handed frame with z the interpolated normal at p and x the hint
/// projected onto the tangent plane. Throws DegenerateHint when the hint is
/// within 1e-6 rad of the normal.
struct TangentFrame {
  Vec3 x;
  Vec3 y;
  Vec3 z;
};
TangentFrame tangent_basis(const ManifoldMesh& mesh, const SurfacePoint& p,
                           const Vec3& x_hint);

/// Straightest geodesic: straight inside faces, unfolded across edges, and
/// leaving a vertex so the total vertex angle is split equally on both
/// sides. Length is intrinsic arc length.
GeodesicTrace trace_geodesic(const ManifoldMesh& mesh, const TangentVector& start);

/// Same, with a mesh-frame direction; it is projected onto the base face's
/// plane (or the vertex tangent plane when the base is a vertex).
GeodesicTrace trace_geodesic(const ManifoldMesh& mesh, const SurfacePoint& base,
                             const Vec3& direction, double length);

/// The trace's final direction in the mesh frame, unit length.
Vec3 transport_direction(const ManifoldMesh& mesh, const GeodesicTrace& trace);

}  // namespace rollslide
