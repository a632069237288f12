#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rollslide/se3.hpp"

namespace rollslide {

class Bvh;

/// A point bound to a mesh face by barycentric coordinates.
struct SurfacePoint {
  int face = -1;
  Vec3 barycentric = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);

  /// Clamps to the triangle and renormalizes to sum 1.
  SurfacePoint normalized() const;
};

using Face = std::array<int, 3>;

/// Closed, consistently outward-wound triangle mesh with halfedge
/// connectivity. Immutable after construction.
///
/// Halfedge 3*f+k runs from faces[f][k] to faces[f][(k+1)%3]; its `next` is
/// 3*f+(k+1)%3 and its twin is the opposite halfedge on the neighbor face.
class ManifoldMesh {
 public:
  /// Validates and builds connectivity, normals and the BVH. Throws
  /// NonManifoldEdge, NonManifoldVertex, OpenBoundary or DegenerateFace. A
  /// mesh with negative signed volume is re-wound so that normals point out.
  ManifoldMesh(std::vector<Vec3> vertices, std::vector<Face> faces);
  ~ManifoldMesh();
  ManifoldMesh(const ManifoldMesh&) = delete;
  ManifoldMesh& operator=(const ManifoldMesh&) = delete;
  ManifoldMesh(ManifoldMesh&&) noexcept;
  ManifoldMesh& operator=(ManifoldMesh&&) noexcept;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }
  int num_edges() const { return num_halfedges() / 2; }
  int euler_characteristic() const {
    return num_vertices() - num_edges() + num_faces();
  }

  int twin(int he) const { return twin_[he]; }
  static int next(int he) { return 3 * (he / 3) + (he % 3 + 1) % 3; }
  static int prev(int he) { return 3 * (he / 3) + (he % 3 + 2) % 3; }
  static int face_of(int he) { return he / 3; }
  int tail(int he) const { return faces_[he / 3][he % 3]; }
  int head(int he) const { return faces_[he / 3][(he % 3 + 1) % 3]; }
  /// One outgoing halfedge per vertex.
  int vertex_halfedge(int v) const { return vertex_halfedge_[v]; }

  const Vec3& vertex(int v) const { return vertices_[v]; }
  const Vec3& face_normal(int f) const { return face_normals_[f]; }
  double face_area(int f) const { return face_areas_[f]; }
  const Vec3& vertex_normal(int v) const { return vertex_normals_[v]; }
  const std::vector<Vec3>& vertex_normals() const { return vertex_normals_; }
  double mean_edge_length() const { return mean_edge_length_; }
  double signed_volume() const;

  /// Interior angle of face f at its corner k.
  double corner_angle(int f, int k) const;

  Vec3 position(const SurfacePoint& p) const;
  SurfacePoint vertex_point(int v) const;
  SurfacePoint barycentric_of(int face, const Vec3& point) const;

  /// Gradient of each barycentric coordinate of face f (rows), in the face
  /// plane.
  Eigen::Matrix3d barycentric_gradients(int f) const;

  const Bvh& bvh() const { return *bvh_; }

 private:
  void build_connectivity();
  void compute_geometry();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> vertex_halfedge_;
  std::vector<Vec3> face_normals_;
  std::vector<double> face_areas_;
  std::vector<Vec3> vertex_normals_;
  double mean_edge_length_ = 0.0;
  std::unique_ptr<Bvh> bvh_;
};

/// Angle-weighted vertex normals, unit length.
std::vector<Vec3> vertex_normals(const ManifoldMesh& mesh);

/// Barycentric blend of the face's vertex normals, renormalized. Throws
/// ZeroNormal when the blend has norm below 1e-9.
Vec3 interpolated_normal(const ManifoldMesh& mesh, const SurfacePoint& p);

/// ASCII OBJ, `v` and `f` records only (1-based or negative indices,
/// `f a/b/c` forms accepted); polygons are fan-triangulated.
ManifoldMesh load_obj(std::string_view text);
ManifoldMesh load_obj_file(const std::filesystem::path& path);
std::string save_obj(const ManifoldMesh& mesh);
void save_obj_file(const ManifoldMesh& mesh, const std::filesystem::path& path);

}  // namespace rollslide
