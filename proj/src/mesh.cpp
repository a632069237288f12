#include "rollslide/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "rollslide/bvh.hpp"
#include "rollslide/error.hpp"

namespace rollslide {

SurfacePoint SurfacePoint::normalized() const {
  Vec3 b = barycentric.cwiseMax(0.0);
  const double s = b.sum();
  if (s <= 0.0) return {face, Vec3::Constant(1.0 / 3.0)};
  return {face, b / s};
}

ManifoldMesh::ManifoldMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  if (faces_.empty()) throw Error(ErrorCode::ParseError, "mesh has no faces");
  const int nv = num_vertices();
  for (int f = 0; f < num_faces(); ++f) {
    for (int v : faces_[f]) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorCode::ParseError, "face " + std::to_string(f) +
                                               " references vertex " +
                                               std::to_string(v));
      }
    }
  }
  for (int f = 0; f < num_faces(); ++f) {
    const Face& t = faces_[f];
    const double area =
        0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
    if (!(area > 1e-12)) {
      throw Error(ErrorCode::DegenerateFace,
                  "face " + std::to_string(f) + " has area " + std::to_string(area));
    }
  }
  build_connectivity();
  if (signed_volume() < 0.0) {
    for (Face& t : faces_) std::swap(t[1], t[2]);
    build_connectivity();
  }
  compute_geometry();
  bvh_ = std::make_unique<Bvh>(vertices_, faces_);
}

ManifoldMesh::~ManifoldMesh() = default;
ManifoldMesh::ManifoldMesh(ManifoldMesh&&) noexcept = default;
ManifoldMesh& ManifoldMesh::operator=(ManifoldMesh&&) noexcept = default;

void ManifoldMesh::build_connectivity() {
  const int nh = num_halfedges();
  auto key = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(static_cast<std::size_t>(nh) * 2);
  for (int he = 0; he < nh; ++he) {
    const auto [it, inserted] = directed.emplace(key(tail(he), head(he)), he);
    if (!inserted) {
      throw Error(ErrorCode::NonManifoldEdge,
                  "edge " + std::to_string(tail(he)) + "-" + std::to_string(head(he)) +
                      " of face " + std::to_string(face_of(he)) +
                      " is shared by more than two faces or wound inconsistently");
    }
  }
  twin_.assign(nh, -1);
  for (int he = 0; he < nh; ++he) {
    const auto it = directed.find(key(head(he), tail(he)));
    if (it == directed.end()) {
      throw Error(ErrorCode::OpenBoundary,
                  "edge " + std::to_string(tail(he)) + "-" + std::to_string(head(he)) +
                      " of face " + std::to_string(face_of(he)) + " has no opposite face");
    }
    twin_[he] = it->second;
  }

  vertex_halfedge_.assign(num_vertices(), -1);
  std::vector<int> outgoing(num_vertices(), 0);
  for (int he = 0; he < nh; ++he) {
    vertex_halfedge_[tail(he)] = he;
    ++outgoing[tail(he)];
  }
  for (int v = 0; v < num_vertices(); ++v) {
    if (vertex_halfedge_[v] < 0) {
      throw Error(ErrorCode::NonManifoldVertex,
                  "vertex " + std::to_string(v) + " is not referenced by any face");
    }
    // Walk the fan; a manifold vertex has a single cycle covering all
    // outgoing halfedges.
    int count = 0;
    int he = vertex_halfedge_[v];
    do {
      ++count;
      he = twin_[prev(he)];
    } while (he != vertex_halfedge_[v] && count <= outgoing[v]);
    if (count != outgoing[v]) {
      throw Error(ErrorCode::NonManifoldVertex,
                  "vertex " + std::to_string(v) + " has a non-disk neighborhood");
    }
  }
}

double ManifoldMesh::signed_volume() const {
  double vol = 0.0;
  for (const Face& t : faces_) {
    vol += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]]));
  }
  return vol / 6.0;
}

double ManifoldMesh::corner_angle(int f, int k) const {
  const Face& t = faces_[f];
  const Vec3 a = vertices_[t[(k + 1) % 3]] - vertices_[t[k]];
  const Vec3 b = vertices_[t[(k + 2) % 3]] - vertices_[t[k]];
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

void ManifoldMesh::compute_geometry() {
  face_normals_.resize(faces_.size());
  face_areas_.resize(faces_.size());
  double edge_sum = 0.0;
  for (int f = 0; f < num_faces(); ++f) {
    const Face& t = faces_[f];
    const Vec3 n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
    face_areas_[f] = 0.5 * n.norm();
    face_normals_[f] = n.normalized();
    for (int k = 0; k < 3; ++k) {
      edge_sum += (vertices_[t[(k + 1) % 3]] - vertices_[t[k]]).norm();
    }
  }
  mean_edge_length_ = edge_sum / num_halfedges();
  vertex_normals_ = rollslide::vertex_normals(*this);
}

Vec3 ManifoldMesh::position(const SurfacePoint& p) const {
  const Face& t = faces_[p.face];
  return p.barycentric[0] * vertices_[t[0]] + p.barycentric[1] * vertices_[t[1]] +
         p.barycentric[2] * vertices_[t[2]];
}

SurfacePoint ManifoldMesh::vertex_point(int v) const {
  const int he = vertex_halfedge_[v];
  SurfacePoint p;
  p.face = face_of(he);
  p.barycentric = Vec3::Zero();
  p.barycentric[he % 3] = 1.0;
  return p;
}

SurfacePoint ManifoldMesh::barycentric_of(int face, const Vec3& point) const {
  const Eigen::Matrix3d g = barycentric_gradients(face);
  const Vec3& a = vertices_[faces_[face][0]];
  Vec3 b = g * (point - a);
  b[0] = 1.0 - b[1] - b[2];
  return {face, b};
}

Eigen::Matrix3d ManifoldMesh::barycentric_gradients(int f) const {
  const Face& t = faces_[f];
  const Vec3& n = face_normals_[f];
  const double inv = 1.0 / (2.0 * face_areas_[f]);
  Eigen::Matrix3d g;
  for (int k = 0; k < 3; ++k) {
    const Vec3 opposite = vertices_[t[(k + 2) % 3]] - vertices_[t[(k + 1) % 3]];
    g.row(k) = n.cross(opposite).transpose() * inv;
  }
  return g;
}

std::vector<Vec3> vertex_normals(const ManifoldMesh& mesh) {
  std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      normals[mesh.faces()[f][k]] += mesh.corner_angle(f, k) * mesh.face_normal(f);
    }
  }
  for (Vec3& n : normals) n.normalize();
  return normals;
}

Vec3 interpolated_normal(const ManifoldMesh& mesh, const SurfacePoint& p) {
  const Face& t = mesh.faces()[p.face];
  const Vec3 n = p.barycentric[0] * mesh.vertex_normal(t[0]) +
                 p.barycentric[1] * mesh.vertex_normal(t[1]) +
                 p.barycentric[2] * mesh.vertex_normal(t[2]);
  const double len = n.norm();
  if (len < 1e-9) {
    throw Error(ErrorCode::ZeroNormal,
                "interpolated normal vanishes on face " + std::to_string(p.face));
  }
  return n / len;
}

namespace {

int parse_index(const std::string& token, int num_vertices, int line) {
  const std::string head = token.substr(0, token.find('/'));
  try {
    std::size_t used = 0;
    const int raw = std::stoi(head, &used);
    if (used != head.size() || raw == 0) throw std::invalid_argument(head);
    return raw > 0 ? raw - 1 : num_vertices + raw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad face index '" + token + "'");
  }
}

}  // namespace

ManifoldMesh load_obj(std::string_view text) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad vertex");
      }
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        idx.push_back(parse_index(tok, static_cast<int>(vertices.size()), line_no));
      }
      if (idx.size() < 3) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        faces.push_back({idx[0], idx[k], idx[k + 1]});
      }
    }
  }
  return ManifoldMesh(std::move(vertices), std::move(faces));
}

ManifoldMesh load_obj_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_obj(buf.str());
}

std::string save_obj(const ManifoldMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices()) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const Face& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  return out.str();
}

void save_obj_file(const ManifoldMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << save_obj(mesh);
}

}  // namespace rollslide
