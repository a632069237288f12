#include "rollslide/geodesic.hpp"

#include <cmath>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr double kVertexSnap = 1e-9;   // barycentric distance treated as a vertex
constexpr double kWedgeMargin = 1e-9;  // rad kept clear of fan edges
constexpr int kMaxSteps = 1000000;

struct FanCorner {
  int he;       // outgoing halfedge from the vertex
  int face;
  int corner;   // index of the vertex inside `face`
  double start;  // cumulative polar angle
  double angle;
};

struct Fan {
  std::vector<FanCorner> corners;
  double total = 0.0;
};

Fan vertex_fan(const ManifoldMesh& mesh, int v) {
  Fan fan;
  const int first = mesh.vertex_halfedge(v);
  int he = first;
  do {
    const int f = ManifoldMesh::face_of(he);
    const int k = he % 3;
    const double a = mesh.corner_angle(f, k);
    fan.corners.push_back({he, f, k, fan.total, a});
    fan.total += a;
    he = mesh.twin(ManifoldMesh::prev(he));
  } while (he != first);
  return fan;
}

// Signed angle of `d` from the corner's first edge, measured in the face.
double angle_in_corner(const ManifoldMesh& mesh, const FanCorner& c, int v,
                       const Vec3& d) {
  const Vec3 a = mesh.vertex(mesh.head(c.he)) - mesh.vertex(v);
  const Vec3& n = mesh.face_normal(c.face);
  return std::atan2(n.dot(a.cross(d)), a.dot(d));
}

struct Cursor {
  int face;
  Vec3 bary;
  Vec3 dir;
  int leaving_corner = -1;  // set when the cursor sits on a vertex of `face`
  int entry_edge = -1;      // coordinate that is zero on the edge just crossed
};

// Leave vertex `v` at polar angle `phi` of its fan.
Cursor leave_vertex(const ManifoldMesh& mesh, const Fan& fan, int v, double phi) {
  phi = std::fmod(phi, fan.total);
  if (phi < 0.0) phi += fan.total;
  const FanCorner* pick = &fan.corners.back();
  for (const FanCorner& c : fan.corners) {
    if (phi < c.start + c.angle) {
      pick = &c;
      break;
    }
  }
  double beta = phi - pick->start;
  const double margin = std::min(kWedgeMargin, 0.25 * pick->angle);
  beta = std::clamp(beta, margin, pick->angle - margin);
  const Vec3& n = mesh.face_normal(pick->face);
  const Vec3 e = (mesh.vertex(mesh.head(pick->he)) - mesh.vertex(v)).normalized();
  Cursor cur;
  cur.face = pick->face;
  cur.bary = Vec3::Zero();
  cur.bary[pick->corner] = 1.0;
  cur.dir = std::cos(beta) * e + std::sin(beta) * n.cross(e);
  cur.leaving_corner = pick->corner;
  return cur;
}

Vec3 project_to_face(const ManifoldMesh& mesh, int face, const Vec3& d) {
  const Vec3& n = mesh.face_normal(face);
  const Vec3 p = d - n.dot(d) * n;
  const double len = p.norm();
  if (len < 1e-12) {
    throw Error(ErrorCode::InvalidArgument,
                "trace direction is normal to face " + std::to_string(face));
  }
  return p / len;
}

int vertex_at(const ManifoldMesh& mesh, const Cursor& cur) {
  Eigen::Index k;
  const double m = cur.bary.maxCoeff(&k);
  return m > 1.0 - kVertexSnap ? mesh.faces()[cur.face][k] : -1;
}

GeodesicTrace run_trace(const ManifoldMesh& mesh, Cursor cur, double length) {
  GeodesicTrace out;
  double remaining = length;
  for (int step = 0; step < kMaxSteps; ++step) {
    const Eigen::Matrix3d grad = mesh.barycentric_gradients(cur.face);
    const Vec3 db = grad * cur.dir;

    int exit = -1;
    double t_exit = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      if (cur.leaving_corner >= 0 && k != cur.leaving_corner) continue;
      if (k == cur.entry_edge) continue;
      if (db[k] >= -1e-14) continue;
      const double t = std::max(cur.bary[k], 0.0) / -db[k];
      if (t < t_exit) {
        t_exit = t;
        exit = k;
      }
    }
    if (exit < 0) {
      throw Error(ErrorCode::StuckAtVertex,
                  "no exit edge from face " + std::to_string(cur.face));
    }

    if (t_exit >= remaining) {
      cur.bary += db * remaining;
      out.length_traced += remaining;
      remaining = 0.0;
      break;
    }

    Vec3 b = cur.bary + db * t_exit;
    b[exit] = 0.0;
    b = b.cwiseMax(0.0);
    b /= b.sum();
    out.length_traced += t_exit;
    remaining -= t_exit;

    const int k1 = (exit + 1) % 3;
    const int k2 = (exit + 2) % 3;
    if (b[k1] < kVertexSnap || b[k2] < kVertexSnap) {
      // Arrived at a vertex: continue on the straightest ray.
      const int corner = b[k1] < kVertexSnap ? k2 : k1;
      const int v = mesh.faces()[cur.face][corner];
      const Fan fan = vertex_fan(mesh, v);
      const FanCorner* in = nullptr;
      for (const FanCorner& c : fan.corners) {
        if (c.face == cur.face) in = &c;
      }
      if (in == nullptr) {
        throw Error(ErrorCode::StuckAtVertex,
                    "vertex " + std::to_string(v) + " not found in its own fan");
      }
      const double beta_in =
          std::clamp(angle_in_corner(mesh, *in, v, -cur.dir), 0.0, in->angle);
      cur = leave_vertex(mesh, fan, v, in->start + beta_in + 0.5 * fan.total);
      ++out.vertex_hits;
      continue;
    }

    // Cross the edge opposite `exit` into the neighbor, unfolding the
    // direction about the shared edge.
    const int he = 3 * cur.face + k1;
    const int tw = mesh.twin(he);
    const int g = ManifoldMesh::face_of(tw);
    const Vec3 e = (mesh.vertex(mesh.head(he)) - mesh.vertex(mesh.tail(he))).normalized();
    const Vec3& n1 = mesh.face_normal(cur.face);
    const Vec3& n2 = mesh.face_normal(g);
    Vec3 d = cur.dir.dot(e) * e + cur.dir.dot(n1.cross(e)) * n2.cross(e);
    d = (d - n2.dot(d) * n2).normalized();

    // On the twin, the tail is this halfedge's head.
    const double w_head = b[k2];
    Vec3 nb = Vec3::Zero();
    nb[tw % 3] = w_head;
    nb[(tw % 3 + 1) % 3] = 1.0 - w_head;
    out.crossed_edges.push_back(he);
    cur = {g, nb, d, -1, (tw % 3 + 2) % 3};
  }
  if (remaining > 0.0) {
    throw Error(ErrorCode::StuckAtVertex, "trace did not terminate");
  }
  out.end = SurfacePoint{cur.face, cur.bary}.normalized();
  out.end_dir_world = cur.dir;
  const FaceBasis basis = face_basis(mesh, cur.face);
  out.end_dir = Vec2(cur.dir.dot(basis.e1), cur.dir.dot(basis.e2)).normalized();
  return out;
}

// Starting cursor for a mesh-frame direction at `base`.
Cursor start_cursor(const ManifoldMesh& mesh, const SurfacePoint& base, const Vec3& direction) {
  Cursor cur{base.face, base.normalized().barycentric, Vec3::Zero(), -1, -1};
  const int v = vertex_at(mesh, cur);
  if (v < 0) {
    cur.dir = project_to_face(mesh, base.face, direction);
    return cur;
  }
  // At a vertex: map the direction's angle in the vertex tangent plane onto
  // the fan's polar coordinate, rescaled by total angle / 2 pi.
  const Fan fan = vertex_fan(mesh, v);
  const Vec3& n = mesh.vertex_normal(v);
  Vec3 ref = mesh.vertex(mesh.head(fan.corners.front().he)) - mesh.vertex(v);
  ref = (ref - n.dot(ref) * n).normalized();
  const Vec3 d = direction - n.dot(direction) * n;
  double alpha = std::atan2(n.dot(ref.cross(d)), ref.dot(d));
  if (alpha < 0.0) alpha += 2.0 * M_PI;
  return leave_vertex(mesh, fan, v, alpha * fan.total / (2.0 * M_PI));
}

}  // namespace

FaceBasis face_basis(const ManifoldMesh& mesh, int face) {
  const Face& t = mesh.faces()[face];
  const Vec3 e1 = (mesh.vertex(t[1]) - mesh.vertex(t[0])).normalized();
  return {e1, mesh.face_normal(face).cross(e1)};
}

TangentFrame tangent_basis(const ManifoldMesh& mesh, const SurfacePoint& p,
                           const Vec3& x_hint) {
  const Vec3 z = interpolated_normal(mesh, p);
  const Vec3 x = x_hint - x_hint.dot(z) * z;
  const double hint_norm = x_hint.norm();
  if (!(hint_norm > 0.0) || x.norm() < std::sin(1e-6) * hint_norm) {
    throw Error(ErrorCode::DegenerateHint, "x hint is parallel to the surface normal");
  }
  const Vec3 xn = x.normalized();
  return {xn, z.cross(xn), z};
}

GeodesicTrace trace_geodesic(const ManifoldMesh& mesh, const TangentVector& start) {
  const FaceBasis basis = face_basis(mesh, start.base.face);
  const Vec3 d = start.dir.x() * basis.e1 + start.dir.y() * basis.e2;
  return trace_geodesic(mesh, start.base, d, start.length);
}

GeodesicTrace trace_geodesic(const ManifoldMesh& mesh, const SurfacePoint& base,
                             const Vec3& direction, double length) {
  if (!(length >= 0.0) || !std::isfinite(length)) {
    throw Error(ErrorCode::InvalidArgument, "trace length must be finite and >= 0");
  }
  if (base.face < 0 || base.face >= mesh.num_faces()) {
    throw Error(ErrorCode::InvalidArgument, "surface point has an invalid face");
  }
  if (length == 0.0) {
    GeodesicTrace out;
    out.end = base;
    out.end_dir_world = project_to_face(mesh, base.face, direction);
    const FaceBasis basis = face_basis(mesh, base.face);
    out.end_dir = Vec2(out.end_dir_world.dot(basis.e1), out.end_dir_world.dot(basis.e2));
    return out;
  }
  return run_trace(mesh, start_cursor(mesh, base, direction), length);
}

Vec3 transport_direction(const ManifoldMesh& mesh, const GeodesicTrace& trace) {
  const FaceBasis basis = face_basis(mesh, trace.end.face);
  return (trace.end_dir.x() * basis.e1 + trace.end_dir.y() * basis.e2).normalized();
}

}  // namespace rollslide
