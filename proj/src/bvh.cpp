#include "rollslide/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rollslide {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  // Voronoi-region walk over vertices, edges, then face interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {1.0, 0.0, 0.0};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {0.0, 1.0, 0.0};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {1.0 - v, v, 0.0};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {0.0, 0.0, 1.0};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {1.0 - w, 0.0, w};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0.0, 1.0 - w, w};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return {1.0 - v - w, v, w};
}

std::optional<std::pair<double, Vec3>> intersect_ray_triangle(
    const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
    const Vec3& c, double t_min) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv_det;
  if (t <= t_min) return std::nullopt;
  return std::make_pair(t, Vec3(1.0 - u - v, u, v));
}

namespace {

struct SegmentClosest {
  double distance_sq;
  Vec3 p;
  Vec3 q;
};

SegmentClosest closest_segment_segment(const Vec3& p1, const Vec3& q1,
                                       const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  constexpr double kEps = 1e-300;
  if (a <= kEps && e <= kEps) {
    s = t = 0.0;
  } else if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 c1 = p1 + d1 * s;
  const Vec3 c2 = p2 + d2 * t;
  return {(c1 - c2).squaredNorm(), c1, c2};
}

bool segment_hits_triangle(const Vec3& p, const Vec3& q,
                           const std::array<Vec3, 3>& t, Vec3& where) {
  const Vec3 d = q - p;
  const auto hit = intersect_ray_triangle(p, d, t[0], t[1], t[2], -1e-300);
  if (!hit || hit->first < 0.0 || hit->first > 1.0) return false;
  where = p + hit->first * d;
  return true;
}

double box_distance_sq(const Box3& a, const Box3& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double gap =
        std::max({0.0, a.min()[i] - b.max()[i], b.min()[i] - a.max()[i]});
    d2 += gap * gap;
  }
  return d2;
}

Box3 transformed_box(const Box3& box, const Pose& pose) {
  const Vec3 center = pose.apply(box.center());
  const Vec3 half = 0.5 * box.sizes();
  const Vec3 extent = pose.rotation.cwiseAbs() * half;
  return Box3(center - extent, center + extent);
}

// Slab test; returns entry parameter or +inf on miss.
double ray_box_entry(const Box3& box, const Vec3& origin, const Vec3& inv_dir) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    double a = (box.min()[i] - origin[i]) * inv_dir[i];
    double b = (box.max()[i] - origin[i]) * inv_dir[i];
    if (std::isnan(a) || std::isnan(b)) {
      // Ray parallel to the slab and origin on its boundary.
      if (origin[i] < box.min()[i] || origin[i] > box.max()[i]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1 + 1e-12) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

}  // namespace

TriangleDistance triangle_triangle_distance(const std::array<Vec3, 3>& ta,
                                            const std::array<Vec3, 3>& tb) {
  Vec3 where;
  for (int i = 0; i < 3; ++i) {
    if (segment_hits_triangle(ta[i], ta[(i + 1) % 3], tb, where)) {
      return {0.0, where, where};
    }
    if (segment_hits_triangle(tb[i], tb[(i + 1) % 3], ta, where)) {
      return {0.0, where, where};
    }
  }
  TriangleDistance best{std::numeric_limits<double>::infinity(), ta[0], tb[0]};
  auto consider = [&](double d2, const Vec3& pa, const Vec3& pb) {
    if (d2 < best.distance) {
      best = {d2, pa, pb};
    }
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const SegmentClosest s = closest_segment_segment(
          ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3]);
      consider(s.distance_sq, s.p, s.q);
    }
  }
  for (int i = 0; i < 3; ++i) {
    const Vec3 wb = closest_point_on_triangle(ta[i], tb[0], tb[1], tb[2]);
    const Vec3 pb = wb[0] * tb[0] + wb[1] * tb[1] + wb[2] * tb[2];
    consider((ta[i] - pb).squaredNorm(), ta[i], pb);
    const Vec3 wa = closest_point_on_triangle(tb[i], ta[0], ta[1], ta[2]);
    const Vec3 pa = wa[0] * ta[0] + wa[1] * ta[1] + wa[2] * ta[2];
    consider((tb[i] - pa).squaredNorm(), pa, tb[i]);
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

Bvh::Bvh(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
  triangles_.reserve(faces.size());
  std::vector<Vec3> centroids;
  centroids.reserve(faces.size());
  for (const Face& f : faces) {
    triangles_.push_back({vertices[f[0]], vertices[f[1]], vertices[f[2]]});
    centroids.push_back((vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0);
  }
  order_.resize(faces.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * faces.size());
  build(0, static_cast<int>(faces.size()), centroids, 0);
}

int Bvh::build(int first, int count, std::vector<Vec3>& centroids, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Box3 box;
  box.setEmpty();
  Box3 centroid_box;
  centroid_box.setEmpty();
  for (int i = first; i < first + count; ++i) {
    for (const Vec3& v : triangles_[order_[i]]) box.extend(v);
    centroid_box.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (count <= 4 || depth > 60) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  Eigen::Index axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count, [&](int a, int b) {
                     if (centroids[a][axis] != centroids[b][axis]) {
                       return centroids[a][axis] < centroids[b][axis];
                     }
                     return a < b;
                   });
  const int left = build(first, mid - first, centroids, depth + 1);
  const int right = build(mid, first + count - mid, centroids, depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

ClosestHit Bvh::closest(const Vec3& query) const {
  ClosestHit best;
  best.distance_sq = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(query) > best.distance_sq) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int f = order_[i];
        const auto& t = triangles_[f];
        const Vec3 w = closest_point_on_triangle(query, t[0], t[1], t[2]);
        const double d2 = (w[0] * t[0] + w[1] * t[1] + w[2] * t[2] - query).squaredNorm();
        if (d2 < best.distance_sq || (d2 == best.distance_sq && f < best.face)) {
          best = {f, w, d2};
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(query);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(query);
    // Push the farther child first so the nearer one is visited next.
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return best;
}

std::optional<RayHit> Bvh::ray_nearest(const Vec3& origin, const Vec3& dir) const {
  const Vec3 inv_dir = dir.cwiseInverse();
  std::optional<RayHit> best;
  double best_t = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const double entry = ray_box_entry(node.box, origin, inv_dir);
    if (!(entry <= best_t + 1e-12)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int f = order_[i];
        const auto& t = triangles_[f];
        const auto hit = intersect_ray_triangle(origin, dir, t[0], t[1], t[2]);
        if (!hit) continue;
        const double ht = hit->first;
        const bool better =
            !best || ht < best_t - 1e-12 ||
            (std::abs(ht - best_t) <= 1e-12 && f < best->face);
        if (better) {
          best = RayHit{f, hit->second, ht};
          best_t = ht;
        }
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return best;
}

int Bvh::ray_crossings(const Vec3& origin, const Vec3& dir, bool& degenerate,
                       double edge_eps) const {
  const Vec3 inv_dir = dir.cwiseInverse();
  int crossings = 0;
  degenerate = false;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!std::isfinite(ray_box_entry(node.box, origin, inv_dir))) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& t = triangles_[order_[i]];
        const auto hit = intersect_ray_triangle(origin, dir, t[0], t[1], t[2], -1e-9);
        if (!hit) continue;
        if (hit->first < 1e-9 || hit->second.minCoeff() < edge_eps) {
          degenerate = true;
        }
        if (hit->first > 0.0) ++crossings;
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
  return crossings;
}

TrianglePairHit Bvh::min_distance(const Bvh& other, const Pose& a_from_b) const {
  TrianglePairHit best;
  best.distance = std::numeric_limits<double>::infinity();
  double best_sq = best.distance;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  std::vector<Box3> other_boxes;
  other_boxes.reserve(other.nodes_.size());
  for (const Node& n : other.nodes_) other_boxes.push_back(transformed_box(n.box, a_from_b));

  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const Node& na = nodes_[ia];
    const Node& nb = other.nodes_[ib];
    if (box_distance_sq(na.box, other_boxes[ib]) > best_sq) continue;
    if (na.leaf() && nb.leaf()) {
      for (int i = na.first; i < na.first + na.count; ++i) {
        const int fa = order_[i];
        for (int j = nb.first; j < nb.first + nb.count; ++j) {
          const int fb = other.order_[j];
          const auto& src = other.triangles_[fb];
          const std::array<Vec3, 3> tb{a_from_b.apply(src[0]), a_from_b.apply(src[1]),
                                       a_from_b.apply(src[2])};
          const TriangleDistance d = triangle_triangle_distance(triangles_[fa], tb);
          const bool better =
              d.distance < best.distance ||
              (d.distance == best.distance &&
               (fa < best.face_a || (fa == best.face_a && fb < best.face_b)));
          if (better) {
            best = {fa, fb, d.point_a, d.point_b, d.distance};
            best_sq = d.distance * d.distance;
          }
        }
      }
      continue;
    }
    // Descend into the larger node.
    const bool split_a =
        !na.leaf() && (nb.leaf() || na.box.sizes().squaredNorm() >= nb.box.sizes().squaredNorm());
    if (split_a) {
      stack.emplace_back(na.right, ib);
      stack.emplace_back(na.left, ib);
    } else {
      stack.emplace_back(ia, nb.right);
      stack.emplace_back(ia, nb.left);
    }
  }
  return best;
}

}  // namespace rollslide
