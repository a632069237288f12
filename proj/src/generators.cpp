#include "rollslide/generators.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
  }
}

void require_resolution(int value, int minimum, const char* name) {
  if (value < minimum) {
    throw Error(ErrorCode::InvalidResolution,
                std::string(name) + " = " + std::to_string(value) + " is below " +
                    std::to_string(minimum));
  }
}

// Grid over a periodic-in-u parameter domain; rows are rings of vertices.
void stitch_rings(std::vector<Face>& faces, int first_ring_start, int rings,
                  int segments, bool wrap_rings) {
  const int last = wrap_rings ? rings : rings - 1;
  for (int j = 0; j < last; ++j) {
    const int r0 = first_ring_start + j * segments;
    const int r1 = first_ring_start + ((j + 1) % rings) * segments;
    for (int i = 0; i < segments; ++i) {
      const int i1 = (i + 1) % segments;
      faces.push_back({r0 + i, r0 + i1, r1 + i1});
      faces.push_back({r0 + i, r1 + i1, r1 + i});
    }
  }
}

}  // namespace

ManifoldMesh make_icosphere(double diameter, int subdivisions) {
  require_positive(diameter, "diameter");
  require_resolution(subdivisions, 0, "subdivisions");
  const double radius = 0.5 * diameter;
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& p : v) p = p.normalized();
  std::vector<Face> f{
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
  };
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int index = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, index);
      return index;
    };
    std::vector<Face> refined;
    refined.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const int ab = mid(tri[0], tri[1]);
      const int bc = mid(tri[1], tri[2]);
      const int ca = mid(tri[2], tri[0]);
      refined.push_back({tri[0], ab, ca});
      refined.push_back({tri[1], bc, ab});
      refined.push_back({tri[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    f = std::move(refined);
  }
  for (Vec3& p : v) p *= radius;
  return ManifoldMesh(std::move(v), std::move(f));
}

ManifoldMesh make_torus(double major_radius, double tube_radius, int major_segments,
                        int minor_segments, double minor_phase) {
  require_positive(major_radius, "major_radius");
  require_positive(tube_radius, "tube_radius");
  if (tube_radius >= major_radius) {
    throw Error(ErrorCode::InvalidArgument, "tube radius must be below major radius");
  }
  require_resolution(major_segments, 8, "major_segments");
  require_resolution(minor_segments, 8, "minor_segments");
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(major_segments) * minor_segments);
  // Ring j holds the vertices at minor angle v_j; index = j*major + i.
  for (int j = 0; j < minor_segments; ++j) {
    const double phi = 2.0 * M_PI * (j + minor_phase) / minor_segments;
    for (int i = 0; i < major_segments; ++i) {
      const double theta = 2.0 * M_PI * i / major_segments;
      const double rho = major_radius + tube_radius * std::cos(phi);
      v.emplace_back(rho * std::cos(theta), rho * std::sin(theta),
                     tube_radius * std::sin(phi));
    }
  }
  std::vector<Face> f;
  stitch_rings(f, 0, minor_segments, major_segments, true);
  return ManifoldMesh(std::move(v), std::move(f));
}

ManifoldMesh make_ring(double contact_circle_diameter, double tube_diameter,
                       RingSide side, int major_segments, int minor_segments) {
  require_positive(contact_circle_diameter, "contact_circle_diameter");
  require_positive(tube_diameter, "tube_diameter");
  const double contact_radius = 0.5 * contact_circle_diameter;
  const double tube_radius = 0.5 * tube_diameter;
  const double major = side == RingSide::Inner ? contact_radius + tube_radius
                                               : contact_radius - tube_radius;
  return make_torus(major, tube_radius, major_segments, minor_segments);
}

ManifoldMesh make_capsule(double length, double diameter, int res) {
  require_positive(length, "length");
  require_positive(diameter, "diameter");
  require_resolution(res, 2, "res");
  const double radius = 0.5 * diameter;
  const double half_barrel = 0.5 * length - radius;
  if (half_barrel < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "capsule length must be at least its diameter");
  }
  const int segments = 4 * res;
  // Latitude rings from bottom cap to top cap, excluding the poles.
  std::vector<std::pair<double, double>> rings;  // (rho, z)
  for (int k = 1; k <= res; ++k) {
    const double lat = -M_PI / 2 + (M_PI / 2) * k / res;
    rings.emplace_back(radius * std::cos(lat), -half_barrel + radius * std::sin(lat));
  }
  if (half_barrel > 0.0) {
    const int barrel_bands = std::max(1, static_cast<int>(std::ceil(
                                             2.0 * half_barrel / (M_PI * radius / (2 * res)))));
    for (int k = 1; k <= barrel_bands; ++k) {
      rings.emplace_back(radius, -half_barrel + 2.0 * half_barrel * k / barrel_bands);
    }
  }
  for (int k = 1; k < res; ++k) {
    const double lat = (M_PI / 2) * k / res;
    rings.emplace_back(radius * std::cos(lat), half_barrel + radius * std::sin(lat));
  }
  std::vector<Vec3> v;
  v.emplace_back(0.0, 0.0, -0.5 * length);
  for (const auto& [rho, z] : rings) {
    for (int i = 0; i < segments; ++i) {
      const double theta = 2.0 * M_PI * i / segments;
      v.emplace_back(rho * std::cos(theta), rho * std::sin(theta), z);
    }
  }
  const int top = static_cast<int>(v.size());
  v.emplace_back(0.0, 0.0, 0.5 * length);
  std::vector<Face> f;
  for (int i = 0; i < segments; ++i) {
    f.push_back({0, 1 + (i + 1) % segments, 1 + i});
  }
  stitch_rings(f, 1, static_cast<int>(rings.size()), segments, false);
  const int last_ring = 1 + (static_cast<int>(rings.size()) - 1) * segments;
  for (int i = 0; i < segments; ++i) {
    f.push_back({last_ring + i, last_ring + (i + 1) % segments, top});
  }
  return ManifoldMesh(std::move(v), std::move(f));
}

ManifoldMesh make_cylinder(double diameter, double length, int radial_segments,
                           int axial_segments) {
  require_positive(diameter, "diameter");
  require_positive(length, "length");
  require_resolution(radial_segments, 3, "radial_segments");
  require_resolution(axial_segments, 1, "axial_segments");
  const double radius = 0.5 * diameter;
  std::vector<Vec3> v;
  v.emplace_back(0.0, 0.0, -0.5 * length);
  for (int k = 0; k <= axial_segments; ++k) {
    const double z = -0.5 * length + length * k / axial_segments;
    for (int i = 0; i < radial_segments; ++i) {
      const double theta = 2.0 * M_PI * i / radial_segments;
      v.emplace_back(radius * std::cos(theta), radius * std::sin(theta), z);
    }
  }
  const int top = static_cast<int>(v.size());
  v.emplace_back(0.0, 0.0, 0.5 * length);
  std::vector<Face> f;
  for (int i = 0; i < radial_segments; ++i) {
    f.push_back({0, 1 + (i + 1) % radial_segments, 1 + i});
  }
  stitch_rings(f, 1, axial_segments + 1, radial_segments, false);
  const int last_ring = 1 + axial_segments * radial_segments;
  for (int i = 0; i < radial_segments; ++i) {
    f.push_back({last_ring + i, last_ring + (i + 1) % radial_segments, top});
  }
  return ManifoldMesh(std::move(v), std::move(f));
}

ManifoldMesh make_ellipsoid(double a, double b, double c, int subdivisions) {
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(c, "c");
  const ManifoldMesh unit = make_icosphere(2.0, subdivisions);
  std::vector<Vec3> v = unit.vertices();
  for (Vec3& p : v) p = p.cwiseProduct(Vec3(a, b, c));
  return ManifoldMesh(std::move(v), unit.faces());
}

ManifoldMesh make_box(const Vec3& size, int cells) {
  require_positive(size.minCoeff(), "size");
  require_resolution(cells, 1, "cells");
  const Vec3 half = 0.5 * size;
  std::vector<Vec3> v;
  std::vector<Face> f;
  // Lattice coordinates are integers in [0, cells] per axis, so shared edge
  // vertices dedupe exactly.
  std::unordered_map<long long, int> index;
  auto vertex = [&](int ix, int iy, int iz) {
    const long long key = (static_cast<long long>(ix) * (cells + 1) + iy) * (cells + 1) + iz;
    const auto it = index.find(key);
    if (it != index.end()) return it->second;
    v.emplace_back(-half.x() + size.x() * ix / cells, -half.y() + size.y() * iy / cells,
                   -half.z() + size.z() * iz / cells);
    const int id = static_cast<int>(v.size()) - 1;
    index.emplace(key, id);
    return id;
  };
  for (int axis = 0; axis < 3; ++axis) {
    const int ua = (axis + 1) % 3;
    const int va = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
          std::array<int, 4> quad;
          const int corners[4][2] = {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
          for (int k = 0; k < 4; ++k) {
            std::array<int, 3> c{};
            c[axis] = side * cells;
            c[ua] = corners[k][0];
            c[va] = corners[k][1];
            quad[k] = vertex(c[0], c[1], c[2]);
          }
          // (ua, va, axis) is right-handed, so CCW in (u, v) faces +axis.
          if (side == 1) {
            f.push_back({quad[0], quad[1], quad[2]});
            f.push_back({quad[0], quad[2], quad[3]});
          } else {
            f.push_back({quad[0], quad[2], quad[1]});
            f.push_back({quad[0], quad[3], quad[2]});
          }
        }
      }
    }
  }
  return ManifoldMesh(std::move(v), std::move(f));
}

ManifoldMesh transformed(const ManifoldMesh& mesh, const Pose& pose) {
  std::vector<Vec3> v = mesh.vertices();
  for (Vec3& p : v) p = pose.apply(p);
  return ManifoldMesh(std::move(v), mesh.faces());
}

}  // namespace rollslide
