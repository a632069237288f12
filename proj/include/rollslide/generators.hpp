#pragma once

#include "rollslide/mesh.hpp"

namespace rollslide {

/// Icosahedron refined `subdivisions` times; every vertex lies on the sphere.
/// Yields 10*4^n + 2 vertices.
ManifoldMesh make_icosphere(double diameter, int subdivisions);

/// Torus around the z axis. `minor_phase` shifts the tube rings by that
/// fraction of a minor segment (0.5 keeps the equators inside face strips).
ManifoldMesh make_torus(double major_radius, double tube_radius, int major_segments,
                        int minor_segments, double minor_phase = 0.5);

enum class RingSide { Inner, Outer };

/// Torus whose inner (hole-side) or outer equator has the given diameter.
ManifoldMesh make_ring(double contact_circle_diameter, double tube_diameter,
                       RingSide side, int major_segments, int minor_segments);

/// Capsule along z centered at the origin; `length` is tip to tip. `res` is
/// the number of latitude bands per hemispherical cap.
ManifoldMesh make_capsule(double length, double diameter, int res);

/// Capped cylinder along z centered at the origin.
ManifoldMesh make_cylinder(double diameter, double length, int radial_segments,
                           int axial_segments);

/// Icosphere scaled to semi-axes (a, b, c).
ManifoldMesh make_ellipsoid(double a, double b, double c, int subdivisions);

/// Axis-aligned box centered at the origin; each face is a `cells` x `cells`
/// grid.
ManifoldMesh make_box(const Vec3& size, int cells);

/// Copy of `mesh` with every vertex mapped through `pose`.
ManifoldMesh transformed(const ManifoldMesh& mesh, const Pose& pose);

}  // namespace rollslide
