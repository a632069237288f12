#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rollslide/experiment.hpp"
#include "rollslide/generators.hpp"

namespace py = pybind11;
using namespace rollslide;

namespace {

Eigen::MatrixXd vertex_array(const ManifoldMesh& m) {
  Eigen::MatrixXd out(m.num_vertices(), 3);
  for (int i = 0; i < m.num_vertices(); ++i) out.row(i) = m.vertex(i).transpose();
  return out;
}

Eigen::MatrixXi face_array(const ManifoldMesh& m) {
  Eigen::MatrixXi out(m.num_faces(), 3);
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) out(f, k) = m.faces()[f][k];
  }
  return out;
}

ManifoldMesh mesh_from_arrays(const Eigen::MatrixXd& v, const Eigen::MatrixXi& f) {
  if (v.cols() != 3 || f.cols() != 3) {
    throw Error(ErrorCode::InvalidArgument, "vertices and faces must have 3 columns");
  }
  std::vector<Vec3> vs(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) vs[i] = v.row(i).transpose();
  std::vector<Face> fs(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i) fs[i] = {f(i, 0), f(i, 1), f(i, 2)};
  return ManifoldMesh(std::move(vs), std::move(fs));
}

}  // namespace

PYBIND11_MODULE(_rollslide, m) {
  m.doc() = "Rolling and sliding contact integration on triangle meshes";

  static py::exception<Error> error_type(m, "RollslideError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::reinterpret_borrow<py::object>(error_type.ptr());
      py::object exc = cls(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init([](const Mat3& r, const Vec3& t) { return Pose{r, t}; }),
           py::arg("rotation"), py::arg("translation"))
      .def_readwrite("rotation", &Pose::rotation)
      .def_readwrite("translation", &Pose::translation)
      .def("inverse", &Pose::inverse)
      .def("apply", &Pose::apply)
      .def("matrix", &Pose::matrix)
      .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; });

  py::class_<Twist>(m, "Twist")
      .def(py::init<>())
      .def(py::init([](const Vec3& w, const Vec3& v) { return Twist{w, v}; }),
           py::arg("angular"), py::arg("linear"))
      .def_readwrite("angular", &Twist::angular)
      .def_readwrite("linear", &Twist::linear)
      .def("vector", &Twist::vector);

  m.def("exp_map", &exp_map, py::arg("xi"), py::arg("dt") = 1.0);
  m.def("log_map", &log_map);
  m.def("adjoint", &adjoint);
  m.def("rk4_pose_step", &rk4_pose_step);
  m.def("axis_angle_anti_align", &axis_angle_anti_align);
  m.def("exp_so3", &exp_so3);
  m.def("log_so3", &log_so3);

  py::class_<SurfacePoint>(m, "SurfacePoint")
      .def(py::init([](int face, const Vec3& b) { return SurfacePoint{face, b}; }),
           py::arg("face"), py::arg("barycentric"))
      .def_readwrite("face", &SurfacePoint::face)
      .def_readwrite("barycentric", &SurfacePoint::barycentric);

  py::class_<ManifoldMesh>(m, "ManifoldMesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("faces", &face_array)
      .def_property_readonly("num_vertices", &ManifoldMesh::num_vertices)
      .def_property_readonly("num_faces", &ManifoldMesh::num_faces)
      .def_property_readonly("num_edges", &ManifoldMesh::num_edges)
      .def_property_readonly("euler_characteristic", &ManifoldMesh::euler_characteristic)
      .def_property_readonly("mean_edge_length", &ManifoldMesh::mean_edge_length)
      .def("position", &ManifoldMesh::position)
      .def("vertex_normal", &ManifoldMesh::vertex_normal);

  m.def("load_obj", [](const std::string& text) { return load_obj(text); });
  m.def("save_obj", &save_obj);
  m.def("interpolated_normal", &interpolated_normal);
  m.def("make_icosphere", &make_icosphere, py::arg("diameter"), py::arg("subdivisions"));
  m.def("make_torus", &make_torus, py::arg("major_radius"), py::arg("tube_radius"),
        py::arg("major_segments"), py::arg("minor_segments"), py::arg("minor_phase") = 0.5);
  m.def(
      "make_ring",
      [](double d, double tube, const std::string& side, int major, int minor) {
        return make_ring(d, tube, side == "outer" ? RingSide::Outer : RingSide::Inner, major,
                         minor);
      },
      py::arg("contact_circle_diameter"), py::arg("tube_diameter"), py::arg("side") = "inner",
      py::arg("major_segments") = 48, py::arg("minor_segments") = 24);
  m.def("make_capsule", &make_capsule);
  m.def("make_cylinder", &make_cylinder);
  m.def("make_ellipsoid", &make_ellipsoid);

  m.def(
      "closest_point",
      [](const ManifoldMesh& mesh, const Pose& pose, const Vec3& q) {
        const ClosestPoint c = closest_point(mesh, pose, q);
        return py::make_tuple(c.point, c.distance);
      },
      py::arg("mesh"), py::arg("pose"), py::arg("query"));
  m.def(
      "collide",
      [](const ManifoldMesh& a, const Pose& pa, const ManifoldMesh& b, const Pose& pb,
         unsigned seed) {
        const CollisionReport r = collide(a, pa, b, pb, seed);
        py::dict d;
        d["status"] = r.status == ContactStatus::Penetrating ? "penetrating" : "separated";
        d["distance_or_depth"] = r.distance_or_depth;
        d["separation"] = metric_separation(r);
        d["num_penetration_points"] = r.penetration_points.size();
        return d;
      },
      py::arg("mesh_a"), py::arg("pose_a"), py::arg("mesh_b"), py::arg("pose_b"),
      py::arg("seed") = 0u);

  m.def(
      "trace_geodesic",
      [](const ManifoldMesh& mesh, const SurfacePoint& base, const Vec3& dir, double length) {
        const GeodesicTrace t = trace_geodesic(mesh, base, dir, length);
        py::dict d;
        d["end"] = t.end;
        d["end_position"] = mesh.position(t.end);
        d["end_direction"] = t.end_dir_world;
        d["length_traced"] = t.length_traced;
        d["crossed_edges"] = t.crossed_edges.size();
        d["vertex_hits"] = t.vertex_hits;
        return d;
      },
      py::arg("mesh"), py::arg("base"), py::arg("direction"), py::arg("length"));

  py::class_<SurfaceGeometry>(m, "SurfaceGeometry")
      .def(py::init<>())
      .def_readwrite("metric", &SurfaceGeometry::metric)
      .def_readwrite("curvature", &SurfaceGeometry::curvature)
      .def_readwrite("torsion", &SurfaceGeometry::torsion);

  py::class_<ParametricSurface>(m, "ParametricSurface")
      .def_static("plane", &ParametricSurface::plane)
      .def_static("sphere", &ParametricSurface::sphere)
      .def_static("hemisphere", &ParametricSurface::hemisphere)
      .def_static("cylinder", &ParametricSurface::cylinder)
      .def_static("ellipsoid", &ParametricSurface::ellipsoid)
      .def_static("torus", &ParametricSurface::torus)
      .def_property_readonly("name", &ParametricSurface::name)
      .def("position", &ParametricSurface::position)
      .def("frame", &ParametricSurface::frame)
      .def("geometry", &ParametricSurface::geometry);

  m.def("induced_contact_twist", &induced_contact_twist);
  m.def("ideal_contact_pose", &ideal_contact_pose);
  m.def(
      "solve_contact_velocities",
      [](const Twist& V, const Mat2& K0, const Mat2& K1, const Mat3& R) {
        const ContactVelocities c = solve_contact_velocities(V, K0, K1, R);
        return py::make_tuple(c.g_dot0, c.g_dot1);
      },
      py::arg("V_L0L1"), py::arg("K0"), py::arg("K1"), py::arg("R_rel"));
  m.def(
      "estimate_curvature",
      [](const ManifoldMesh& mesh, const SurfacePoint& p, const Vec3& x_hint, double h) {
        return estimate_curvature(mesh, mesh_contact_frame(mesh, p, x_hint),
                                  h > 0.0 ? h : default_curvature_step(mesh));
      },
      py::arg("mesh"), py::arg("point"), py::arg("x_hint"), py::arg("h") = 0.0);

  m.def(
      "run",
      [](const std::string& scenario, const std::string& method, const std::string& resolution,
         double dt, double duration, unsigned seed, double tube_diameter,
         const std::string& out_dir) {
        RunConfig c;
        c.scenario = parse_scenario(scenario);
        c.method = parse_method(method);
        c.resolution = parse_resolution(resolution);
        c.dt = dt;
        c.duration = duration;
        c.seed = seed;
        c.tube_diameter = tube_diameter;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        if (!out_dir.empty()) write_run(r, out_dir);
        py::dict d;
        d["summary_json"] = r.summary_json;
        std::vector<std::string> csvs;
        for (const auto& rows : r.metrics) csvs.push_back(metrics_csv(rows));
        d["metrics_csv"] = csvs;
        return d;
      },
      py::arg("scenario") = "SphereRingInside", py::arg("method") = "Geodesic",
      py::arg("resolution") = "Fine", py::arg("dt") = 0.01, py::arg("duration") = 10.0,
      py::arg("seed") = 0u, py::arg("tube_diameter") = 6.0, py::arg("out_dir") = "");
}
