#include <CLI11.hpp>
#include <iostream>
#include <thread>

#include "rollslide/experiment.hpp"
#include "rollslide/generators.hpp"
#include "rollslide/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;

struct MeshArgs {
  std::string shape = "icosphere";
  std::string out;
  double diameter = 10.0;
  double tube_diameter = 6.0;
  double length = 30.0;
  std::vector<double> axes{15.0, 10.0, 10.0};
  std::string side = "inner";
  int subdivisions = 3;
  int major = 48;
  int minor = 24;
  int resolution = 8;
};

rollslide::ManifoldMesh make_mesh(const MeshArgs& a) {
  using namespace rollslide;
  if (a.shape == "icosphere") return make_icosphere(a.diameter, a.subdivisions);
  if (a.shape == "ring") {
    const RingSide side = a.side == "outer" ? RingSide::Outer : RingSide::Inner;
    if (a.side != "inner" && a.side != "outer") {
      throw Error(ErrorCode::InvalidArgument, "--side must be inner or outer");
    }
    return make_ring(a.diameter, a.tube_diameter, side, a.major, a.minor);
  }
  if (a.shape == "torus") {
    return make_torus(0.5 * a.diameter, 0.5 * a.tube_diameter, a.major, a.minor);
  }
  if (a.shape == "capsule") return make_capsule(a.length, a.diameter, a.resolution);
  if (a.shape == "cylinder") return make_cylinder(a.diameter, a.length, a.major, a.minor);
  if (a.shape == "ellipsoid") {
    if (a.axes.size() != 3) throw Error(ErrorCode::InvalidArgument, "--axes needs 3 values");
    return make_ellipsoid(a.axes[0], a.axes[1], a.axes[2], a.subdivisions);
  }
  if (a.shape == "box") {
    return make_box(Vec3(a.diameter, a.diameter, a.diameter), std::max(1, a.resolution));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown shape '" + a.shape + "'");
}

struct RunArgs {
  std::string scenario = "SphereRingInside";
  std::string method = "Geodesic";
  std::string resolution = "Fine";
  std::string out_dir = "out";
  std::string hand_config;
  rollslide::RunConfig config;
};

rollslide::RunConfig resolve(RunArgs& a) {
  using namespace rollslide;
  RunConfig c = a.config;
  c.scenario = parse_scenario(a.scenario);
  c.method = parse_method(a.method);
  c.resolution = parse_resolution(a.resolution);
  if (!a.hand_config.empty()) c.hand = load_hand_layout(a.hand_config);
  c.validate();
  return c;
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--dt", a.config.dt, "Step size in seconds")->capture_default_str();
  cmd->add_option("--duration", a.config.duration, "Simulated time in seconds")
      ->capture_default_str();
  cmd->add_option("--seed", a.config.seed, "Seed for query tie-breaks")->capture_default_str();
  cmd->add_option("--tube-diameter", a.config.tube_diameter, "Ring tube diameter (mm)")
      ->capture_default_str();
  cmd->add_option("--k-omega", a.config.gains.k_omega, "Stabilizer angular gain per step")
      ->capture_default_str();
  cmd->add_option("--k-v", a.config.gains.k_v, "Stabilizer linear gain per step")
      ->capture_default_str();
  cmd->add_option("--w-palm", a.config.weights.w_palm, "Palm velocity penalty")
      ->capture_default_str();
  cmd->add_option("--w-smooth", a.config.weights.w_smooth, "Velocity change penalty")
      ->capture_default_str();
  cmd->add_option("--hand-config", a.hand_config, "Hand layout JSON file");
  cmd->add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rollslide;
  CLI::App app{"Rolling and sliding contact on triangle meshes"};
  app.require_subcommand(1);

  MeshArgs mesh;
  auto* gen = app.add_subcommand("gen-mesh", "Write a procedural mesh as OBJ");
  gen->add_option("--shape", mesh.shape,
                  "icosphere | torus | ring | capsule | cylinder | ellipsoid | box")
      ->capture_default_str();
  gen->add_option("--out", mesh.out, "Output OBJ path")->required();
  gen->add_option("--diameter", mesh.diameter, "Diameter, ring contact circle or box edge (mm)")
      ->capture_default_str();
  gen->add_option("--tube-diameter", mesh.tube_diameter, "Torus/ring tube diameter (mm)")
      ->capture_default_str();
  gen->add_option("--length", mesh.length, "Capsule or cylinder length (mm)")
      ->capture_default_str();
  gen->add_option("--axes", mesh.axes, "Ellipsoid semi-axes a b c (mm)")->expected(3);
  gen->add_option("--side", mesh.side, "Ring contact side: inner | outer")->capture_default_str();
  gen->add_option("--subdivisions", mesh.subdivisions, "Icosphere/ellipsoid refinement")
      ->capture_default_str();
  gen->add_option("--major", mesh.major, "Torus major or cylinder radial segments")
      ->capture_default_str();
  gen->add_option("--minor", mesh.minor, "Torus minor or cylinder axial segments")
      ->capture_default_str();
  gen->add_option("--res", mesh.resolution, "Capsule cap bands or box cells")
      ->capture_default_str();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its outputs");
  run_cmd->add_option("--scenario", run_args.scenario,
                      "SphereRingInside | SphereRingOutside | GraspCylinder | GraspEllipsoid")
      ->capture_default_str();
  run_cmd->add_option("--method", run_args.method, "Geodesic | Collision | Primitive")
      ->capture_default_str();
  run_cmd->add_option("--resolution", run_args.resolution, "Fine | Medium | Coarse")
      ->capture_default_str();
  add_run_options(run_cmd, run_args);

  RunArgs cmp_args;
  std::vector<std::string> runs;
  std::vector<std::string> methods;
  std::vector<std::string> resolutions;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* cmp = app.add_subcommand(
      "compare", "Tabulate existing run directories, or run a method x resolution matrix");
  cmp->add_option("--runs", runs, "Run directories containing summary.json");
  cmp->add_option("--scenario", cmp_args.scenario, "Scenario for the matrix")
      ->capture_default_str();
  cmp->add_option("--methods", methods, "Methods for the matrix")->delimiter(',');
  cmp->add_option("--resolutions", resolutions, "Resolutions for the matrix")->delimiter(',');
  cmp->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str();
  add_run_options(cmp, cmp_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  // Config problems exit 2; failures while stepping exit 3.
  try {
    if (*gen) {
      save_obj_file(make_mesh(mesh), mesh.out);
      return kExitOk;
    }
    if (*run_cmd) {
      const RunConfig config = resolve(run_args);
      RunResult result;
      try {
        result = run(config);
      } catch (const IntegrationFailure& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return kExitIntegration;
      }
      write_run(result, run_args.out_dir);
      std::cout << result.summary_json;
      return kExitOk;
    }
    if (*cmp) {
      std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
      if (!methods.empty() || !resolutions.empty()) {
        if (methods.empty()) methods = {"Geodesic", "Collision", "Primitive"};
        if (resolutions.empty()) resolutions = {"Fine", "Medium", "Coarse"};
        std::vector<RunConfig> configs;
        for (const auto& m : methods) {
          for (const auto& r : resolutions) {
            RunArgs a = cmp_args;
            a.method = m;
            a.resolution = r;
            configs.push_back(resolve(a));
          }
        }
        std::vector<RunResult> results;
        try {
          results = run_many(configs, jobs);
        } catch (const IntegrationFailure& e) {
          std::cerr << "integration failed: " << e.what() << '\n';
          return kExitIntegration;
        }
        for (const RunResult& r : results) {
          const std::filesystem::path dir =
              std::filesystem::path(cmp_args.out_dir) / run_name(r.config);
          write_run(r, dir);
          dirs.push_back(dir);
        }
      }
      if (dirs.empty()) {
        std::cerr << "compare: give --runs or --methods/--resolutions\n";
        return kExitConfig;
      }
      std::cout << compare_table(dirs);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
