#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rollslide/error.hpp"
#include "rollslide/metrics.hpp"
#include "rollslide/planner.hpp"

namespace rollslide {

enum class Scenario { SphereRingInside, SphereRingOutside, GraspCylinder, GraspEllipsoid };
enum class Method { Geodesic, Collision, Primitive };
enum class Resolution { Fine, Medium, Coarse };

std::string to_string(Scenario s);
std::string to_string(Method m);
std::string to_string(Resolution r);
Scenario parse_scenario(const std::string& s);
Method parse_method(const std::string& s);
Resolution parse_resolution(const std::string& s);

struct RunConfig {
  Scenario scenario = Scenario::SphereRingInside;
  Method method = Method::Geodesic;
  Resolution resolution = Resolution::Fine;
  double dt = 0.01;        // s
  double duration = 10.0;  // s
  StabilizerGains gains;
  PlannerWeights weights;
  unsigned seed = 0;
  double tube_diameter = 6.0;  // mm
  HandLayout hand;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
  /// floor(duration / dt), robust to representation error.
  long steps() const;
};

/// Mesh sizes of a resolution tier.
struct ResolutionTier {
  int sphere_subdivisions;
  int torus_major;
  int torus_minor;
};
ResolutionTier resolution_tier(Resolution r);

/// Analytic pure-rolling reference for the sphere-on-ring runs.
struct RingRolling {
  double contact_radius = 10.0;  // mm
  double sphere_radius = 5.0;    // mm
  double center_radius = 0.0;    // orbit radius of the sphere's center
  double omega_z = 0.0;          // rad/s, world angular velocity of the sphere
  double contact_speed = 0.0;    // mm/s along the ring
};
/// One revolution of the contact around the ring in `period` seconds.
RingRolling ring_rolling(bool inside, double period, double contact_radius = 10.0,
                         double sphere_radius = 5.0);

struct RingSummary {
  long steps = 0;
  double final_total_geodesic = 0.0;
  double ground_truth = 0.0;
  double relative_error = 0.0;
  double max_abs_separation = 0.0;
  double mean_alignment_error = 0.0;  // degrees from 180
  double min_alignment = 180.0;
  double max_abs_slippage = 0.0;
  double final_slippage = 0.0;
  double max_sliding = 0.0;
  double centroid_radial_drift = 0.0;
};
RingSummary summarize_ring(const std::vector<MetricsRow>& rows, double ground_truth);

struct ContactSummary {
  double max_abs_separation = 0.0;
  double pre_reversal_sliding_mean = 0.0;  // over the second before reversal
  double reversal_sliding_peak = 0.0;      // over half a second after it
  double final_sliding_mean = 0.0;         // over the last second
  double max_sliding = 0.0;
  double final_total_geodesic = 0.0;
  double max_abs_slippage = 0.0;
};
ContactSummary summarize_contact(const std::vector<MetricsRow>& rows, double reversal_time,
                                 double duration);

struct RunResult {
  RunConfig config;
  std::vector<std::vector<MetricsRow>> metrics;  // one table per contact
  std::string trajectory_json;
  std::string summary_json;
  long vertex_hits = 0;
};

/// Failure inside the stepping loop; carries the step index.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(long step, const Error& cause);
  long step() const { return step_; }

 private:
  long step_;
};

/// Runs a scenario end to end. Output is a pure function of the config.
RunResult run(const RunConfig& config);

/// Writes metrics.csv (or metrics_c1.csv ... for grasps), trajectory.json and
/// summary.json into `dir`, creating it.
void write_run(const RunResult& result, const std::filesystem::path& dir);

/// Runs every config, up to `jobs` at a time. Results keep input order.
std::vector<RunResult> run_many(const std::vector<RunConfig>& configs, int jobs);

/// Conventional run directory name: scenario_method_resolution.
std::string run_name(const RunConfig& config);

/// Side-by-side table of summary.json files.
std::string compare_table(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace rollslide
