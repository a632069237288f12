#pragma once

#include <string>
#include <vector>

#include "rollslide/integrators.hpp"

namespace rollslide {

/// Positive: separated by that distance. Negative: minus the mean depth of
/// the penetration samples.
double metric_separation(const CollisionReport& report);

/// Angle in degrees between two world-frame normals (180 is ideal).
double metric_alignment(const Vec3& z0_world, const Vec3& z1_world);
double metric_alignment(const ContactState& state);

/// accumulated_geodesic0 - accumulated_geodesic1.
double metric_slippage(const ContactState& state);

/// Tangential sliding speed sqrt(v_x^2 + v_y^2).
double metric_sliding(const Twist& V_L0L1);

struct MetricsRow {
  double t = 0.0;
  double separation = 0.0;
  double alignment = 180.0;
  double slippage = 0.0;
  double sliding = 0.0;
  double total_geodesic = 0.0;
  Vec3 centroid = Vec3::Zero();
};

/// Header plus one row per entry, every number printed with %.17g.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

}  // namespace rollslide
