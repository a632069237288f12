#include "rollslide/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr const char* kHeader =
    "t,separation,alignment,slippage,sliding,total_geodesic,centroid_x,centroid_y,centroid_z";

void append_number(std::string& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

}  // namespace

double metric_separation(const CollisionReport& report) {
  if (report.status == ContactStatus::Separated) return report.distance_or_depth;
  if (report.penetration_points.empty()) return 0.0;
  double sum = 0.0;
  for (const PenetrationPoint& p : report.penetration_points) sum += p.depth;
  return -sum / static_cast<double>(report.penetration_points.size());
}

double metric_alignment(const Vec3& z0_world, const Vec3& z1_world) {
  const Vec3 a = z0_world.normalized();
  const Vec3 b = z1_world.normalized();
  return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / M_PI;
}

double metric_alignment(const ContactState& state) {
  return metric_alignment(state.world_frame0().rotation.col(2),
                          state.world_frame1().rotation.col(2));
}

double metric_slippage(const ContactState& state) {
  return state.accumulated_geodesic0 - state.accumulated_geodesic1;
}

double metric_sliding(const Twist& V_L0L1) { return V_L0L1.linear.head<2>().norm(); }

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = kHeader;
  out += '\n';
  for (const MetricsRow& r : rows) {
    const double values[] = {r.t,       r.separation,     r.alignment,
                             r.slippage, r.sliding,       r.total_geodesic,
                             r.centroid.x(), r.centroid.y(), r.centroid.z()};
    for (std::size_t i = 0; i < std::size(values); ++i) {
      if (i) out += ',';
      append_number(out, values[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error(ErrorCode::ParseError, "metrics CSV header mismatch");
  }
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[9];
    int n = 0;
    while (std::getline(ls, cell, ',')) {
      if (n >= 9) break;
      try {
        v[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad number on CSV line " + std::to_string(line_no));
      }
    }
    if (n != 9) {
      throw Error(ErrorCode::ParseError, "expected 9 columns on CSV line " + std::to_string(line_no));
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], Vec3(v[6], v[7], v[8])});
  }
  return rows;
}

}  // namespace rollslide
