#include "rollslide/hand.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rollslide/error.hpp"
#include "rollslide/generators.hpp"

namespace rollslide {

namespace {

Pose rotation_about(const Vec3& axis, double angle) {
  return {exp_so3(axis * angle), Vec3::Zero()};
}

Pose translation(const Vec3& t) { return {Mat3::Identity(), t}; }

// Joint frames in the palm frame for one finger, each with its unit axis.
struct FingerChain {
  Pose after_abduction, after_flexion, ip_joint, distal;
  Vec3 abd_axis, flex_axis, ip_axis;  // palm coordinates
};

FingerChain chain(const FingerModel& f, double q_flex, double q_abd, double q_ip) {
  FingerChain c;
  c.abd_axis = f.base.rotation * f.abduction_axis;
  c.after_abduction = f.base * rotation_about(f.abduction_axis, q_abd);
  c.flex_axis = c.after_abduction.rotation * f.flexion_axis;
  c.after_flexion = c.after_abduction * rotation_about(f.flexion_axis, q_flex);
  c.ip_joint = c.after_flexion * translation(Vec3(0.0, 0.0, f.proximal_length));
  c.ip_axis = c.ip_joint.rotation * f.ip_axis;
  c.distal = c.ip_joint * rotation_about(f.ip_axis, q_ip) * f.distal_offset;
  return c;
}

Vec6 joint_column(const Pose& link_in_palm, const Vec3& axis, const Vec3& point) {
  Vec6 spatial;
  spatial << axis, point.cross(axis);
  return adjoint(link_in_palm.inverse()) * spatial;
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void HandModel::rebuild_mesh() {
  distal_mesh = std::make_shared<const ManifoldMesh>(
      make_capsule(distal_length, distal_diameter, capsule_resolution));
}

HandModel make_hand(const HandLayout& layout) {
  if (!(layout.finger_spacing > 0.0) || !(layout.base_offset >= 0.0) ||
      !(layout.proximal_length > 0.0) || !(layout.distal_length > layout.distal_diameter) ||
      !(layout.distal_diameter > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid hand layout");
  }
  HandModel hand;
  hand.distal_length = layout.distal_length;
  hand.distal_diameter = layout.distal_diameter;
  hand.capsule_resolution = layout.capsule_resolution;
  for (int k = 0; k < kNumFingers; ++k) {
    FingerModel& f = hand.fingers[k];
    const double side = (k % 2 == 0) ? -1.0 : 1.0;
    f.base.translation = Vec3((k - 1.5) * layout.finger_spacing, side * layout.base_offset, 0.0);
    // Positive flexion tips the finger towards y = 0 on either side.
    if (side < 0.0) f.base.rotation = exp_so3(Vec3(0.0, 0.0, M_PI));
    f.proximal_length = layout.proximal_length;
    f.distal_offset = translation(Vec3(0.0, 0.0, 0.5 * layout.distal_length));
  }
  hand.rebuild_mesh();
  return hand;
}

HandLayout parse_hand_layout(const std::string& json_text) {
  HandLayout layout;
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    read_opt(j, "finger_spacing", layout.finger_spacing);
    read_opt(j, "base_offset", layout.base_offset);
    read_opt(j, "proximal_length", layout.proximal_length);
    read_opt(j, "distal_length", layout.distal_length);
    read_opt(j, "distal_diameter", layout.distal_diameter);
    read_opt(j, "capsule_resolution", layout.capsule_resolution);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("hand config: ") + e.what());
  }
  make_hand(layout);  // validates
  return layout;
}

HandLayout load_hand_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hand_layout(ss.str());
}

std::string hand_layout_json(const HandLayout& layout) {
  nlohmann::ordered_json j;
  j["finger_spacing"] = layout.finger_spacing;
  j["base_offset"] = layout.base_offset;
  j["proximal_length"] = layout.proximal_length;
  j["distal_length"] = layout.distal_length;
  j["distal_diameter"] = layout.distal_diameter;
  j["capsule_resolution"] = layout.capsule_resolution;
  return j.dump(2);
}

HandVector HandConfig::to_vector() const {
  HandVector u;
  u << log_so3(palm.rotation), palm.translation, joints;
  return u;
}

HandConfig HandConfig::from_vector(const HandVector& u) {
  HandConfig c;
  c.palm.rotation = exp_so3(u.head<3>());
  c.palm.translation = u.segment<3>(3);
  c.joints = u.tail<kNumFingers * kJointsPerFinger>();
  return c;
}

double& joint(HandConfig& c, int finger, int j) {
  return c.joints[finger * kJointsPerFinger + j];
}

HandConfig integrate(const HandConfig& config, const HandVector& u_dot, double dt) {
  HandConfig out = config;
  out.palm = config.palm * exp_map(Twist::from_vector(u_dot.head<6>()), dt);
  out.palm.rotation = nearest_rotation(out.palm.rotation);
  out.joints += u_dot.tail<kNumFingers * kJointsPerFinger>() * dt;
  return out;
}

HandPoses forward_kinematics(const HandModel& hand, const HandConfig& config) {
  HandPoses out;
  out.palm = config.palm;
  for (int k = 0; k < kNumFingers; ++k) {
    const auto* q = config.joints.data() + k * kJointsPerFinger;
    const FingerChain c = chain(hand.fingers[k], q[0], q[1], q[2]);
    out.fingers[k].proximal = config.palm * c.after_flexion;
    out.fingers[k].distal = config.palm * c.distal;
  }
  return out;
}

Eigen::Matrix<double, 6, kHandDof> distal_body_jacobian(const HandModel& hand,
                                                        const HandConfig& config,
                                                        int finger) {
  if (finger < 0 || finger >= kNumFingers) {
    throw Error(ErrorCode::InvalidArgument, "finger index out of range");
  }
  const auto* q = config.joints.data() + finger * kJointsPerFinger;
  const FingerModel& f = hand.fingers[finger];
  const FingerChain c = chain(f, q[0], q[1], q[2]);
  Eigen::Matrix<double, 6, kHandDof> J = Eigen::Matrix<double, 6, kHandDof>::Zero();
  J.leftCols<6>() = adjoint(c.distal.inverse());
  const int col = 6 + finger * kJointsPerFinger;
  J.col(col) = joint_column(c.distal, c.flex_axis, c.after_abduction.translation);
  J.col(col + 1) = joint_column(c.distal, c.abd_axis, f.base.translation);
  J.col(col + 2) = joint_column(c.distal, c.ip_axis, c.ip_joint.translation);
  return J;
}

ContactJacobians contact_jacobians(const HandModel& hand, const HandConfig& config,
                                   const Pose& object_pose,
                                   const std::vector<ContactState>& contacts,
                                   const std::vector<int>& fingers) {
  if (contacts.size() != fingers.size()) {
    throw Error(ErrorCode::InvalidArgument, "one finger index per contact required");
  }
  const HandPoses poses = forward_kinematics(hand, config);
  const int n = static_cast<int>(contacts.size());
  ContactJacobians out{Eigen::MatrixXd::Zero(6 * n, kHandDof), Eigen::MatrixXd::Zero(6 * n, 6)};
  for (int i = 0; i < n; ++i) {
    const Pose& T_WB1 = poses.fingers[fingers[i]].distal;
    const Pose T_L1B1 = contacts[i].frame1.pose().inverse();
    const Pose T_L1B0 = T_L1B1 * T_WB1.inverse() * object_pose;
    out.J_H.middleRows<6>(6 * i) =
        adjoint(T_L1B1) * distal_body_jacobian(hand, config, fingers[i]);
    out.J_O.middleRows<6>(6 * i) = -adjoint(T_L1B0);
  }
  return out;
}

}  // namespace rollslide
