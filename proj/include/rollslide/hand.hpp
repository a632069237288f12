#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "rollslide/integrators.hpp"

namespace rollslide {

constexpr int kNumFingers = 4;
constexpr int kJointsPerFinger = 3;
constexpr int kHandDof = 6 + kNumFingers * kJointsPerFinger;

using HandVector = Eigen::Matrix<double, kHandDof, 1>;
using JointVector = Eigen::Matrix<double, kNumFingers * kJointsPerFinger, 1>;

/// One 3-DoF finger. Joint order in configuration vectors is
/// (MCP flexion, MCP abduction, IP flexion); the chain applies abduction
/// first, then flexion, then the proximal link along the base z axis, then
/// the IP joint.
struct FingerModel {
  Pose base;  // in the palm frame
  Vec3 abduction_axis = Vec3::UnitY();
  Vec3 flexion_axis = Vec3::UnitX();
  Vec3 ip_axis = Vec3::UnitX();
  double proximal_length = 40.0;
  Pose distal_offset;  // IP joint frame -> distal link (capsule) frame
};

/// Floating palm plus four fingers with capsule distal links.
struct HandModel {
  std::array<FingerModel, kNumFingers> fingers;
  double distal_length = 30.0;    // capsule tip to tip
  double distal_diameter = 14.0;
  int capsule_resolution = 8;
  std::shared_ptr<const ManifoldMesh> distal_mesh;  // shared by all fingers

  void rebuild_mesh();
};

/// Hand layout parameters; see README for the JSON schema.
struct HandLayout {
  double finger_spacing = 22.0;  // along palm x
  double base_offset = 30.0;     // |y| of the finger bases
  double proximal_length = 40.0;
  double distal_length = 30.0;
  double distal_diameter = 14.0;
  int capsule_resolution = 8;
};

/// Fingers at x = (k - 1.5) * spacing, alternating sides y = -/+ offset,
/// pointing along palm +z and flexing towards the palm's x axis.
HandModel make_hand(const HandLayout& layout = {});

HandLayout parse_hand_layout(const std::string& json_text);
HandLayout load_hand_layout(const std::filesystem::path& path);
std::string hand_layout_json(const HandLayout& layout);

/// Palm pose plus joint angles (rad).
struct HandConfig {
  Pose palm;
  JointVector joints = JointVector::Zero();

  /// (palm rotation vector, palm translation, joints).
  HandVector to_vector() const;
  static HandConfig from_vector(const HandVector& u);
};

double& joint(HandConfig& c, int finger, int j);

/// Applies a rate vector (palm body twist, joint rates) for dt.
HandConfig integrate(const HandConfig& config, const HandVector& u_dot, double dt);

struct FingerPoses {
  Pose proximal;  // after MCP flexion
  Pose distal;    // capsule frame
};

struct HandPoses {
  Pose palm;
  std::array<FingerPoses, kNumFingers> fingers;
};

HandPoses forward_kinematics(const HandModel& hand, const HandConfig& config);

/// 6 x 18 body Jacobian of a finger's distal link: its body twist equals
/// J * u_dot with u_dot = (palm body twist, joint rates).
Eigen::Matrix<double, 6, kHandDof> distal_body_jacobian(const HandModel& hand,
                                                        const HandConfig& config,
                                                        int finger);

struct ContactJacobians {
  Eigen::MatrixXd J_H;  // 6c x 18
  Eigen::MatrixXd J_O;  // 6c x 6
};

/// Stacked maps from hand rates and object body twist to each contact's
/// relative twist. contacts[i] pairs the object (body0) with the distal link
/// of fingers[i] (body1).
ContactJacobians contact_jacobians(const HandModel& hand, const HandConfig& config,
                                   const Pose& object_pose,
                                   const std::vector<ContactState>& contacts,
                                   const std::vector<int>& fingers);

}  // namespace rollslide
