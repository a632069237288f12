#pragma once

#include "rollslide/hand.hpp"

namespace rollslide {

struct PlannerWeights {
  double w_palm = 10.0;
  double w_smooth = 1.0;
};

/// Per-contact targets for the relative twist rows; the planner drives
/// (w_z, v_x, v_y) towards `target` in least squares and enforces
/// v_z == target.v_z exactly. Zero targets give the plain rolling objective.
struct PlanInput {
  Eigen::MatrixXd J_H;               // 6c x 18
  Eigen::MatrixXd J_O;               // 6c x 6
  Vec6 object_twist = Vec6::Zero();  // object body twist
  std::vector<Twist> targets;        // empty means all zero
  HandVector u_dot_prev = HandVector::Zero();
  PlannerWeights weights;
};

struct PlanResult {
  HandVector u_dot = HandVector::Zero();
  Eigen::VectorXd multipliers;
  bool rank_deficient = false;
  double stationarity_residual = 0.0;
  double feasibility_residual = 0.0;
  double objective = 0.0;
};

/// Dense quadratic-program pieces: minimize 0.5 x'Qx - c'x s.t. A x = b.
struct QuadraticProgram {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double constant = 0.0;  // objective offset so that value matches the cost
};

QuadraticProgram build_program(const PlanInput& input);

/// Objective value of the planner cost at x.
double plan_objective(const QuadraticProgram& qp, const Eigen::VectorXd& x);

/// KKT solve. Dependent constraint rows (relative singular value below
/// 1e-10) set `rank_deficient` and switch to a minimum-norm least-squares
/// solve of the KKT system.
PlanResult plan_step(const PlanInput& input);

/// Convenience overload that assembles the Jacobians.
PlanResult plan_step(const HandModel& hand, const HandConfig& config,
                     const Pose& object_pose, const Vec6& object_twist,
                     const std::vector<ContactState>& contacts,
                     const std::vector<int>& fingers, const PlannerWeights& weights,
                     const HandVector& u_dot_prev, const std::vector<Twist>& targets = {});

}  // namespace rollslide
