#include "rollslide/planner.hpp"

#include <Eigen/Dense>

#include "rollslide/error.hpp"

namespace rollslide {

namespace {

constexpr double kRankTol = 1e-10;
constexpr int kAngZ = 2, kLinX = 3, kLinY = 4, kLinZ = 5;

}  // namespace

QuadraticProgram build_program(const PlanInput& input) {
  const Eigen::Index rows = input.J_H.rows();
  if (rows == 0 || rows % 6 != 0 || input.J_H.cols() != kHandDof ||
      input.J_O.rows() != rows || input.J_O.cols() != 6) {
    throw Error(ErrorCode::InvalidArgument, "planner Jacobians have inconsistent shapes");
  }
  const int n = static_cast<int>(rows / 6);
  if (!input.targets.empty() && static_cast<int>(input.targets.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "one target per contact required");
  }
  if (input.weights.w_palm < 0.0 || input.weights.w_smooth < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "planner weights must be nonnegative");
  }
  QuadraticProgram qp;
  qp.Q = Eigen::MatrixXd::Zero(kHandDof, kHandDof);
  qp.c = Eigen::VectorXd::Zero(kHandDof);
  qp.A.resize(n, kHandDof);
  qp.b.resize(n);
  const Eigen::VectorXd drift = input.J_O * input.object_twist;
  for (int i = 0; i < n; ++i) {
    const Vec6 target = input.targets.empty() ? Vec6::Zero() : input.targets[i].vector();
    for (int r : {kAngZ, kLinX, kLinY}) {
      const Eigen::RowVectorXd row = input.J_H.row(6 * i + r);
      const double rhs = target[r] - drift[6 * i + r];
      qp.Q.noalias() += 2.0 * row.transpose() * row;
      qp.c.noalias() += 2.0 * rhs * row.transpose();
      qp.constant += rhs * rhs;
    }
    qp.A.row(i) = input.J_H.row(6 * i + kLinZ);
    qp.b[i] = target[kLinZ] - drift[6 * i + kLinZ];
  }
  for (int k = 0; k < 6; ++k) qp.Q(k, k) += 2.0 * input.weights.w_palm;
  qp.Q.diagonal().array() += 2.0 * input.weights.w_smooth;
  qp.c += 2.0 * input.weights.w_smooth * input.u_dot_prev;
  qp.constant += input.weights.w_smooth * input.u_dot_prev.squaredNorm();
  return qp;
}

double plan_objective(const QuadraticProgram& qp, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(qp.Q * x) - qp.c.dot(x) + qp.constant;
}

PlanResult plan_step(const PlanInput& input) {
  const QuadraticProgram qp = build_program(input);
  const Eigen::Index n = qp.A.rows();
  const Eigen::Index m = kHandDof + n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  K.topLeftCorner(kHandDof, kHandDof) = qp.Q;
  K.topRightCorner(kHandDof, n) = qp.A.transpose();
  K.bottomLeftCorner(n, kHandDof) = qp.A;
  Eigen::VectorXd rhs(m);
  rhs << qp.c, qp.b;

  PlanResult out;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(qp.A);
  const auto& sv = svd.singularValues();
  out.rank_deficient = sv.size() == 0 || sv(sv.size() - 1) <= kRankTol * std::max(1.0, sv(0));

  Eigen::VectorXd sol;
  if (out.rank_deficient) {
    sol = K.completeOrthogonalDecomposition().solve(rhs);
  } else {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    sol = lu.solve(rhs);
    sol += lu.solve(rhs - K * sol);  // one step of iterative refinement
  }
  out.u_dot = sol.head(kHandDof);
  out.multipliers = sol.tail(n);
  out.stationarity_residual =
      (qp.Q * out.u_dot + qp.A.transpose() * out.multipliers - qp.c).norm();
  out.feasibility_residual = (qp.A * out.u_dot - qp.b).norm();
  out.objective = plan_objective(qp, out.u_dot);
  return out;
}

PlanResult plan_step(const HandModel& hand, const HandConfig& config,
                     const Pose& object_pose, const Vec6& object_twist,
                     const std::vector<ContactState>& contacts,
                     const std::vector<int>& fingers, const PlannerWeights& weights,
                     const HandVector& u_dot_prev, const std::vector<Twist>& targets) {
  if (contacts.empty()) throw Error(ErrorCode::InvalidArgument, "planner needs a contact");
  const ContactJacobians J = contact_jacobians(hand, config, object_pose, contacts, fingers);
  PlanInput input;
  input.J_H = J.J_H;
  input.J_O = J.J_O;
  input.object_twist = object_twist;
  input.targets = targets;
  input.u_dot_prev = u_dot_prev;
  input.weights = weights;
  return plan_step(input);
}

}  // namespace rollslide
