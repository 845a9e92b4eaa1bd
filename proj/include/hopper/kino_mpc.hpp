// Copyright 2026 The UPS Hopper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOPPER_KINO_MPC_HPP_
#define HOPPER_KINO_MPC_HPP_

// Kinodynamic MPC: the rigid-body horizon augmented with joint angles and
// motor torques on stance steps, coupled through foot kinematics and the
// massless-leg torque map with the knee spring,
//
//   p_f = FK(p_c, theta, q),     tau + tau_s(q) = -S J(theta, q)^T f,
//
// solved by a fixed number of Gauss-Newton SQP iterations.

#include <vector>

#include "hopper/kinematics.hpp"
#include "hopper/srb_mpc.hpp"

namespace hopper {

struct KinoModel {
  SrbModel srb;
  LegGeometry leg;
  UpsModel ups;
  Vec2 q_min{0.0, -2.45};
  Vec2 q_max{1.5707963267948966, -0.85};
  Vec2 tau_max{25.0, 25.0};
};

KinoModel make_kino_model(const RobotConstants& constants, const LegGeometry& leg,
                          const UpsModel& ups);

/// Per-variable trust region on one SQP step.
struct TrustBox {
  double position = 0.2;   // [m]
  double pitch = 0.2;      // [rad]
  double velocity = 2.0;   // [m/s]
  double pitch_rate = 5.0; // [rad/s]
  double force = 50.0;     // [N]
  double joint = 0.1;      // [rad]
  double torque = 25.0;    // [N m]
};

/// The torque rows are in N m and the ADMM tolerance alone leaves them short
/// of the constraint tolerance; the active-set polish closes them.
inline SolverSettings kino_qp_defaults() {
  SolverSettings s;
  s.adaptive_rho = true;
  s.polish = true;
  return s;
}

struct SqpSettings {
  int outer_iterations = 2;
  double constraint_tolerance = 1e-3;
  double gn_damping = 1e-6;
  TrustBox trust_box;
  SolverSettings qp = kino_qp_defaults();

  void validate() const;
};

/// Decision layout: [x_1 .. x_N, f_0 .. f_{N-1}] exactly as the rigid-body
/// layer, followed by (q_k, tau_k) for every stance step in order. Rows:
/// 6N dynamics, then (FK 2, torque 2) per stance step, then 3 force rows per
/// step.
struct KinoIndexMap {
  int N = 0;
  std::vector<int> slot;  // stance slot of step k, -1 in flight
  int stance_count = 0;

  explicit KinoIndexMap(const std::vector<HorizonStep>& steps = {});
  int state(int k) const { return 6 * (k - 1); }
  int force(int k) const { return 6 * N + 2 * k; }
  int joint(int k) const { return 8 * N + 4 * slot[k]; }
  int torque(int k) const { return joint(k) + 2; }
  int num_variables() const { return 8 * N + 4 * stance_count; }
  int dynamics_row(int k) const { return 6 * k; }
  int fk_row(int k) const { return 6 * N + 4 * slot[k]; }
  int torque_row(int k) const { return fk_row(k) + 2; }
  int force_row(int k) const { return 6 * N + 4 * stance_count + 3 * k; }
  int num_constraints() const { return 9 * N + 4 * stance_count; }
};

/// Horizon data fixed during one solve.
struct KinoData {
  HorizonReference ref;
  std::vector<LtvStep> ltv;
  KinoIndexMap index;
};

KinoData make_kino_data(const HorizonReference& ref, const KinoModel& model);

/// Constraint values c(z) with bounds lower <= c(z) <= upper and the sparse
/// Jacobian dc/dz. Equality rows have lower = upper = 0.
struct ConstraintEval {
  Eigen::VectorXd value;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  SparseMatrix jacobian;

  /// Largest bound violation over all rows.
  double max_violation() const;
};

ConstraintEval evaluate_constraints(const Eigen::VectorXd& z, const KinoData& data,
                                    const KinoModel& model);

/// Variable bounds: joint limits on q, torque limits on tau, free otherwise.
void variable_bounds(const KinoData& data, const KinoModel& model, Eigen::VectorXd& lower,
                     Eigen::VectorXd& upper);

/// Horizon objective, its gradient and its (constant, diagonal) Hessian.
double kino_objective(const Eigen::VectorXd& z, const KinoData& data, const MpcWeights& weights);
Eigen::VectorXd kino_gradient(const Eigen::VectorXd& z, const KinoData& data,
                              const MpcWeights& weights);
SparseMatrix kino_hessian(const KinoData& data, const MpcWeights& weights);

/// QP in the step d: Gauss-Newton Hessian plus damping, linearized
/// constraints, and the trust box intersected with the variable bounds as
/// trailing identity rows.
QpProblem build_sqp_subproblem(const Eigen::VectorXd& z, const ConstraintEval& eval,
                               const KinoData& data, const KinoModel& model,
                               const MpcWeights& weights, const SqpSettings& settings);

/// Initial iterate: states and forces from the rigid-body solution, joint
/// angles by IK to the foothold and torques from the torque map. Sets
/// `ik_clamped` when a foothold had to be projected into the workspace.
Eigen::VectorXd kino_initial_guess(const KinoData& data, const MpcSolution& srb,
                                   const KinoModel& model, bool& ik_clamped);

/// Stateful SQP solver; carries QP duals between ticks when the stance
/// pattern is unchanged.
class KinoMpc {
 public:
  KinoMpc(KinoModel model, MpcWeights weights, SqpSettings settings);

  MpcSolution solve(const HorizonReference& ref, const MpcSolution& srb);
  const MpcSolution& last() const { return last_; }
  const KinoModel& model() const { return model_; }
  KinoModel& model() { return model_; }
  const SqpSettings& settings() const { return settings_; }

 private:
  KinoModel model_;
  MpcWeights weights_;
  SqpSettings settings_;
  QpSolver solver_;
  std::vector<int> solver_slots_;
  Eigen::VectorXd duals_;
  MpcSolution last_;
};

/// One-shot solve.
MpcSolution solve_kino(const HorizonReference& ref, const MpcSolution& srb,
                       const KinoModel& model, const MpcWeights& weights,
                       const SqpSettings& settings);

/// Motor torque to apply from step k of a kinodynamic solution, clamped to
/// the limits. Throws std::logic_error on a flight step.
Vec2 torque_extraction(const MpcSolution& solution, const Vec2& tau_max, int k = 0);

}  // namespace hopper

#endif  // HOPPER_KINO_MPC_HPP_
