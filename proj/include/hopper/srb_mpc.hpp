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

#ifndef HOPPER_SRB_MPC_HPP_
#define HOPPER_SRB_MPC_HPP_

// Convex MPC on the planar single rigid body. The state is stacked as
// x = [p_c (2), theta, v_c (2), theta_dot] and the input is the ground
// reaction force f acting on the robot at the foothold:
//
//   p_c'' = f / m + g,     I theta'' = (p_f - p_c) ^ f.

#include <cstdint>
#include <vector>

#include "hopper/horizon.hpp"
#include "hopper/qp.hpp"
#include "hopper/types.hpp"

namespace hopper {

using Mat62 = Eigen::Matrix<double, 6, 2>;

struct MpcWeights {
  Vec6 Q = (Vec6() << 10.0, 10.0, 1.0, 1.0, 0.0, 0.1).finished();
  Vec2 R_f{1e-5, 1e-5};
  Vec2 R_tau{1e-5, 1e-5};
  double gamma = 0.95;
  int N = 10;

  void validate() const;
};

struct SrbModel {
  double mass = 2.5;
  double inertia = 0.05;
  Vec2 gravity{0.0, -9.81};
  double mu = 0.7;
  double f_max = 10.0 * 2.5 * 9.81;
};

/// f_max defaults to ten body weights.
SrbModel make_srb_model(const RobotConstants& constants);

/// Continuous vector field of the rigid body.
Vec6 srb_vector_field(const Vec6& x, const Vec2& f, const Vec2& foot, const SrbModel& model);

struct ContinuousSrb {
  Mat6 A = Mat6::Zero();
  Mat62 B = Mat62::Zero();
  Vec6 d = Vec6::Zero();
};

/// First-order expansion of the vector field at (x_ref, f_ref) with the
/// foothold fixed: xdot ~= A x + B f + d. In flight the force is zero and
/// B = 0.
ContinuousSrb srb_continuous(const Vec6& x_ref, const Vec2& foot_ref, const Vec2& f_ref,
                             const SrbModel& model, bool contact);

struct LtvStep {
  Mat6 A = Mat6::Identity();
  Mat62 B = Mat62::Zero();
  Vec6 d = Vec6::Zero();
  double dt = 0.0;
  bool contact = false;
  double f_max = 0.0;
};

/// Forward Euler on the extended system: A_k = I + dt A_c, B_k = dt B_c,
/// d_k = dt d_c.
LtvStep linearize_discretize(const Vec6& x_ref, const Vec2& foot_ref, const Vec2& f_ref,
                             const SrbModel& model, double dt, bool contact);

/// Linearizes every horizon step and folds the discretization defect of the
/// reference into d_k, so that (x_ref, f_ref) is an exact trajectory of the
/// discrete model.
std::vector<LtvStep> reference_ltv(const HorizonReference& ref, const SrbModel& model);

/// Decision layout [x_1 .. x_N, f_0 .. f_{N-1}]; rows are 6N dynamics
/// equalities followed by 3 force rows per step (two cone faces, normal
/// force bound).
struct SrbIndexMap {
  int N = 0;

  int state(int k) const { return 6 * (k - 1); }  // k = 1..N
  int force(int k) const { return 6 * N + 2 * k; }  // k = 0..N-1
  int num_variables() const { return 8 * N; }
  int dynamics_row(int k) const { return 6 * k; }  // x_{k+1} row block
  int force_row(int k) const { return 6 * N + 3 * k; }
  int num_constraints() const { return 9 * N; }
};

struct SrbQp {
  QpProblem problem;
  SrbIndexMap index;
  std::vector<LtvStep> ltv;
};

/// Transcribes the horizon into a QP. The objective is
/// sum_k gamma^k (|x_k - x_ref|_Q^2 + |f_k - f_ref|_Rf^2) over k = 0..N-1 with
/// the terminal state weighted by gamma^N Q; the fixed x_0 term is dropped.
/// The sparsity pattern depends on N only.
SrbQp build_srb_qp(const HorizonReference& ref, const MpcWeights& weights, const SrbModel& model);

/// Stance and flight rows differ in scale by orders of magnitude; a fixed rho
/// stalls on either one.
inline SolverSettings srb_qp_defaults() {
  SolverSettings s;
  s.adaptive_rho = true;
  return s;
}

/// Horizon solution shared by both layers. Joint fields are empty for the
/// rigid-body layer and hold zeros on flight steps for the kinodynamic one.
struct MpcSolution {
  double t0 = 0.0;
  std::vector<HorizonStep> steps;
  std::vector<Vec6> states;  // x_0 .. x_N
  std::vector<Vec2> grf;     // f_0 .. f_{N-1}
  std::vector<Vec2> q;
  std::vector<Vec2> tau;
  QpStatus status = QpStatus::kMaxIter;
  int iterations = 0;  // QP iterations, summed over SQP steps
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  double max_violation = 0.0;  // kinodynamic constraint violation
  bool degraded = false;
  bool ik_clamped = false;
  Eigen::VectorXd qp_x;
  Eigen::VectorXd qp_y;

  bool empty() const { return states.empty(); }
  /// Linear interpolation of the state trajectory at absolute time t.
  Vec6 state_at(double t) const;
  /// Force of the step containing t (zero-order hold).
  Vec2 grf_at(double t) const;
};

/// Solves the QP, warm-started from `previous` resampled onto the new grid
/// when given. Unpacks states, forces and statistics.
MpcSolution solve_srb(const SrbQp& qp, const HorizonReference& ref, const MpcSolution* previous,
                      const SolverSettings& settings);

/// Stateful wrapper that keeps the QP factorization workspace between ticks.
class SrbMpc {
 public:
  SrbMpc(SrbModel model, MpcWeights weights, SolverSettings settings);

  MpcSolution solve(const HorizonReference& ref);
  const MpcSolution& last() const { return last_; }
  void reset() { last_ = MpcSolution{}; }
  const SrbModel& model() const { return model_; }
  const MpcWeights& weights() const { return weights_; }

 private:
  SrbModel model_;
  MpcWeights weights_;
  QpSolver solver_;
  MpcSolution last_;
};

/// Primal warm start for a new grid: states interpolated in time from the
/// previous horizon, forces held per step.
Eigen::VectorXd srb_warm_start(const MpcSolution& previous, const HorizonReference& ref);

}  // namespace hopper

#endif  // HOPPER_SRB_MPC_HPP_
