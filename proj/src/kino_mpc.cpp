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

#include "hopper/kino_mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hopper {
namespace {

using Triplet = Eigen::Triplet<double, int>;

constexpr int kAOffDiag[5][2] = {{0, 3}, {1, 4}, {2, 5}, {5, 0}, {5, 1}};
constexpr int kBEntries[4][2] = {{3, 0}, {4, 1}, {5, 0}, {5, 1}};

Vec6 state_of(const Eigen::VectorXd& z, const KinoData& d, int k) {
  return k == 0 ? d.ref.x0 : Vec6(z.segment<6>(d.index.state(k)));
}

// d(leg_chain_jacobian)/d q_hip and d/d q_knee.
std::pair<Mat2, Mat2> chain_jacobian_derivatives(const LegGeometry& leg, const Vec2& q) {
  const double a = q(0);
  const double b = q(0) + q(1);
  const double l1 = leg.thigh_length;
  const double l2 = leg.shank_length;
  Mat2 d_hip, d_knee;
  d_hip << -l1 * std::sin(a) - l2 * std::sin(b), -l2 * std::sin(b),
      l1 * std::cos(a) + l2 * std::cos(b), l2 * std::cos(b);
  d_knee << -l2 * std::sin(b), -l2 * std::sin(b), l2 * std::cos(b), l2 * std::cos(b);
  return {d_hip, d_knee};
}

double stage_weight(const MpcWeights& w, int k) { return std::pow(w.gamma, k); }

}  // namespace

KinoModel make_kino_model(const RobotConstants& c, const LegGeometry& leg, const UpsModel& ups) {
  KinoModel m;
  m.srb = make_srb_model(c);
  m.leg = leg;
  m.ups = ups;
  m.q_min = c.q_min;
  m.q_max = c.q_max;
  m.tau_max = c.tau_max;
  return m;
}

void SqpSettings::validate() const {
  const TrustBox& t = trust_box;
  if (outer_iterations < 1 || !(constraint_tolerance > 0.0) || !(gn_damping > 0.0) ||
      !(t.position > 0.0 && t.pitch > 0.0 && t.velocity > 0.0 && t.pitch_rate > 0.0 &&
        t.force > 0.0 && t.joint > 0.0 && t.torque > 0.0)) {
    throw SchemaError("sqp settings must be positive");
  }
  qp.validate();
}

KinoIndexMap::KinoIndexMap(const std::vector<HorizonStep>& steps)
    : N(static_cast<int>(steps.size())), slot(steps.size(), -1) {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].contact) slot[k] = stance_count++;
  }
}

KinoData make_kino_data(const HorizonReference& ref, const KinoModel& model) {
  KinoData d;
  d.ref = ref;
  d.index = KinoIndexMap(ref.steps);
  d.ltv = reference_ltv(ref, model.srb);
  return d;
}

double ConstraintEval::max_violation() const {
  double v = 0.0;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    v = std::max({v, lower(i) - value(i), value(i) - upper(i)});
  }
  return v;
}

ConstraintEval evaluate_constraints(const Eigen::VectorXd& z, const KinoData& data,
                                    const KinoModel& model) {
  const KinoIndexMap& ix = data.index;
  const int N = ix.N;
  const int m = ix.num_constraints();
  ConstraintEval out;
  out.value = Eigen::VectorXd::Zero(m);
  out.lower = Eigen::VectorXd::Zero(m);
  out.upper = Eigen::VectorXd::Zero(m);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(N) * 40 + static_cast<std::size_t>(ix.stance_count) * 24);

  for (int k = 0; k < N; ++k) {
    const LtvStep& s = data.ltv[k];
    const Vec6 xk = state_of(z, data, k);
    const Vec6 xn = z.segment<6>(ix.state(k + 1));
    const Vec2 f = z.segment<2>(ix.force(k));
    const int r = ix.dynamics_row(k);
    out.value.segment<6>(r) = xn - s.A * xk - s.B * f - s.d;
    for (int i = 0; i < 6; ++i) t.emplace_back(r + i, ix.state(k + 1) + i, 1.0);
    if (k > 0) {
      for (int i = 0; i < 6; ++i) t.emplace_back(r + i, ix.state(k) + i, -s.A(i, i));
      for (const auto& e : kAOffDiag) t.emplace_back(r + e[0], ix.state(k) + e[1], -s.A(e[0], e[1]));
    }
    for (const auto& e : kBEntries) t.emplace_back(r + e[0], ix.force(k) + e[1], -s.B(e[0], e[1]));

    if (ix.slot[k] >= 0) {
      const Vec2 q = z.segment<2>(ix.joint(k));
      const Vec2 tau = z.segment<2>(ix.torque(k));
      const double th = xk(2);
      const Jacobian25 J = foot_jacobian(model.leg, th, q);
      const Mat2 Jq = J.rightCols<2>();
      const int rf = ix.fk_row(k);
      out.value.segment<2>(rf) = forward_kinematics(model.leg, Vec2(xk.head<2>()), th, q) -
                                 data.ref.foot[k];
      if (k > 0) {
        t.emplace_back(rf, ix.state(k), 1.0);
        t.emplace_back(rf + 1, ix.state(k) + 1, 1.0);
        t.emplace_back(rf, ix.state(k) + 2, J(0, 2));
        t.emplace_back(rf + 1, ix.state(k) + 2, J(1, 2));
      }
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) t.emplace_back(rf + i, ix.joint(k) + j, Jq(i, j));
      }

      // tau + tau_s(q) + Jc(q)^T R(th)^T f = 0
      const int rt = ix.torque_row(k);
      const Mat2 R = rotation(th);
      const Mat2 dR = rotation_derivative(th);
      const Mat2 Jc = leg_chain_jacobian(model.leg, q);
      const auto [dJ_hip, dJ_knee] = chain_jacobian_derivatives(model.leg, q);
      const Vec2 Rtf = R.transpose() * f;
      out.value.segment<2>(rt) = tau + ups_torque_vector(q, model.ups) + Jq.transpose() * f;
      for (int i = 0; i < 2; ++i) t.emplace_back(rt + i, ix.torque(k) + i, 1.0);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) t.emplace_back(rt + i, ix.force(k) + j, Jq(j, i));
      }
      if (k > 0) {
        const Vec2 d_th = Jc.transpose() * dR.transpose() * f;
        t.emplace_back(rt, ix.state(k) + 2, d_th(0));
        t.emplace_back(rt + 1, ix.state(k) + 2, d_th(1));
      }
      Vec2 d_hip = dJ_hip.transpose() * Rtf;
      Vec2 d_knee = dJ_knee.transpose() * Rtf;
      d_knee(1) += ups_torque_derivative(q(1), model.ups);
      t.emplace_back(rt, ix.joint(k), d_hip(0));
      t.emplace_back(rt + 1, ix.joint(k), d_hip(1));
      t.emplace_back(rt, ix.joint(k) + 1, d_knee(0));
      t.emplace_back(rt + 1, ix.joint(k) + 1, d_knee(1));
    }

    const int c = ix.force_row(k);
    const double mu = model.srb.mu;
    out.value(c) = f.x() - mu * f.y();
    out.value(c + 1) = f.x() + mu * f.y();
    out.value(c + 2) = f.y();
    t.emplace_back(c, ix.force(k), 1.0);
    t.emplace_back(c, ix.force(k) + 1, -mu);
    t.emplace_back(c + 1, ix.force(k), 1.0);
    t.emplace_back(c + 1, ix.force(k) + 1, mu);
    t.emplace_back(c + 2, ix.force(k) + 1, 1.0);
    out.lower(c) = -kQpInfinity;
    out.upper(c) = 0.0;
    out.lower(c + 1) = 0.0;
    out.upper(c + 1) = kQpInfinity;
    out.lower(c + 2) = 0.0;
    out.upper(c + 2) = s.f_max;
  }
  out.jacobian.resize(m, ix.num_variables());
  out.jacobian.setFromTriplets(t.begin(), t.end());
  out.jacobian.makeCompressed();
  return out;
}

void variable_bounds(const KinoData& data, const KinoModel& model, Eigen::VectorXd& lower,
                     Eigen::VectorXd& upper) {
  const KinoIndexMap& ix = data.index;
  lower = Eigen::VectorXd::Constant(ix.num_variables(), -kQpInfinity);
  upper = Eigen::VectorXd::Constant(ix.num_variables(), kQpInfinity);
  for (int k = 0; k < ix.N; ++k) {
    if (ix.slot[k] < 0) continue;
    lower.segment<2>(ix.joint(k)) = model.q_min;
    upper.segment<2>(ix.joint(k)) = model.q_max;
    lower.segment<2>(ix.torque(k)) = -model.tau_max;
    upper.segment<2>(ix.torque(k)) = model.tau_max;
  }
}

double kino_objective(const Eigen::VectorXd& z, const KinoData& data, const MpcWeights& w) {
  const KinoIndexMap& ix = data.index;
  double J = 0.0;
  for (int k = 0; k <= ix.N; ++k) {
    const double g = stage_weight(w, k);
    if (k >= 1) {
      const Vec6 e = z.segment<6>(ix.state(k)) - data.ref.x_ref[k];
      J += g * e.dot(w.Q.cwiseProduct(e));
    }
    if (k < ix.N) {
      const Vec2 e = z.segment<2>(ix.force(k)) - data.ref.f_ref[k];
      J += g * e.dot(w.R_f.cwiseProduct(e));
      if (ix.slot[k] >= 0) {
        const Vec2 tau = z.segment<2>(ix.torque(k));
        J += g * tau.dot(w.R_tau.cwiseProduct(tau));
      }
    }
  }
  return J;
}

Eigen::VectorXd kino_gradient(const Eigen::VectorXd& z, const KinoData& data,
                              const MpcWeights& w) {
  const KinoIndexMap& ix = data.index;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(ix.num_variables());
  for (int k = 0; k <= ix.N; ++k) {
    const double g = stage_weight(w, k);
    if (k >= 1) {
      grad.segment<6>(ix.state(k)) =
          2.0 * g * w.Q.cwiseProduct(z.segment<6>(ix.state(k)) - data.ref.x_ref[k]);
    }
    if (k < ix.N) {
      grad.segment<2>(ix.force(k)) =
          2.0 * g * w.R_f.cwiseProduct(z.segment<2>(ix.force(k)) - data.ref.f_ref[k]);
      if (ix.slot[k] >= 0) {
        grad.segment<2>(ix.torque(k)) = 2.0 * g * w.R_tau.cwiseProduct(z.segment<2>(ix.torque(k)));
      }
    }
  }
  return grad;
}

SparseMatrix kino_hessian(const KinoData& data, const MpcWeights& w) {
  const KinoIndexMap& ix = data.index;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(ix.num_variables());
  for (int k = 0; k <= ix.N; ++k) {
    const double g = stage_weight(w, k);
    if (k >= 1) diag.segment<6>(ix.state(k)) = 2.0 * g * w.Q;
    if (k < ix.N) {
      diag.segment<2>(ix.force(k)) = 2.0 * g * w.R_f;
      if (ix.slot[k] >= 0) diag.segment<2>(ix.torque(k)) = 2.0 * g * w.R_tau;
    }
  }
  SparseMatrix H(ix.num_variables(), ix.num_variables());
  std::vector<Triplet> t;
  for (int i = 0; i < ix.num_variables(); ++i) t.emplace_back(i, i, diag(i));
  H.setFromTriplets(t.begin(), t.end());
  H.makeCompressed();
  return H;
}

QpProblem build_sqp_subproblem(const Eigen::VectorXd& z, const ConstraintEval& eval,
                               const KinoData& data, const KinoModel& model,
                               const MpcWeights& weights, const SqpSettings& settings) {
  const KinoIndexMap& ix = data.index;
  const int n = ix.num_variables();
  const int mc = ix.num_constraints();

  QpProblem qp;
  qp.P = kino_hessian(data, weights);
  for (int i = 0; i < n; ++i) qp.P.coeffRef(i, i) += settings.gn_damping;
  qp.q = kino_gradient(z, data, weights);

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(eval.jacobian.nonZeros() + n));
  for (int j = 0; j < eval.jacobian.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(eval.jacobian, j); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  for (int i = 0; i < n; ++i) t.emplace_back(mc + i, i, 1.0);
  qp.A.resize(mc + n, n);
  qp.A.setFromTriplets(t.begin(), t.end());
  qp.A.makeCompressed();

  qp.lower.resize(mc + n);
  qp.upper.resize(mc + n);
  for (int i = 0; i < mc; ++i) {
    qp.lower(i) = eval.lower(i) <= -kQpInfinity ? -kQpInfinity : eval.lower(i) - eval.value(i);
    qp.upper(i) = eval.upper(i) >= kQpInfinity ? kQpInfinity : eval.upper(i) - eval.value(i);
  }

  Eigen::VectorXd trust(n);
  const TrustBox& tb = settings.trust_box;
  for (int k = 1; k <= ix.N; ++k) {
    trust.segment<6>(ix.state(k)) << tb.position, tb.position, tb.pitch, tb.velocity, tb.velocity,
        tb.pitch_rate;
  }
  for (int k = 0; k < ix.N; ++k) {
    trust.segment<2>(ix.force(k)).setConstant(tb.force);
    if (ix.slot[k] >= 0) {
      trust.segment<2>(ix.joint(k)).setConstant(tb.joint);
      trust.segment<2>(ix.torque(k)).setConstant(tb.torque);
    }
  }
  Eigen::VectorXd vlo, vhi;
  variable_bounds(data, model, vlo, vhi);
  for (int i = 0; i < n; ++i) {
    double lo = std::max(vlo(i) - z(i), -trust(i));
    double hi = std::min(vhi(i) - z(i), trust(i));
    if (lo > hi) {
      // Bound further away than the trust radius: take the longest step
      // toward it.
      lo = hi = (vlo(i) - z(i) > trust(i)) ? trust(i) : -trust(i);
    }
    qp.lower(mc + i) = lo;
    qp.upper(mc + i) = hi;
  }
  return qp;
}

Eigen::VectorXd kino_initial_guess(const KinoData& data, const MpcSolution& srb,
                                   const KinoModel& model, bool& ik_clamped) {
  const KinoIndexMap& ix = data.index;
  if (static_cast<int>(srb.grf.size()) != ix.N || static_cast<int>(srb.states.size()) != ix.N + 1) {
    throw std::invalid_argument("kino: rigid-body solution does not cover the horizon");
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(ix.num_variables());
  ik_clamped = false;
  for (int k = 1; k <= ix.N; ++k) z.segment<6>(ix.state(k)) = srb.states[k];
  for (int k = 0; k < ix.N; ++k) {
    const Vec2 f = data.ref.steps[k].contact ? srb.grf[k] : Vec2::Zero();
    z.segment<2>(ix.force(k)) = f;
    if (ix.slot[k] < 0) continue;
    const Vec6 xk = state_of(z, data, k);
    const IkResult ik =
        inverse_kinematics_clamped(model.leg, Vec2(xk.head<2>()), xk(2), data.ref.foot[k]);
    ik_clamped = ik_clamped || ik.clamped;
    z.segment<2>(ix.joint(k)) = ik.q;
    z.segment<2>(ix.torque(k)) =
        stance_motor_torque(foot_jacobian(model.leg, xk(2), ik.q), f, ik.q, model.ups);
  }
  return z;
}

KinoMpc::KinoMpc(KinoModel model, MpcWeights weights, SqpSettings settings)
    : model_(model), weights_(weights), settings_(settings), solver_(settings.qp) {
  weights_.validate();
  settings_.validate();
}

MpcSolution KinoMpc::solve(const HorizonReference& ref, const MpcSolution& srb) {
  const KinoData data = make_kino_data(ref, model_);
  const KinoIndexMap& ix = data.index;
  MpcSolution out;
  out.t0 = ref.t0;
  out.steps = ref.steps;
  Eigen::VectorXd z = kino_initial_guess(data, srb, model_, out.ik_clamped);

  QpStatus last_status = QpStatus::kSolved;
  for (int it = 0; it < settings_.outer_iterations; ++it) {
    const ConstraintEval eval = evaluate_constraints(z, data, model_);
    const QpProblem sub = build_sqp_subproblem(z, eval, data, model_, weights_, settings_);
    if (solver_.is_setup() && solver_slots_ == ix.slot) {
      solver_.update(sub);
    } else {
      solver_.setup(sub);
      solver_slots_ = ix.slot;
      duals_.resize(0);
    }
    std::optional<WarmStart> warm;
    if (duals_.size() == sub.num_constraints()) {
      warm = WarmStart{Eigen::VectorXd::Zero(sub.num_variables()), duals_};
    }
    const QpSolution sol = solver_.solve(warm);
    out.iterations += sol.iterations;
    last_status = sol.status;
    out.primal_residual = sol.primal_residual;
    out.dual_residual = sol.dual_residual;
    if (sol.status == QpStatus::kPrimalInfeasible || sol.status == QpStatus::kDualInfeasible ||
        !sol.x.allFinite()) {
      out.degraded = true;
      duals_.resize(0);
      break;
    }
    z += sol.x;
    duals_ = sol.y;
  }

  const ConstraintEval final_eval = evaluate_constraints(z, data, model_);
  out.max_violation = final_eval.max_violation();
  Eigen::VectorXd vlo, vhi;
  variable_bounds(data, model_, vlo, vhi);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out.max_violation = std::max({out.max_violation, vlo(i) - z(i), z(i) - vhi(i)});
  }
  out.status = last_status;
  out.objective = kino_objective(z, data, weights_);
  out.states.push_back(ref.x0);
  for (int k = 1; k <= ix.N; ++k) out.states.push_back(z.segment<6>(ix.state(k)));
  for (int k = 0; k < ix.N; ++k) {
    out.grf.push_back(z.segment<2>(ix.force(k)));
    if (ix.slot[k] >= 0) {
      out.q.push_back(z.segment<2>(ix.joint(k)));
      out.tau.push_back(z.segment<2>(ix.torque(k)));
    } else {
      out.q.push_back(Vec2::Zero());
      out.tau.push_back(Vec2::Zero());
    }
  }
  out.qp_x = z;
  out.qp_y = duals_;
  last_ = out;
  return out;
}

MpcSolution solve_kino(const HorizonReference& ref, const MpcSolution& srb,
                       const KinoModel& model, const MpcWeights& weights,
                       const SqpSettings& settings) {
  KinoMpc mpc(model, weights, settings);
  return mpc.solve(ref, srb);
}

Vec2 torque_extraction(const MpcSolution& solution, const Vec2& tau_max, int k) {
  if (k < 0 || k >= static_cast<int>(solution.steps.size()) || k >= static_cast<int>(solution.tau.size())) {
    throw std::out_of_range("torque_extraction: step outside the horizon");
  }
  if (!solution.steps[k].contact) {
    throw std::logic_error("torque_extraction: flight step has no stance torque");
  }
  return solution.tau[k].cwiseMax(-tau_max).cwiseMin(tau_max);
}

}  // namespace hopper
