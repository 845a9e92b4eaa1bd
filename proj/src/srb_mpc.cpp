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

#include "hopper/srb_mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hopper {
namespace {

using Triplet = Eigen::Triplet<double, int>;

// Structural nonzeros of A_k and B_k; kept even when the value is zero so the
// QP pattern depends on N only.
constexpr int kAOffDiag[5][2] = {{0, 3}, {1, 4}, {2, 5}, {5, 0}, {5, 1}};
constexpr int kBEntries[4][2] = {{3, 0}, {4, 1}, {5, 0}, {5, 1}};

}  // namespace

void MpcWeights::validate() const {
  if ((Q.array() < 0.0).any() || (R_f.array() < 0.0).any() || (R_tau.array() < 0.0).any()) {
    throw SchemaError("mpc weights must be non-negative");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw SchemaError("mpc gamma must lie in (0, 1)");
  if (N < 2) throw SchemaError("mpc horizon N must be at least 2");
}

SrbModel make_srb_model(const RobotConstants& c) {
  SrbModel m;
  m.mass = c.mass;
  m.inertia = c.inertia;
  m.gravity = c.gravity;
  m.mu = c.mu;
  m.f_max = 10.0 * c.weight();
  return m;
}

Vec6 srb_vector_field(const Vec6& x, const Vec2& f, const Vec2& foot, const SrbModel& model) {
  const Vec2 r = foot - x.head<2>();
  Vec6 dx;
  dx.head<3>() = x.tail<3>();
  dx.segment<2>(3) = f / model.mass + model.gravity;
  dx(5) = wedge(r, f) / model.inertia;
  return dx;
}

ContinuousSrb srb_continuous(const Vec6& x_ref, const Vec2& foot_ref, const Vec2& f_ref,
                             const SrbModel& model, bool contact) {
  ContinuousSrb c;
  c.A(0, 3) = 1.0;
  c.A(1, 4) = 1.0;
  c.A(2, 5) = 1.0;
  const Vec2 f = contact ? f_ref : Vec2::Zero();
  if (contact) {
    const Vec2 r = foot_ref - x_ref.head<2>();
    // d(r ^ f)/d p_c with r = foot - p_c
    c.A(5, 0) = -f.y() / model.inertia;
    c.A(5, 1) = f.x() / model.inertia;
    c.B(3, 0) = 1.0 / model.mass;
    c.B(4, 1) = 1.0 / model.mass;
    c.B(5, 0) = -r.y() / model.inertia;
    c.B(5, 1) = r.x() / model.inertia;
  }
  c.d = srb_vector_field(x_ref, f, foot_ref, model) - c.A * x_ref - c.B * f;
  return c;
}

LtvStep linearize_discretize(const Vec6& x_ref, const Vec2& foot_ref, const Vec2& f_ref,
                             const SrbModel& model, double dt, bool contact) {
  if (!(dt > 0.0)) throw std::invalid_argument("linearize: dt must be positive");
  const ContinuousSrb c = srb_continuous(x_ref, foot_ref, f_ref, model, contact);
  LtvStep s;
  s.A = Mat6::Identity() + dt * c.A;
  s.B = dt * c.B;
  s.d = dt * c.d;
  s.dt = dt;
  s.contact = contact;
  s.f_max = contact ? model.f_max : 0.0;
  return s;
}

std::vector<LtvStep> reference_ltv(const HorizonReference& ref, const SrbModel& model) {
  std::vector<LtvStep> ltv;
  ltv.reserve(ref.steps.size());
  for (int k = 0; k < ref.N(); ++k) {
    LtvStep s = linearize_discretize(ref.x_ref[k], ref.foot[k], ref.f_ref[k], model,
                                     ref.steps[k].dt, ref.steps[k].contact);
    const Vec2 f = ref.steps[k].contact ? ref.f_ref[k] : Vec2::Zero();
    s.d += ref.x_ref[k + 1] - (s.A * ref.x_ref[k] + s.B * f + s.d);
    ltv.push_back(s);
  }
  return ltv;
}

SrbQp build_srb_qp(const HorizonReference& ref, const MpcWeights& weights, const SrbModel& model) {
  const int N = ref.N();
  if (N < 1 || static_cast<int>(ref.x_ref.size()) != N + 1 ||
      static_cast<int>(ref.f_ref.size()) != N || static_cast<int>(ref.foot.size()) != N) {
    throw std::invalid_argument("build_srb_qp: reference does not match the horizon");
  }
  if (!ref.x0.allFinite()) throw std::invalid_argument("build_srb_qp: non-finite initial state");
  SrbQp out;
  out.index.N = N;
  const SrbIndexMap& ix = out.index;
  const int n = ix.num_variables();
  const int m = ix.num_constraints();

  out.ltv = reference_ltv(ref, model);

  std::vector<Triplet> pt;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  double gk = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k >= 1) {
      for (int i = 0; i < 6; ++i) {
        const double w = gk * weights.Q(i);
        pt.emplace_back(ix.state(k) + i, ix.state(k) + i, 2.0 * w);
        q(ix.state(k) + i) = -2.0 * w * ref.x_ref[k](i);
      }
    }
    if (k < N) {
      for (int i = 0; i < 2; ++i) {
        const double w = gk * weights.R_f(i);
        pt.emplace_back(ix.force(k) + i, ix.force(k) + i, 2.0 * w);
        q(ix.force(k) + i) = -2.0 * w * ref.f_ref[k](i);
      }
    }
    gk *= weights.gamma;
  }
  SparseMatrix P(n, n);
  P.setFromTriplets(pt.begin(), pt.end());

  std::vector<Triplet> at;
  Eigen::VectorXd lo(m), hi(m);
  for (int k = 0; k < N; ++k) {
    const LtvStep& s = out.ltv[k];
    const int r = ix.dynamics_row(k);
    for (int i = 0; i < 6; ++i) at.emplace_back(r + i, ix.state(k + 1) + i, 1.0);
    Vec6 rhs = s.d;
    if (k == 0) {
      rhs += s.A * ref.x0;
    } else {
      for (int i = 0; i < 6; ++i) at.emplace_back(r + i, ix.state(k) + i, -s.A(i, i));
      for (const auto& e : kAOffDiag) at.emplace_back(r + e[0], ix.state(k) + e[1], -s.A(e[0], e[1]));
    }
    for (const auto& e : kBEntries) at.emplace_back(r + e[0], ix.force(k) + e[1], -s.B(e[0], e[1]));
    lo.segment<6>(r) = rhs;
    hi.segment<6>(r) = rhs;

    const int c = ix.force_row(k);
    const int f = ix.force(k);
    at.emplace_back(c, f, 1.0);
    at.emplace_back(c, f + 1, -model.mu);
    at.emplace_back(c + 1, f, 1.0);
    at.emplace_back(c + 1, f + 1, model.mu);
    at.emplace_back(c + 2, f + 1, 1.0);
    lo(c) = -kQpInfinity;
    hi(c) = 0.0;
    lo(c + 1) = 0.0;
    hi(c + 1) = kQpInfinity;
    lo(c + 2) = 0.0;
    hi(c + 2) = s.f_max;
  }
  SparseMatrix A(m, n);
  A.setFromTriplets(at.begin(), at.end());
  P.makeCompressed();
  A.makeCompressed();
  out.problem.P = std::move(P);
  out.problem.q = std::move(q);
  out.problem.A = std::move(A);
  out.problem.lower = std::move(lo);
  out.problem.upper = std::move(hi);
  return out;
}

Vec6 MpcSolution::state_at(double t) const {
  if (states.empty()) throw std::logic_error("mpc solution is empty");
  double tk = t0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double t1 = tk + steps[k].dt;
    if (t <= t1) {
      const double w = std::clamp((t - tk) / steps[k].dt, 0.0, 1.0);
      return (1.0 - w) * states[k] + w * states[k + 1];
    }
    tk = t1;
  }
  return states.back();
}

Vec2 MpcSolution::grf_at(double t) const {
  if (grf.empty()) throw std::logic_error("mpc solution is empty");
  double tk = t0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    tk += steps[k].dt;
    if (t < tk) return grf[k];
  }
  return grf.back();
}

Eigen::VectorXd srb_warm_start(const MpcSolution& prev, const HorizonReference& ref) {
  SrbIndexMap ix{ref.N()};
  Eigen::VectorXd x(ix.num_variables());
  double t = ref.t0;
  for (int k = 0; k < ref.N(); ++k) {
    const double mid = t + 0.5 * ref.steps[k].dt;
    x.segment<2>(ix.force(k)) = ref.steps[k].contact ? prev.grf_at(mid) : Vec2::Zero();
    t += ref.steps[k].dt;
    x.segment<6>(ix.state(k + 1)) = prev.state_at(t);
  }
  return x;
}

namespace {

std::optional<WarmStart> warm_from(const MpcSolution* prev, const SrbQp& qp,
                                   const HorizonReference& ref) {
  if (!prev || prev->empty()) return std::nullopt;
  const int m = qp.problem.num_constraints();
  return WarmStart{srb_warm_start(*prev, ref),
                   prev->qp_y.size() == m ? prev->qp_y : Eigen::VectorXd::Zero(m)};
}

MpcSolution unpack(const SrbQp& qp, const HorizonReference& ref, const QpSolution& sol) {
  MpcSolution out;
  out.t0 = ref.t0;
  out.steps = ref.steps;
  out.states.push_back(ref.x0);
  for (int k = 1; k <= qp.index.N; ++k) out.states.push_back(sol.x.segment<6>(qp.index.state(k)));
  for (int k = 0; k < qp.index.N; ++k) out.grf.push_back(sol.x.segment<2>(qp.index.force(k)));
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.primal_residual = sol.primal_residual;
  out.dual_residual = sol.dual_residual;
  out.objective = sol.objective;
  out.degraded = !sol.solved();
  out.qp_x = sol.x;
  out.qp_y = sol.y;
  return out;
}

}  // namespace

MpcSolution solve_srb(const SrbQp& qp, const HorizonReference& ref, const MpcSolution* previous,
                      const SolverSettings& settings) {
  QpSolver solver(settings);
  solver.setup(qp.problem);
  const std::optional<WarmStart> warm = warm_from(previous, qp, ref);
  return unpack(qp, ref, solver.solve(warm));
}

SrbMpc::SrbMpc(SrbModel model, MpcWeights weights, SolverSettings settings)
    : model_(model), weights_(weights), solver_(settings) {
  weights_.validate();
}

MpcSolution SrbMpc::solve(const HorizonReference& ref) {
  const SrbQp qp = build_srb_qp(ref, weights_, model_);
  if (solver_.is_setup() && solver_.problem().num_variables() == qp.problem.num_variables()) {
    solver_.update(qp.problem);
  } else {
    solver_.setup(qp.problem);
  }
  const std::optional<WarmStart> warm = warm_from(&last_, qp, ref);
  last_ = unpack(qp, ref, solver_.solve(warm));
  return last_;
}

}  // namespace hopper
