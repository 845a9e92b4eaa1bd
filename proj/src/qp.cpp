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

#include "hopper/qp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/SparseCholesky>
#include <json.hpp>

namespace hopper {
namespace {

using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double, int>;
using KktFactor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Upper, Eigen::AMDOrdering<int>>;

constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kDivisionTol = 1e-30;

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

bool is_inf(double b) { return std::abs(b) >= kQpInfinity; }

bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  if (!a.isCompressed() || !b.isCompressed()) return false;
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}

double clip_scaling(double v) {
  if (v < kMinScaling) return 1.0;
  return std::min(v, kMaxScaling);
}

}  // namespace

// ─── Problem ────────────────────────────────────────────────────────────────

QpProblem::QpProblem(SparseMatrix P_, VectorXd q_, SparseMatrix A_, VectorXd lower_,
                     VectorXd upper_)
    : P(std::move(P_)), q(std::move(q_)), A(std::move(A_)), lower(std::move(lower_)),
      upper(std::move(upper_)) {
  P.makeCompressed();
  A.makeCompressed();
  validate();
}

double QpProblem::objective(const VectorXd& x) const {
  return 0.5 * x.dot(P * x) + q.dot(x);
}

void QpProblem::validate() const {
  const Eigen::Index n = q.size();
  const Eigen::Index m = lower.size();
  if (P.rows() != n || P.cols() != n) throw QpError("qp: P must be n x n with n = size(q)");
  if (A.cols() != n || A.rows() != m || upper.size() != m) {
    throw QpError("qp: A, lower and upper dimensions are inconsistent");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(lower(i)) || std::isnan(upper(i)) || lower(i) > upper(i)) {
      throw QpError("qp: lower > upper in row " + std::to_string(i));
    }
  }
  const SparseMatrix Pt = P.transpose();
  if ((P - Pt).norm() > 1e-12 * (1.0 + P.norm())) throw QpError("qp: P is not symmetric");
  SparseMatrix reg = P;
  for (Eigen::Index i = 0; i < n; ++i) reg.coeffRef(i, i) += 1e-9;
  Eigen::SimplicialLLT<SparseMatrix> llt(reg);
  if (llt.info() != Eigen::Success) throw QpError("qp: P is not positive semidefinite");
}

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kMaxIter: return "max_iter";
    case QpStatus::kPrimalInfeasible: return "primal_infeasible";
    case QpStatus::kDualInfeasible: return "dual_infeasible";
  }
  return "unknown";
}

void SolverSettings::validate() const {
  if (!(eps_abs > 0.0) || !(eps_rel >= 0.0) || max_iter <= 0 || rt_iter <= 0 ||
      !(rho > 0.0) || !(sigma > 0.0) || !(alpha_relax > 0.0 && alpha_relax < 2.0) ||
      check_interval <= 0 || infeasibility_interval <= 0 || !(polish_delta > 0.0) ||
      polish_refine < 0) {
    throw QpError("qp: invalid solver settings");
  }
}

// ─── Solver workspace ───────────────────────────────────────────────────────

struct QpSolver::Workspace {
  QpProblem problem;
  int n = 0;
  int m = 0;

  // Ruiz scaling: x = D xs, (A x) = E^-1 (As xs), cost scaled by c.
  VectorXd D, E, Dinv, Einv;
  double c = 1.0;
  SparseMatrix Ps, As, AsT;
  VectorXd qs, ls, us;

  VectorXd rho, rho_inv;
  double rho_scalar = 0.1;
  KktFactor kkt;
  bool analyzed = false;
  int factorizations = 0;

  VectorXd x, z, y;

  void scale(const SolverSettings& s);
  void scale_vectors();
  void set_rho(const SolverSettings& s, double rho_value);
  void factorize(const SolverSettings& s);
  SparseMatrix build_kkt(const SolverSettings& s) const;
  bool polish(const SolverSettings& s);
};

void QpSolver::Workspace::scale(const SolverSettings& s) {
  Ps = problem.P;
  As = problem.A;
  D = VectorXd::Ones(n);
  E = VectorXd::Ones(m);
  c = 1.0;
  VectorXd col_norm(n);
  VectorXd row_norm(m);
  for (int pass = 0; pass < s.scaling_iterations; ++pass) {
    col_norm.setZero();
    row_norm.setZero();
    for (int j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(Ps, j); it; ++it) {
        col_norm(j) = std::max(col_norm(j), std::abs(it.value()));
      }
      for (SparseMatrix::InnerIterator it(As, j); it; ++it) {
        col_norm(j) = std::max(col_norm(j), std::abs(it.value()));
        row_norm(it.row()) = std::max(row_norm(it.row()), std::abs(it.value()));
      }
    }
    VectorXd dcol(n);
    VectorXd drow(m);
    for (int j = 0; j < n; ++j) dcol(j) = 1.0 / std::sqrt(clip_scaling(col_norm(j)));
    for (int i = 0; i < m; ++i) drow(i) = 1.0 / std::sqrt(clip_scaling(row_norm(i)));
    for (int j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(Ps, j); it; ++it) {
        it.valueRef() *= dcol(it.row()) * dcol(j);
      }
      for (SparseMatrix::InnerIterator it(As, j); it; ++it) {
        it.valueRef() *= drow(it.row()) * dcol(j);
      }
    }
    D.array() *= dcol.array();
    E.array() *= drow.array();
  }
  if (s.scaling_iterations > 0 && n > 0) {
    double mean_col = 0.0;
    for (int j = 0; j < n; ++j) {
      double cn = 0.0;
      for (SparseMatrix::InnerIterator it(Ps, j); it; ++it) cn = std::max(cn, std::abs(it.value()));
      mean_col += cn;
    }
    mean_col /= n;
    if (mean_col > kMinScaling) {
      c = std::clamp(1.0 / mean_col, kMinScaling, kMaxScaling);
      Ps *= c;
    }
  }
  Dinv = D.cwiseInverse();
  Einv = E.cwiseInverse();
  AsT = As.transpose();
  scale_vectors();
}

void QpSolver::Workspace::scale_vectors() {
  qs = c * D.cwiseProduct(problem.q);
  ls.resize(m);
  us.resize(m);
  for (int i = 0; i < m; ++i) {
    ls(i) = is_inf(problem.lower(i)) ? -kQpInfinity : E(i) * problem.lower(i);
    us(i) = is_inf(problem.upper(i)) ? kQpInfinity : E(i) * problem.upper(i);
  }
}

void QpSolver::Workspace::set_rho(const SolverSettings& s, double rho_value) {
  rho_scalar = std::clamp(rho_value, kRhoMin, kRhoMax);
  rho.resize(m);
  for (int i = 0; i < m; ++i) {
    const bool lo_inf = is_inf(problem.lower(i));
    const bool up_inf = is_inf(problem.upper(i));
    if (lo_inf && up_inf) {
      rho(i) = kRhoMin;
    } else if (!lo_inf && !up_inf && problem.upper(i) - problem.lower(i) < 1e-4) {
      rho(i) = s.rho_eq_scale * rho_scalar;
    } else {
      rho(i) = rho_scalar;
    }
  }
  rho_inv = rho.cwiseInverse();
}

SparseMatrix QpSolver::Workspace::build_kkt(const SolverSettings& s) const {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(Ps.nonZeros() + As.nonZeros() + n + m));
  for (int j = 0; j < n; ++j) {
    bool diag = false;
    for (SparseMatrix::InnerIterator it(Ps, j); it; ++it) {
      if (it.row() < j) {
        t.emplace_back(static_cast<int>(it.row()), j, it.value());
      } else if (it.row() == j) {
        t.emplace_back(j, j, it.value() + s.sigma);
        diag = true;
      }
    }
    if (!diag) t.emplace_back(j, j, s.sigma);
  }
  for (int j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(As, j); it; ++it) {
      t.emplace_back(j, n + static_cast<int>(it.row()), it.value());
    }
  }
  for (int i = 0; i < m; ++i) t.emplace_back(n + i, n + i, -rho_inv(i));
  SparseMatrix K(n + m, n + m);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  return K;
}

// Guesses the active set from the current iterate and solves the equality
// constrained problem on it. Replaces x, y, z (scaled) on success.
bool QpSolver::Workspace::polish(const SolverSettings& s) {
  const VectorXd Ax = As * x;
  std::vector<int> rows;
  std::vector<double> target;
  std::vector<int> side;  // -1 lower, +1 upper, 0 equality
  for (int i = 0; i < m; ++i) {
    if (ls(i) == us(i)) {
      rows.push_back(i);
      target.push_back(ls(i));
      side.push_back(0);
    } else if (Ax(i) - ls(i) < -y(i)) {
      rows.push_back(i);
      target.push_back(ls(i));
      side.push_back(-1);
    } else if (us(i) - Ax(i) < y(i)) {
      rows.push_back(i);
      target.push_back(us(i));
      side.push_back(1);
    }
  }
  const int k = static_cast<int>(rows.size());
  std::vector<int> slot(static_cast<std::size_t>(m), -1);
  for (int r = 0; r < k; ++r) slot[static_cast<std::size_t>(rows[r])] = r;

  auto assemble = [&](double delta) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(Ps.nonZeros() + As.nonZeros() + n + k));
    for (int j = 0; j < n; ++j) {
      bool diag = false;
      for (SparseMatrix::InnerIterator it(Ps, j); it; ++it) {
        if (it.row() < j) {
          t.emplace_back(static_cast<int>(it.row()), j, it.value());
        } else if (it.row() == j) {
          t.emplace_back(j, j, it.value() + delta);
          diag = true;
        }
      }
      if (!diag) t.emplace_back(j, j, delta);
      for (SparseMatrix::InnerIterator it(As, j); it; ++it) {
        const int r = slot[static_cast<std::size_t>(it.row())];
        if (r >= 0) t.emplace_back(j, n + r, it.value());
      }
    }
    for (int r = 0; r < k; ++r) t.emplace_back(n + r, n + r, -delta);
    SparseMatrix K(n + k, n + k);
    K.setFromTriplets(t.begin(), t.end());
    return K;
  };

  const SparseMatrix Kreg = assemble(s.polish_delta);
  KktFactor factor(Kreg);
  if (factor.info() != Eigen::Success) return false;
  const SparseMatrix K0 = assemble(0.0);
  const SparseMatrix K0full = K0.selfadjointView<Eigen::Upper>();
  VectorXd rhs(n + k);
  rhs.head(n) = -qs;
  for (int r = 0; r < k; ++r) rhs(n + r) = target[static_cast<std::size_t>(r)];
  VectorXd sol = factor.solve(rhs);
  for (int pass = 0; pass < s.polish_refine; ++pass) {
    const VectorXd res = rhs - K0full * sol;
    sol += factor.solve(res);
  }
  if (!sol.allFinite()) return false;
  // Multipliers must carry the sign of their bound.
  constexpr double kSignTol = 1e-9;
  for (int r = 0; r < k; ++r) {
    const double yr = sol(n + r);
    const int sd = side[static_cast<std::size_t>(r)];
    if ((sd < 0 && yr > kSignTol) || (sd > 0 && yr < -kSignTol)) return false;
  }
  x = sol.head(n);
  y.setZero();
  for (int r = 0; r < k; ++r) y(rows[static_cast<std::size_t>(r)]) = sol(n + r);
  z = (As * x).cwiseMax(ls).cwiseMin(us);
  return true;
}

void QpSolver::Workspace::factorize(const SolverSettings& s) {
  const SparseMatrix K = build_kkt(s);
  if (!analyzed) {
    kkt.analyzePattern(K);
    analyzed = true;
  }
  kkt.factorize(K);
  if (kkt.info() != Eigen::Success) throw QpError("qp: KKT factorization failed");
  ++factorizations;
}

// ─── Solver ─────────────────────────────────────────────────────────────────

QpSolver::QpSolver(SolverSettings settings) : settings_(settings) {}
QpSolver::~QpSolver() = default;
QpSolver::QpSolver(QpSolver&&) noexcept = default;
QpSolver& QpSolver::operator=(QpSolver&&) noexcept = default;

bool QpSolver::is_setup() const { return work_ != nullptr; }

const QpProblem& QpSolver::problem() const {
  if (!work_) throw QpError("qp: solver not set up");
  return work_->problem;
}

int QpSolver::factorizations() const { return work_ ? work_->factorizations : 0; }

void QpSolver::setup(const QpProblem& problem) {
  settings_.validate();
  problem.validate();
  auto w = std::make_unique<Workspace>();
  w->problem = problem;
  w->problem.P.makeCompressed();
  w->problem.A.makeCompressed();
  w->n = problem.num_variables();
  w->m = problem.num_constraints();
  w->scale(settings_);
  w->set_rho(settings_, settings_.rho);
  w->factorize(settings_);
  w->x = VectorXd::Zero(w->n);
  w->z = VectorXd::Zero(w->m);
  w->y = VectorXd::Zero(w->m);
  work_ = std::move(w);
}

void QpSolver::update_vectors(const VectorXd& q, const VectorXd& lower, const VectorXd& upper) {
  if (!work_) throw QpError("qp: solver not set up");
  Workspace& w = *work_;
  if (q.size() != w.n || lower.size() != w.m || upper.size() != w.m) {
    throw QpError("qp: update_vectors dimension mismatch");
  }
  for (int i = 0; i < w.m; ++i) {
    if (lower(i) > upper(i)) throw QpError("qp: lower > upper in row " + std::to_string(i));
  }
  // Equality/inequality classification drives the rho vector; refactor only
  // when it changes.
  const VectorXd old_rho = w.rho;
  w.problem.q = q;
  w.problem.lower = lower;
  w.problem.upper = upper;
  w.scale_vectors();
  w.set_rho(settings_, w.rho_scalar);
  if (w.rho != old_rho) w.factorize(settings_);
}

void QpSolver::update_matrices(const SparseMatrix& P, const SparseMatrix& A) {
  if (!work_) throw QpError("qp: solver not set up");
  Workspace& w = *work_;
  SparseMatrix Pc = P;
  SparseMatrix Ac = A;
  Pc.makeCompressed();
  Ac.makeCompressed();
  if (!same_pattern(Pc, w.problem.P) || !same_pattern(Ac, w.problem.A)) {
    throw QpError("qp: update_matrices requires the original sparsity pattern");
  }
  w.problem.P = std::move(Pc);
  w.problem.A = std::move(Ac);
  w.scale(settings_);
  w.factorize(settings_);
}

void QpSolver::update(const QpProblem& problem) {
  if (!work_) throw QpError("qp: solver not set up");
  Workspace& w = *work_;
  if (problem.num_variables() != w.n || problem.num_constraints() != w.m) {
    throw QpError("qp: update dimension mismatch");
  }
  QpProblem next = problem;
  next.P.makeCompressed();
  next.A.makeCompressed();
  if (!same_pattern(next.P, w.problem.P) || !same_pattern(next.A, w.problem.A)) {
    throw QpError("qp: update requires the original sparsity pattern");
  }
  w.problem = std::move(next);
  w.scale(settings_);
  w.set_rho(settings_, w.rho_scalar);
  w.factorize(settings_);
}

QpSolution QpSolver::solve(const std::optional<WarmStart>& warm_start) {
  if (!work_) throw QpError("qp: solver not set up");
  settings_.validate();
  Workspace& w = *work_;
  const SolverSettings& s = settings_;
  const int n = w.n;
  const int m = w.m;
  const QpProblem& prob = w.problem;

  if (warm_start) {
    if (warm_start->x.size() != n || warm_start->y.size() != m) {
      throw QpError("qp: warm start dimension mismatch");
    }
    w.x = w.Dinv.cwiseProduct(warm_start->x);
    w.y = w.c * w.Einv.cwiseProduct(warm_start->y);
    w.z = (w.As * w.x).cwiseMax(w.ls).cwiseMin(w.us);
  } else {
    w.x.setZero();
    w.y.setZero();
    w.z.setZero();
  }

  VectorXd rhs(n + m);
  VectorXd sol(n + m);
  VectorXd x_prev(n), y_prev(m), z_relax(m);
  VectorXd Ax(m), Px(n), ATy(n);

  QpSolution out;
  out.status = QpStatus::kMaxIter;

  // Unscaled residuals and tolerances from the current iterate.
  auto residuals = [&](double& prim, double& dual, double& eps_p, double& eps_d) {
    Ax.noalias() = w.As * w.x;
    Px.noalias() = w.Ps * w.x;
    ATy.noalias() = w.AsT * w.y;
    prim = inf_norm(w.Einv.cwiseProduct(Ax - w.z));
    dual = inf_norm(w.Dinv.cwiseProduct(Px + w.qs + ATy)) / w.c;
    eps_p = s.eps_abs + s.eps_rel * std::max(inf_norm(w.Einv.cwiseProduct(Ax)),
                                             inf_norm(w.Einv.cwiseProduct(w.z)));
    eps_d = s.eps_abs + s.eps_rel *
                            std::max({inf_norm(w.Dinv.cwiseProduct(Px)),
                                      inf_norm(w.Dinv.cwiseProduct(ATy)),
                                      inf_norm(w.Dinv.cwiseProduct(w.qs))}) /
                            w.c;
  };

  auto primal_infeasible = [&]() {
    VectorXd dy = w.E.cwiseProduct(w.y - y_prev) / w.c;
    for (int i = 0; i < m; ++i) {
      if (is_inf(prob.upper(i))) dy(i) = std::min(dy(i), 0.0);
      if (is_inf(prob.lower(i))) dy(i) = std::max(dy(i), 0.0);
    }
    const double nrm = inf_norm(dy);
    if (nrm < kDivisionTol) return false;
    dy /= nrm;
    double support = 0.0;
    for (int i = 0; i < m; ++i) {
      if (dy(i) > 0.0) support += prob.upper(i) * dy(i);
      if (dy(i) < 0.0) support += prob.lower(i) * dy(i);
    }
    if (!(support < -s.eps_prim_inf)) return false;
    return inf_norm(prob.A.transpose() * dy) < s.eps_prim_inf;
  };

  auto dual_infeasible = [&]() {
    VectorXd dx = w.D.cwiseProduct(w.x - x_prev);
    const double nrm = inf_norm(dx);
    if (nrm < kDivisionTol) return false;
    dx /= nrm;
    if (!(prob.q.dot(dx) < -s.eps_dual_inf)) return false;
    if (inf_norm(prob.P * dx) >= s.eps_dual_inf) return false;
    const VectorXd Adx = prob.A * dx;
    for (int i = 0; i < m; ++i) {
      const bool lo_inf = is_inf(prob.lower(i));
      const bool up_inf = is_inf(prob.upper(i));
      if (lo_inf && up_inf) continue;
      if (up_inf && Adx(i) < -s.eps_dual_inf) return false;
      if (lo_inf && Adx(i) > s.eps_dual_inf) return false;
      if (!lo_inf && !up_inf && std::abs(Adx(i)) > s.eps_dual_inf) return false;
    }
    return true;
  };

  const int budget = s.real_time ? s.rt_iter : s.max_iter;
  const double a = s.alpha_relax;
  double prim = 0.0, dual = 0.0, eps_p = 0.0, eps_d = 0.0;
  int iter = 0;
  bool done = false;
  for (iter = 1; iter <= budget; ++iter) {
    x_prev = w.x;
    y_prev = w.y;
    rhs.head(n) = s.sigma * w.x - w.qs;
    rhs.tail(m) = w.z - w.rho_inv.cwiseProduct(w.y);
    sol = w.kkt.solve(rhs);
    const auto xt = sol.head(n);
    const auto nu = sol.tail(m);
    // z_tilde = z + rho^-1 (nu - y)
    z_relax = a * (w.z + w.rho_inv.cwiseProduct(nu - w.y)) + (1.0 - a) * w.z;
    w.x = a * xt + (1.0 - a) * x_prev;
    const VectorXd z_new = (z_relax + w.rho_inv.cwiseProduct(w.y)).cwiseMax(w.ls).cwiseMin(w.us);
    w.y += w.rho.cwiseProduct(z_relax - z_new);
    w.z = z_new;

    if (s.real_time) continue;
    if (iter % s.check_interval == 0) {
      residuals(prim, dual, eps_p, eps_d);
      if (prim <= eps_p && dual <= eps_d) {
        out.status = QpStatus::kSolved;
        done = true;
        break;
      }
    }
    if (iter % s.infeasibility_interval == 0) {
      if (primal_infeasible()) {
        out.status = QpStatus::kPrimalInfeasible;
        done = true;
        break;
      }
      if (dual_infeasible()) {
        out.status = QpStatus::kDualInfeasible;
        done = true;
        break;
      }
    }
    if (s.adaptive_rho && iter % s.adaptive_rho_interval == 0) {
      const double prim_s = inf_norm(Ax - w.z) /
                            std::max({inf_norm(Ax), inf_norm(w.z), kDivisionTol});
      const double dual_s = inf_norm(Px + w.qs + ATy) /
                            std::max({inf_norm(Px), inf_norm(ATy), inf_norm(w.qs), kDivisionTol});
      const double rho_new =
          std::clamp(w.rho_scalar * std::sqrt(prim_s / std::max(dual_s, kDivisionTol)),
                     kRhoMin, kRhoMax);
      if (rho_new > s.adaptive_rho_tolerance * w.rho_scalar ||
          rho_new < w.rho_scalar / s.adaptive_rho_tolerance) {
        w.set_rho(s, rho_new);
        w.factorize(s);
      }
    }
  }
  if (!done) iter = budget;
  if (s.real_time || !done) {
    residuals(prim, dual, eps_p, eps_d);
    if (prim <= eps_p && dual <= eps_d) {
      out.status = QpStatus::kSolved;
    } else if (primal_infeasible()) {
      out.status = QpStatus::kPrimalInfeasible;
    } else if (dual_infeasible()) {
      out.status = QpStatus::kDualInfeasible;
    }
  } else if (out.status != QpStatus::kSolved) {
    residuals(prim, dual, eps_p, eps_d);
  }

  if (s.polish && (out.status == QpStatus::kSolved || out.status == QpStatus::kMaxIter)) {
    const VectorXd x0 = w.x, y0 = w.y, z0 = w.z;
    if (w.polish(s)) {
      const double prim0 = prim, dual0 = dual;
      residuals(prim, dual, eps_p, eps_d);
      if (prim <= std::max(prim0, 1e-10) && dual <= std::max(dual0, 1e-10)) {
        out.polished = true;
        if (prim <= eps_p && dual <= eps_d) out.status = QpStatus::kSolved;
      } else {
        w.x = x0;
        w.y = y0;
        w.z = z0;
        prim = prim0;
        dual = dual0;
      }
    }
  }

  out.iterations = iter;
  out.x = w.D.cwiseProduct(w.x);
  out.y = w.E.cwiseProduct(w.y) / w.c;
  out.primal_residual = prim;
  out.dual_residual = dual;
  out.objective = prob.objective(out.x);
  return out;
}

QpSolution solve(const QpProblem& problem, const SolverSettings& settings,
                 const std::optional<WarmStart>& warm_start) {
  QpSolver solver(settings);
  solver.setup(problem);
  return solver.solve(warm_start);
}

// ─── Debug dump ─────────────────────────────────────────────────────────────

namespace {

nlohmann::json sparse_json(const SparseMatrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json cols = nlohmann::json::array();
  nlohmann::json vals = nlohmann::json::array();
  for (int j = 0; j < M.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(M, j); it; ++it) {
      rows.push_back(it.row());
      cols.push_back(j);
      vals.push_back(it.value());
    }
  }
  return {{"rows", M.rows()}, {"cols", M.cols()}, {"i", rows}, {"j", cols}, {"v", vals}};
}

SparseMatrix sparse_from_json(const nlohmann::json& j) {
  SparseMatrix M(j.at("rows").get<int>(), j.at("cols").get<int>());
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < j.at("v").size(); ++k) {
    t.emplace_back(j.at("i")[k].get<int>(), j.at("j")[k].get<int>(), j.at("v")[k].get<double>());
  }
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

// JSON has no infinity; infinite bounds are written as null.
nlohmann::json vector_json(const VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      a.push_back(x);
    } else {
      a.push_back(x > 0 ? "inf" : "-inf");
    }
  }
  return a;
}

VectorXd vector_from_json(const nlohmann::json& a) {
  VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].is_string()) {
      v(static_cast<Eigen::Index>(k)) = a[k].get<std::string>() == "inf"
                                            ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity();
    } else {
      v(static_cast<Eigen::Index>(k)) = a[k].get<double>();
    }
  }
  return v;
}

}  // namespace

void save_problem(const QpProblem& problem, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "hopper-qp";
  j["version"] = 1;
  j["P"] = sparse_json(problem.P);
  j["q"] = vector_json(problem.q);
  j["A"] = sparse_json(problem.A);
  j["lower"] = vector_json(problem.lower);
  j["upper"] = vector_json(problem.upper);
  std::ofstream out(path);
  if (!out) throw QpError("qp: cannot write " + path.string());
  out << j.dump() << '\n';
}

QpProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw QpError("qp: cannot read " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != "hopper-qp") throw QpError("qp: unrecognized dump format");
  return QpProblem(sparse_from_json(j.at("P")), vector_from_json(j.at("q")),
                   sparse_from_json(j.at("A")), vector_from_json(j.at("lower")),
                   vector_from_json(j.at("upper")));
}

}  // namespace hopper
