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

#ifndef HOPPER_QP_HPP_
#define HOPPER_QP_HPP_

// Sparse convex QP
//
//   minimize    1/2 x' P x + q' x
//   subject to  l <= A x <= u
//
// solved by an operator-splitting (ADMM) iteration on the quasi-definite KKT
// system. The KKT matrix is factorized with a sparse LDL' whose symbolic
// analysis is computed once per sparsity pattern; vector updates reuse the
// numeric factorization as well.
//
// Dual sign convention: y_i > 0 when the upper bound of row i is active and
// y_i < 0 for an active lower bound, so that P x + q + A' y = 0 at the optimum.

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hopper {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Bounds at or beyond this magnitude are treated as infinite.
inline constexpr double kQpInfinity = 1e20;

class QpError : public std::runtime_error {
 public:
  explicit QpError(const std::string& what) : std::runtime_error(what) {}
};

struct QpProblem {
  SparseMatrix P;  // full symmetric storage
  Eigen::VectorXd q;
  SparseMatrix A;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  QpProblem() = default;
  /// Validates dimensions, bound ordering, symmetry and positive
  /// semidefiniteness (Cholesky of P + 1e-9 I). Throws QpError.
  QpProblem(SparseMatrix P, Eigen::VectorXd q, SparseMatrix A, Eigen::VectorXd lower,
            Eigen::VectorXd upper);

  int num_variables() const { return static_cast<int>(q.size()); }
  int num_constraints() const { return static_cast<int>(lower.size()); }
  double objective(const Eigen::VectorXd& x) const;
  void validate() const;
};

enum class QpStatus { kSolved, kMaxIter, kPrimalInfeasible, kDualInfeasible };

std::string_view to_string(QpStatus status);

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  QpStatus status = QpStatus::kMaxIter;
  int iterations = 0;
  double primal_residual = 0.0;  // |A x - z|_inf, unscaled
  double dual_residual = 0.0;    // |P x + q + A' y|_inf, unscaled
  double objective = 0.0;
  bool polished = false;

  bool solved() const { return status == QpStatus::kSolved; }
};

struct SolverSettings {
  double eps_abs = 1e-4;
  double eps_rel = 1e-4;
  double eps_prim_inf = 1e-5;
  double eps_dual_inf = 1e-5;
  int max_iter = 4000;
  int rt_iter = 50;
  bool real_time = false;        // run exactly rt_iter iterations
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha_relax = 1.6;
  double rho_eq_scale = 1e3;     // rho multiplier on equality rows
  int check_interval = 1;        // termination checks, converged mode
  int infeasibility_interval = 25;
  int scaling_iterations = 10;   // Ruiz equilibration passes, 0 disables
  bool adaptive_rho = false;
  int adaptive_rho_interval = 25;
  double adaptive_rho_tolerance = 5.0;
  bool polish = false;           // active-set refinement after the iterations
  double polish_delta = 1e-7;    // KKT regularization of the refinement
  int polish_refine = 3;         // iterative refinement passes

  void validate() const;
};

struct WarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// Stateful solver: owns the scaled problem data and the KKT factorization.
class QpSolver {
 public:
  explicit QpSolver(SolverSettings settings = {});
  ~QpSolver();
  QpSolver(QpSolver&&) noexcept;
  QpSolver& operator=(QpSolver&&) noexcept;
  QpSolver(const QpSolver&) = delete;
  QpSolver& operator=(const QpSolver&) = delete;

  /// Scales the problem, analyzes the KKT pattern and factorizes it.
  void setup(const QpProblem& problem);

  /// Replaces q, l, u keeping the factorization. Throws on size mismatch.
  void update_vectors(const Eigen::VectorXd& q, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper);

  /// Replaces the values of P and A. The sparsity pattern must match the
  /// one given to setup(); only the numeric factorization is recomputed.
  void update_matrices(const SparseMatrix& P, const SparseMatrix& A);

  /// Replaces all problem data at once (same pattern) with a single numeric
  /// factorization.
  void update(const QpProblem& problem);

  QpSolution solve(const std::optional<WarmStart>& warm_start = std::nullopt);

  bool is_setup() const;
  const QpProblem& problem() const;
  SolverSettings& settings() { return settings_; }
  const SolverSettings& settings() const { return settings_; }
  int factorizations() const;

 private:
  struct Workspace;
  SolverSettings settings_;
  std::unique_ptr<Workspace> work_;
};

/// One-shot convenience wrapper.
QpSolution solve(const QpProblem& problem, const SolverSettings& settings = {},
                 const std::optional<WarmStart>& warm_start = std::nullopt);

/// Debug dump with exact decimal round trip.
void save_problem(const QpProblem& problem, const std::filesystem::path& path);
QpProblem load_problem(const std::filesystem::path& path);

}  // namespace hopper

#endif  // HOPPER_QP_HPP_
