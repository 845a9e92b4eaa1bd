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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hopper/config.hpp"
#include "hopper/gait_library.hpp"
#include "hopper/harness.hpp"
#include "hopper/kino_mpc.hpp"
#include "hopper/plant.hpp"
#include "hopper/report.hpp"
#include "hopper/slip.hpp"
#include "hopper/srb_mpc.hpp"
#include "oracles/active_set_qp.hpp"

namespace hopper {
namespace {

using Clock = std::chrono::steady_clock;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------- 1, 2

Outcome gait_library() {
  const auto t0 = Clock::now();
  const GaitLibrary lib = GaitLibrary::build(SlipParams{}, GaitLibraryOptions{});
  const double build = seconds_since(t0);
  const std::size_t n = lib.entries().size();
  const double res = lib.max_residual();
  return {n == 61 && res < 1e-6 && build < 10.0,
          std::to_string(n) + " entries, max residual " + fmt("%.2e", res) + ", build " +
              fmt("%.2f s", build)};
}

Outcome deadbeat() {
  const GaitLibrary lib = GaitLibrary::build(SlipParams{}, GaitLibraryOptions{});
  double worst = 0.0;
  bool ok = true;
  for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const GaitTuple t = lib.query(v);
    for (double dv : {-0.1, 0.1}) {
      const ApexState measured{t.apex.height, v + dv};
      const auto out = apex_return_map(measured, deadbeat_alpha(t, measured), lib.params());
      if (!out.apex) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(out.apex->velocity - v) / std::abs(dv));
    }
  }
  ok = ok && worst <= 0.1;
  return {ok, "worst remaining error " + fmt("%.1f %%", 100.0 * worst) + " of the perturbation"};
}

// ---------------------------------------------------------------- 3

SparseMatrix sparse(const MatrixXd& M) {
  SparseMatrix S = M.sparseView();
  S.makeCompressed();
  return S;
}

Outcome qp_oracle() {
  std::mt19937 rng(2024);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SolverSettings settings;
  settings.eps_abs = settings.eps_rel = 1e-7;
  settings.max_iter = 20000;
  double dx = 0.0, kkt = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 30)(rng);
    const int m = std::uniform_int_distribution<int>(0, 2 * n)(rng);
    const MatrixXd M = MatrixXd::NullaryExpr(n, n, [&] { return N(rng); });
    const MatrixXd P = M.transpose() * M + 0.1 * MatrixXd::Identity(n, n);
    const VectorXd q = VectorXd::NullaryExpr(n, [&] { return N(rng); }) * 3.0;
    const MatrixXd A = MatrixXd::NullaryExpr(m, n, [&] { return U(rng) < 0.4 ? N(rng) : 0.0; });
    const VectorXd x0 = VectorXd::NullaryExpr(n, [&] { return N(rng); });
    const VectorXd ax = A * x0;
    VectorXd l(m), u(m);
    for (int i = 0; i < m; ++i) {
      const double kind = U(rng);
      if (i < std::min(m, n / 3)) {
        l(i) = u(i) = ax(i);
      } else if (kind < 0.3) {
        l(i) = ax(i) - U(rng);
        u(i) = kQpInfinity;
      } else if (kind < 0.6) {
        l(i) = -kQpInfinity;
        u(i) = ax(i) + U(rng);
      } else {
        l(i) = ax(i) - U(rng);
        u(i) = ax(i) + U(rng);
      }
    }
    const QpProblem prob(sparse(P), q, sparse(A), l, u);
    const auto ref = oracle::active_set_qp(P, q, A, l, u, x0);
    const QpSolution sol = solve(prob, settings);
    if (sol.status != QpStatus::kSolved) continue;
    ++solved;
    dx = std::max(dx, (sol.x - ref.x).lpNorm<Eigen::Infinity>());
    const VectorXd s = prob.A * sol.x;
    kkt = std::max(kkt, (s - s.cwiseMax(l).cwiseMin(u)).lpNorm<Eigen::Infinity>());
    kkt = std::max(kkt, (prob.P * sol.x + q + prob.A.transpose() * sol.y).lpNorm<Eigen::Infinity>());
  }
  return {solved == 100 && dx < 1e-4 && kkt < 1e-4,
          std::to_string(solved) + "/100 solved, max |dx| " + fmt("%.1e", dx) + ", max KKT " +
              fmt("%.1e", kkt)};
}

// ---------------------------------------------------------------- 4, 5

HorizonReference random_reference(std::mt19937& rng, int N) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HorizonReference ref;
  ref.x0 << 0.05 * u(rng), 0.3 + 0.03 * u(rng), 0.1 * u(rng), u(rng), 0.5 * u(rng), u(rng);
  for (int k = 0; k < N; ++k) {
    const bool contact = k % 3 != 2;
    ref.steps.push_back({0.03 + 0.02 * std::abs(u(rng)), contact});
    ref.f_ref.emplace_back(contact ? 5.0 * u(rng) : 0.0, contact ? 25.0 + 10.0 * u(rng) : 0.0);
    ref.foot.emplace_back(0.05 * u(rng), 0.0);
  }
  for (int k = 0; k <= N; ++k) {
    Vec6 x = ref.x0;
    x(0) += 0.02 * k;
    ref.x_ref.push_back(x);
  }
  return ref;
}

VectorXd random_iterate(std::mt19937& rng, const KinoData& data, const KinoModel& model) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const KinoIndexMap& ix = data.index;
  VectorXd z(ix.num_variables());
  for (int i = 0; i < z.size(); ++i) z(i) = u(rng);
  for (int k = 1; k <= ix.N; ++k) z(ix.state(k) + 1) += 0.3;
  for (int k = 0; k < ix.N; ++k) {
    z(ix.force(k) + 1) = 25.0 + 10.0 * u(rng);
    if (ix.slot[k] < 0) continue;
    z(ix.joint(k)) = 0.7 + 0.5 * u(rng);
    double knee = -1.6 + 0.6 * u(rng);
    if (std::abs(knee - model.ups.engagement_angle) < 1e-3) knee -= 1e-2;
    z(ix.joint(k) + 1) = knee;
    z(ix.torque(k)) = 10.0 * u(rng);
    z(ix.torque(k) + 1) = 10.0 * u(rng);
  }
  return z;
}

Outcome finite_differences() {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  const SrbModel srb;
  double srb_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vec6 x;
    x << u(rng), 0.3 + 0.1 * u(rng), u(rng), u(rng), u(rng), u(rng);
    const Vec2 f(10.0 * u(rng), 30.0 + 10.0 * u(rng));
    const Vec2 foot(0.1 * u(rng), 0.0);
    const ContinuousSrb lin = srb_continuous(x, foot, f, srb, true);
    for (int j = 0; j < 8; ++j) {
      Vec6 xp = x, xm = x;
      Vec2 fp = f, fm = f;
      if (j < 6) {
        xp(j) += h;
        xm(j) -= h;
      } else {
        fp(j - 6) += h;
        fm(j - 6) -= h;
      }
      const Vec6 fd =
          (srb_vector_field(xp, fp, foot, srb) - srb_vector_field(xm, fm, foot, srb)) / (2.0 * h);
      for (int i = 0; i < 6; ++i) {
        const double a = j < 6 ? lin.A(i, j) : lin.B(i, j - 6);
        srb_worst = std::max(srb_worst, rel_err(a, fd(i)));
      }
    }
  }
  const KinoModel model = make_kino_model(RobotConstants{}, LegGeometry{}, UpsModel{});
  const MpcWeights w;
  double jac_worst = 0.0, grad_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const KinoData data = make_kino_data(random_reference(rng, 5), model);
    const VectorXd z = random_iterate(rng, data, model);
    const MatrixXd J = evaluate_constraints(z, data, model).jacobian;
    const VectorXd g = kino_gradient(z, data, w);
    for (int j = 0; j < z.size(); ++j) {
      VectorXd zp = z, zm = z;
      zp(j) += h;
      zm(j) -= h;
      const VectorXd fd = (evaluate_constraints(zp, data, model).value -
                           evaluate_constraints(zm, data, model).value) / (2.0 * h);
      for (int i = 0; i < fd.size(); ++i) jac_worst = std::max(jac_worst, rel_err(J(i, j), fd(i)));
      const double gfd = (kino_objective(zp, data, w) - kino_objective(zm, data, w)) / (2.0 * h);
      grad_worst = std::max(grad_worst, rel_err(g(j), gfd));
    }
  }
  return {srb_worst < 1e-5 && jac_worst < 1e-5 && grad_worst < 1e-5,
          "rigid body " + fmt("%.1e", srb_worst) + ", constraint Jacobian " +
              fmt("%.1e", jac_worst) + ", gradient " + fmt("%.1e", grad_worst)};
}

struct HoverPair {
  MpcSolution srb;
  MpcSolution kino;
};

HoverPair solve_hover(const KinoModel& model) {
  HorizonReference ref;
  ref.x0 << 0.0, 0.3, 0.0, 0.0, 0.0, 0.0;
  for (int k = 0; k < 10; ++k) {
    ref.steps.push_back({0.045, true});
    ref.f_ref.emplace_back(0.0, model.srb.mass * 9.81);
    ref.foot.emplace_back(0.0, 0.0);
  }
  ref.x_ref.assign(11, ref.x0);
  MpcWeights w;
  w.R_tau.setZero();
  SqpSettings sqp;
  sqp.qp.eps_abs = sqp.qp.eps_rel = 1e-10;
  sqp.qp.max_iter = 200000;
  sqp.outer_iterations = 5;
  HoverPair out;
  out.srb = solve_srb(build_srb_qp(ref, w, model.srb), ref, nullptr, sqp.qp);
  out.kino = solve_kino(ref, out.srb, model, w, sqp);
  return out;
}

Outcome layer_consistency() {
  KinoModel on = make_kino_model(RobotConstants{}, LegGeometry{}, UpsModel{});
  KinoModel off = on;
  off.ups.enabled = false;
  const HoverPair a = solve_hover(off);
  double state_gap = 0.0, grf_gap = 0.0;
  for (std::size_t k = 0; k < a.srb.states.size(); ++k) {
    state_gap = std::max(state_gap, (a.kino.states[k] - a.srb.states[k]).cwiseAbs().maxCoeff());
  }
  for (std::size_t k = 0; k < a.srb.grf.size(); ++k) {
    grf_gap = std::max(grf_gap, (a.kino.grf[k] - a.srb.grf[k]).cwiseAbs().maxCoeff());
  }
  const HoverPair b = solve_hover(on);
  const Vec2 q = b.kino.q[0];
  const double tau_s = ups_torque(q(1), on.ups);
  // Signed: the hover knee load is smaller than the engaged spring torque, so
  // the motor torque changes sign rather than shrinking in magnitude.
  const double drop = a.kino.tau[0](1) - b.kino.tau[0](1);
  const double hip = std::abs(a.kino.tau[0](0) - b.kino.tau[0](0));
  const double spring_grf = (a.kino.grf[0] - b.kino.grf[0]).cwiseAbs().maxCoeff();
  const bool ok = state_gap < 1e-3 && grf_gap < 1e-3 && q(1) < on.ups.engagement_angle &&
                  tau_s > 0.0 && std::abs(drop - std::abs(tau_s)) < 1e-6 && hip < 1e-6 &&
                  spring_grf < 1e-3;
  return {ok, "spring off: state " + fmt("%.1e", state_gap) + ", GRF " + fmt("%.1e N", grf_gap) +
                  "; spring on: knee drop " + fmt("%.4f", drop) + " vs tau_s " +
                  fmt("%.4f N m", tau_s) + ", hip change " + fmt("%.1e", hip) +
                  ", GRF change " + fmt("%.1e N", spring_grf)};
}

// ---------------------------------------------------------------- closed loop

struct Runs {
  ExperimentConfig config;
  std::shared_ptr<const GaitLibrary> library;
  std::vector<RunSummary> in_place;  // UPS on seeds, then UPS off seeds
  std::vector<RunResult> in_place_results;
  std::optional<RunResult> tracking;
  double tracking_seconds = 0.0;
};

Runs& runs() {
  static Runs r = [] {
    Runs out;
    out.config = ExperimentConfig{};
    out.config.jobs = std::max(1u, std::thread::hardware_concurrency());
    out.library = build_library(out.config, out.config.setup.constants.k_s);
    return out;
  }();
  return r;
}

const std::vector<RunSummary>& in_place_runs() {
  Runs& r = runs();
  if (!r.in_place.empty()) return r.in_place;
  std::vector<std::pair<bool, std::uint64_t>> jobs;
  for (bool ups : {true, false}) {
    for (std::uint64_t seed : r.config.seeds) jobs.emplace_back(ups, seed);
  }
  r.in_place_results.resize(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), r.config.jobs, [&](int i) {
    RunOptions o;
    o.profile = {{10, 0.0}};
    o.seed = jobs[i].second;
    r.in_place_results[i] =
        run_closed_loop(run_setup(r.config, jobs[i].first, r.config.setup.constants.k_s), r.library, o);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    r.in_place.push_back(summarize(r.in_place_results[i], jobs[i].first, jobs[i].second, {{10, 0.0}}));
  }
  return r.in_place;
}

const std::vector<VelocitySegment> kTrackingProfile{{4, 0.0}, {8, 1.0}, {8, 2.0}, {8, 1.5}};

const RunResult& tracking_run() {
  Runs& r = runs();
  if (!r.tracking) {
    RunOptions o;
    o.profile = kTrackingProfile;
    const auto t0 = Clock::now();
    r.tracking = run_closed_loop(run_setup(r.config, true, r.config.setup.constants.k_s), r.library, o);
    r.tracking_seconds = seconds_since(t0);
  }
  return *r.tracking;
}

Outcome velocity_tracking() {
  const RunResult& res = tracking_run();
  if (!res.completed) return {false, "run stopped: " + res.fault.value_or("")};
  double worst = 0.0;
  int start = 0;
  for (std::size_t s = 1; s < kTrackingProfile.size(); ++s) {
    start += kTrackingProfile[s - 1].hops;
    const int end = start + kTrackingProfile[s].hops;
    for (const ApexRecord& a : res.apexes) {
      if (a.hop >= start + 3 && a.hop <= end) {
        worst = std::max(worst, std::abs(a.apex.velocity - kTrackingProfile[s].speed));
      }
    }
  }
  const double secs = runs().tracking_seconds;
  return {worst <= 0.1 && res.max_abs_pitch <= 0.25 && secs < 120.0,
          "worst settled error " + fmt("%.3f m/s", worst) + ", peak pitch " +
              fmt("%.3f rad", res.max_abs_pitch) + ", " + fmt("%.1f s", secs)};
}

Outcome cot_vs_velocity() {
  Runs& r = runs();
  const auto t0 = Clock::now();
  const SweepResult s = sweep_velocity(r.config, r.library);
  const double secs = seconds_since(t0);
  bool every = s.complete();
  int pairs = 0;
  for (const SweepPoint& p : s.points) {
    if (!p.ups) continue;
    const SweepPoint* off = s.find(p.axis, false);
    if (!off || !p.measured() || !off->measured() || !(p.cot < off->cot)) every = false;
    ++pairs;
  }
  return {every && pairs == 10 && s.mean_reduction >= 0.2 && secs < 900.0,
          std::to_string(pairs) + " speeds, UPS lower at every point: " + (every ? "yes" : "no") +
              ", mean reduction " + fmt("%.1f %%", 100.0 * s.mean_reduction) + ", " +
              fmt("%.0f s", secs) + " on " + std::to_string(r.config.jobs) + " threads"};
}

struct Curve {
  std::vector<double> frequency;
  std::vector<double> cot;
};

Outcome cot_vs_frequency() {
  const SweepResult s = sweep_frequency(runs().config);
  if (!s.complete()) return {false, std::to_string(s.gaps) + " sweep points without a measurement"};
  Curve on, off;
  for (const SweepPoint& p : s.points) {
    Curve& c = p.ups ? on : off;
    c.frequency.push_back(p.frequency);
    c.cot.push_back(p.cot);
  }
  std::string detail;
  bool ok = true;
  double argmin_f[2] = {0.0, 0.0};
  int idx = 0;
  for (const Curve* c : {&on, &off}) {
    const std::string name = idx == 0 ? "on" : "off";
    const bool mono = std::is_sorted(c->frequency.begin(), c->frequency.end(),
                                     [](double a, double b) { return a <= b; }) &&
                      std::adjacent_find(c->frequency.begin(), c->frequency.end()) == c->frequency.end();
    const double lo = c->frequency.front(), hi = c->frequency.back();
    const bool span = std::abs(lo - 1.9) <= 0.3 && std::abs(hi - 2.7) <= 0.3;
    const auto it = std::min_element(c->cot.begin(), c->cot.end());
    const std::size_t k = static_cast<std::size_t>(it - c->cot.begin());
    const bool u_shape = k > 0 && k + 1 < c->cot.size() && *it < c->cot.front() && *it < c->cot.back();
    argmin_f[idx] = c->frequency[k];
    ok = ok && mono && span && u_shape;
    detail += "UPS " + name + " " + fmt("%.2f", lo) + "-" + fmt("%.2f Hz", hi) +
              (mono ? "" : " (not monotone)") + (span ? "" : " (span off)") + ", min CoT " +
              fmt("%.3f", *it) + " at " + fmt("%.2f Hz", c->frequency[k]) +
              (u_shape ? "" : " (not U-shaped)") + "; ";
    ++idx;
  }
  const bool order = argmin_f[0] <= argmin_f[1];
  detail += std::string("argmin on <= off: ") + (order ? "yes" : "no");
  return {ok && order, detail};
}

Outcome torque_distributions() {
  const std::vector<RunSummary>& s = in_place_runs();
  const RunSummary* on = nullptr;
  const RunSummary* off = nullptr;
  for (const RunSummary& r : s) {
    if (r.seed != runs().config.seeds.front()) continue;
    (r.ups ? on : off) = &r;
  }
  if (!on->completed || !off->completed) return {false, "in-place run did not complete"};
  const TorqueStats& kon = on->torque[1];
  const TorqueStats& koff = off->torque[1];
  const double knee_shift = koff.mean_abs - kon.mean_abs;
  const double hip_shift = off->torque[0].mean_abs - on->torque[0].mean_abs;
  const bool ok = kon.mean_abs < koff.mean_abs && kon.q3 < koff.q3 &&
                  std::abs(hip_shift) < std::abs(knee_shift);
  return {ok, "knee mean " + fmt("%.2f", koff.mean_abs) + " -> " + fmt("%.2f N m", kon.mean_abs) +
                  ", upper quartile " + fmt("%.2f", koff.q3) + " -> " + fmt("%.2f N m", kon.q3) +
                  ", hip shift " + fmt("%.2f N m", hip_shift)};
}

Outcome energy() {
  const std::vector<RunSummary>& s = in_place_runs();
  std::vector<double> on, off;
  for (const RunSummary& r : s) {
    if (!r.completed) return {false, r.run_id + " did not complete"};
    (r.ups ? on : off).push_back(r.energy);
  }
  const auto [m_on, s_on] = mean_std(on);
  const auto [m_off, s_off] = mean_std(off);
  return {m_on < m_off && m_on + s_on < m_off - s_off,
          "UPS on " + fmt("%.2f", m_on) + " +- " + fmt("%.2f J", s_on) + ", off " +
              fmt("%.2f", m_off) + " +- " + fmt("%.2f J", s_off) + " over " +
              std::to_string(on.size()) + " seeds"};
}

Outcome real_time() {
  double worst = 0.0;
  for (const RunSummary& r : in_place_runs()) worst = std::max(worst, r.median_tick_ms);
  const RunResult& t = tracking_run();
  const RunSummary ts = summarize(t, true, 0, kTrackingProfile);
  worst = std::max(worst, ts.median_tick_ms);
  return {worst < 5.0, "largest median tick " + fmt("%.2f ms", worst) + " (worst tick " +
                           fmt("%.2f ms", ts.max_tick_ms) + " while tracking)"};
}

// ---------------------------------------------------------------- 12

Outcome conservation() {
  const SlipParams params;
  double drift = 0.0;
  for (double vx : {0.0, 0.8, 1.7, -2.4}) {
    SlipState td;
    td.p = Vec2(0.0, params.r0 * std::cos(0.15));
    td.v = Vec2(vx, -1.2);
    const Vec2 foot(params.r0 * std::sin(0.15), 0.0);
    const StanceRollout roll = simulate_stance(td, foot, params);
    const double e0 = slip_energy(td, foot, params);
    for (const SlipNode& n : roll.nodes) {
      drift = std::max(drift, std::abs(slip_energy(n.state, foot, params) - e0) / e0);
    }
  }

  const Plant plant(RobotConstants{}, LegGeometry{}, UpsModel{});
  const Vec2 g(0.0, -9.81);
  const Vec2 p0(0.1, 1.5), v0(0.8, 1.2);
  PlantState s = plant.flight_state(p0, v0, Vec2(0.4, -1.3));
  ActuationCommand hold;
  hold.mode = CommandMode::kSwing;
  hold.q_des = s.robot.q;
  double arc = 0.0;
  for (int i = 0; i < 300; ++i) {
    s = plant.step(s, hold, 1e-3).state;
    arc = std::max(arc, (s.robot.p_c - (p0 + v0 * s.time + 0.5 * g * s.time * s.time))
                            .cwiseAbs().maxCoeff());
  }

  const Vec2 v1(1.0, -0.5);
  s = plant.flight_state(Vec2(0.0, 0.40), v1, Vec2(0.55, -1.287));
  hold.q_des = s.robot.q;
  double jump = 1.0;
  for (int i = 0; i < 200; ++i) {
    const StepResult r = plant.step(s, hold, 1e-3);
    s = r.state;
    if (r.event == PlantEvent::kTouchdown) {
      jump = (s.robot.v_c - (v1 + g * s.time)).cwiseAbs().maxCoeff();
      break;
    }
  }

  // Cones: rigid-body solutions over random horizons and every loaded stance
  // sample of the closed-loop runs.
  std::mt19937 rng(9);
  const double mu = RobotConstants{}.mu;
  double cone = 0.0;
  SrbMpc srb(SrbModel{}, MpcWeights{}, srb_qp_defaults());
  int solves = 0;
  for (int i = 0; i < 50; ++i) {
    const MpcSolution sol = srb.solve(random_reference(rng, 10));
    if (sol.status != QpStatus::kSolved) continue;
    ++solves;
    for (std::size_t k = 0; k < sol.grf.size(); ++k) {
      const Vec2& f = sol.grf[k];
      cone = std::max({cone, std::abs(f.x()) - mu * f.y(), -f.y()});
    }
  }
  double plant_cone = 0.0;
  std::size_t loaded = 0;
  const PlantSettings ps;
  auto scan = [&](const RunResult& r) {
    for (const RunSample& x : r.samples) {
      if (x.phase != Phase::kStance || x.grf.y() <= ps.cone_load_floor) continue;
      ++loaded;
      plant_cone = std::max(plant_cone, std::abs(x.grf.x()) - mu * x.grf.y());
    }
  };
  in_place_runs();
  for (const RunResult& r : runs().in_place_results) scan(r);
  scan(tracking_run());
  const bool ok = drift < 1e-8 && arc < 1e-9 && jump < 1e-9 && solves == 50 && cone < 1e-4 &&
                  plant_cone <= 1e-9;
  return {ok, "SLIP drift " + fmt("%.1e", drift) + ", arc " + fmt("%.1e m", arc) + ", touchdown " +
                  fmt("%.1e m/s", jump) + ", MPC cone excess " + fmt("%.1e N", cone) + " over " +
                  std::to_string(solves) + " solves, plant cone excess " +
                  fmt("%.1e N", plant_cone) + " over " + std::to_string(loaded) + " samples"};
}

}  // namespace
}  // namespace hopper

int main(int argc, char** argv) {
  using namespace hopper;
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gait library", gait_library},
      {"deadbeat recovery", deadbeat},
      {"QP vs active-set oracle", qp_oracle},
      {"finite-difference derivatives", finite_differences},
      {"layer consistency at hover", layer_consistency},
      {"velocity tracking", velocity_tracking},
      {"CoT vs velocity", cot_vs_velocity},
      {"CoT vs frequency", cot_vs_frequency},
      {"torque distributions", torque_distributions},
      {"in-place energy", energy},
      {"real-time budget", real_time},
      {"conservation and cones", conservation},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%-4s %2d  %-30s %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
