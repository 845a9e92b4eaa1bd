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
#include "hopper/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace hopper {
namespace {

std::string num(double v) { return format_number(v); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

const char* on_off(bool ups) { return ups ? "on" : "off"; }

bool parse_on_off(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw std::invalid_argument("expected on or off, found " + s);
}

SweepPoint measure(const ExperimentConfig& config, std::shared_ptr<const GaitLibrary> library,
                   bool ups, double k_s, double speed) {
  SweepPoint p;
  p.ups = ups;
  p.speed = speed;
  p.k_s = k_s;
  p.run_id = run_id(ups, config.seeds.front());
  const SweepSettings& sw = config.sweep;
  RunOptions o = config.run;
  o.profile = {{sw.lead_hops + sw.hops, speed}};
  o.start_speed = speed;
  o.seed = config.seeds.front();
  o.keep_samples = false;
  o.keep_ticks = false;
  const RunResult r = run_closed_loop(run_setup(config, ups, k_s), std::move(library), o);
  p.degraded_ticks = r.degraded_ticks;
  p.violation_ticks = r.violation_ticks;
  p.mpc_ticks = r.mpc_ticks;
  p.max_abs_pitch = r.max_abs_pitch;
  const auto w = steady_window(r, sw.hops, sw.settle, sw.tolerance);
  if (w) {
    // Faults after the window closed do not affect the measurement.
    p.flag = r.degraded_ticks > 0 ? "degraded" : "ok";
    p.energy = w->energy;
    p.distance = w->distance;
    p.frequency = w->frequency;
    p.mean_speed = w->mean_speed;
    p.cot = std::abs(w->distance) > 1e-9
                ? cost_of_transport(w->energy, std::abs(w->distance), config.setup.constants.mass,
                                    config.setup.constants.g())
                : std::numeric_limits<double>::quiet_NaN();
  } else {
    p.flag = r.fault ? "fault" : "no-window";
  }
  return p;
}

void finish_sweep(SweepResult& s) {
  s.gaps = 0;
  double sum = 0.0;
  int n = 0;
  for (const SweepPoint& p : s.points) {
    if (!p.measured()) ++s.gaps;
    if (!p.ups) continue;
    const SweepPoint* off = s.find(p.axis, false);
    if (p.measured() && off && off->measured() && off->cot > 0.0) {
      sum += 1.0 - p.cot / off->cot;
      ++n;
    }
  }
  s.mean_reduction = n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

const std::vector<std::string> kTimeseriesColumns{
    "time",   "x",    "z",     "theta",  "vx",     "vz",    "theta_dot", "q_hip",
    "q_knee", "qd_hip", "qd_knee", "stance", "grf_x", "grf_z", "tau_hip", "tau_knee",
    "power",  "energy", "v_des", "tick"};

const std::vector<std::string> kSummaryColumns{
    "run_id",        "ups",        "seed",      "profile",        "energy",      "distance",
    "duration",      "hops",       "max_pitch", "mpc_ticks",      "degraded_ticks",
    "violation_ticks", "median_tick_ms", "max_tick_ms", "completed", "fault_tick",
    "hip_mean",      "hip_q1",     "hip_median", "hip_q3",        "hip_peak",    "knee_mean",
    "knee_q1",       "knee_median", "knee_q3",  "knee_peak",      "fault"};

const std::vector<std::string> kSweepColumns{
    "axis",       "ups",        "speed",     "k_s",      "flag",           "cot",
    "energy",     "distance",   "frequency", "mean_speed", "degraded_ticks", "violation_ticks",
    "mpc_ticks",  "max_pitch",  "run_id"};

std::string profile_string(const std::vector<VelocitySegment>& profile) {
  std::string s;
  for (const VelocitySegment& seg : profile) {
    if (!s.empty()) s += '+';
    s += std::to_string(seg.hops) + "x" + num(seg.speed);
  }
  return s;
}

std::string run_id(bool ups, std::uint64_t seed) {
  return std::string("ups-") + on_off(ups) + "_seed-" + std::to_string(seed);
}

RunSummary summarize(const RunResult& result, bool ups, std::uint64_t seed,
                     const std::vector<VelocitySegment>& profile) {
  RunSummary s;
  s.run_id = run_id(ups, seed);
  s.ups = ups;
  s.seed = seed;
  s.profile = profile_string(profile);
  s.energy = result.energy;
  s.distance = result.distance;
  s.duration = result.duration;
  s.hops = result.apexes.empty() ? 0 : static_cast<int>(result.apexes.size()) - 1;
  s.max_abs_pitch = result.max_abs_pitch;
  s.mpc_ticks = result.mpc_ticks;
  s.degraded_ticks = result.degraded_ticks;
  s.violation_ticks = result.violation_ticks;
  std::vector<double> ms;
  for (const TickRecord& t : result.ticks) {
    if (t.telemetry.mpc) ms.push_back(t.telemetry.total_ms);
  }
  s.median_tick_ms = median(ms);
  s.max_tick_ms = ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end());
  s.completed = result.completed;
  s.fault = result.fault.value_or("");
  s.fault_tick = result.fault_tick;
  bool any_stance = false;
  for (const TorqueSample& t : result.torques) any_stance |= t.stance;
  if (any_stance) s.torque = torque_stats(result.torques);
  return s;
}

CsvTable timeseries_table(const RunResult& result, const RunSummary& summary) {
  CsvTable t;
  t.kind = "run";
  t.columns = kTimeseriesColumns;
  t.meta["run_id"] = summary.run_id;
  t.meta["ups"] = on_off(summary.ups);
  t.meta["seed"] = std::to_string(summary.seed);
  t.meta["profile"] = summary.profile;
  for (const RunSample& r : result.samples) {
    const RobotState& x = r.robot;
    t.rows.push_back({num(r.time), num(x.p_c.x()), num(x.p_c.y()), num(x.theta), num(x.v_c.x()),
                      num(x.v_c.y()), num(x.theta_dot), num(x.q(0)), num(x.q(1)), num(x.qdot(0)),
                      num(x.qdot(1)), r.phase == Phase::kStance ? "1" : "0", num(r.grf.x()),
                      num(r.grf.y()), num(r.tau(0)), num(r.tau(1)), num(r.power), num(r.energy),
                      num(r.desired_speed), std::to_string(r.tick)});
  }
  return t;
}

CsvTable apex_table(const RunResult& result) {
  CsvTable t;
  t.kind = "apex";
  t.columns = {"hop", "time", "height", "vx", "v_des", "energy", "x"};
  for (const ApexRecord& a : result.apexes) {
    t.rows.push_back({std::to_string(a.hop), num(a.time), num(a.apex.height),
                      num(a.apex.velocity), num(a.desired_speed), num(a.energy), num(a.x)});
  }
  return t;
}

CsvTable summary_table(const std::vector<RunSummary>& runs) {
  CsvTable t;
  t.kind = "summary";
  t.columns = kSummaryColumns;
  for (const RunSummary& s : runs) {
    std::vector<std::string> row{s.run_id,
                                 on_off(s.ups),
                                 std::to_string(s.seed),
                                 s.profile,
                                 num(s.energy),
                                 num(s.distance),
                                 num(s.duration),
                                 std::to_string(s.hops),
                                 num(s.max_abs_pitch),
                                 std::to_string(s.mpc_ticks),
                                 std::to_string(s.degraded_ticks),
                                 std::to_string(s.violation_ticks),
                                 num(s.median_tick_ms),
                                 num(s.max_tick_ms),
                                 s.completed ? "1" : "0",
                                 std::to_string(s.fault_tick)};
    for (const TorqueStats& j : s.torque) {
      for (double v : {j.mean_abs, j.q1, j.median, j.q3, j.peak}) row.push_back(num(v));
    }
    std::string fault = s.fault;
    std::replace(fault.begin(), fault.end(), ',', ';');
    row.push_back(fault);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_timeseries(const std::filesystem::path& path) {
  std::vector<std::string> numeric = kTimeseriesColumns;
  CsvTable t = read_csv(path, "run", kTimeseriesColumns, numeric);
  for (const char* key : {"run_id", "ups", "seed"}) {
    if (!t.meta.count(key)) throw CsvError(path.string(), 1, std::string("missing meta ") + key);
  }
  parse_on_off(t.meta.at("ups"));
  return t;
}

std::vector<RunSummary> read_summaries(const std::filesystem::path& path) {
  std::vector<std::string> numeric(kSummaryColumns.begin() + 4, kSummaryColumns.end() - 1);
  numeric.push_back("seed");
  const CsvTable t = read_csv(path, "summary", kSummaryColumns, numeric);
  std::vector<RunSummary> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    RunSummary s;
    s.run_id = t.text(i, "run_id");
    try {
      s.ups = parse_on_off(t.text(i, "ups"));
    } catch (const std::invalid_argument& e) {
      throw CsvError(path.string(), 0, e.what());
    }
    s.seed = static_cast<std::uint64_t>(t.number(i, "seed"));
    s.profile = t.text(i, "profile");
    s.energy = t.number(i, "energy");
    s.distance = t.number(i, "distance");
    s.duration = t.number(i, "duration");
    s.hops = static_cast<int>(t.number(i, "hops"));
    s.max_abs_pitch = t.number(i, "max_pitch");
    s.mpc_ticks = static_cast<int>(t.number(i, "mpc_ticks"));
    s.degraded_ticks = static_cast<int>(t.number(i, "degraded_ticks"));
    s.violation_ticks = static_cast<int>(t.number(i, "violation_ticks"));
    s.median_tick_ms = t.number(i, "median_tick_ms");
    s.max_tick_ms = t.number(i, "max_tick_ms");
    s.completed = t.number(i, "completed") != 0.0;
    s.fault_tick = static_cast<std::int64_t>(t.number(i, "fault_tick"));
    const char* joints[2] = {"hip", "knee"};
    for (int j = 0; j < 2; ++j) {
      const std::string p = joints[j];
      s.torque[j].mean_abs = t.number(i, p + "_mean");
      s.torque[j].q1 = t.number(i, p + "_q1");
      s.torque[j].median = t.number(i, p + "_median");
      s.torque[j].q3 = t.number(i, p + "_q3");
      s.torque[j].peak = t.number(i, p + "_peak");
    }
    s.fault = t.text(i, "fault");
    out.push_back(std::move(s));
  }
  return out;
}

RunSetup run_setup(const ExperimentConfig& config, bool ups, double k_s) {
  RunSetup s = config.setup;
  s.ups.enabled = ups;
  s.constants.k_s = k_s;
  return s;
}

std::shared_ptr<const GaitLibrary> build_library(const ExperimentConfig& config, double k_s) {
  RobotConstants c = config.setup.constants;
  c.k_s = k_s;
  return std::make_shared<GaitLibrary>(GaitLibrary::build(slip_params(c), config.library));
}

const SweepPoint* SweepResult::find(double value, bool ups) const {
  for (const SweepPoint& p : points) {
    if (p.ups == ups && std::abs(p.axis - value) <= 1e-9 * std::max(1.0, std::abs(value))) return &p;
  }
  return nullptr;
}

SweepResult sweep_velocity(const ExperimentConfig& config,
                           std::shared_ptr<const GaitLibrary> library) {
  const std::vector<double> speeds = config.sweep.velocity.values();
  SweepResult out;
  out.axis = "speed";
  out.points.resize(2 * speeds.size());
  const double k_s = config.setup.constants.k_s;
  parallel_for(static_cast<int>(out.points.size()), config.jobs, [&](int i) {
    const double v = speeds[i / 2];
    SweepPoint p = measure(config, library, i % 2 == 0, k_s, v);
    p.axis = v;
    out.points[i] = std::move(p);
  });
  finish_sweep(out);
  return out;
}

SweepResult sweep_frequency(const ExperimentConfig& config) {
  const std::vector<double> ks = config.sweep.stiffness.values();
  std::vector<std::shared_ptr<const GaitLibrary>> libs(ks.size());
  parallel_for(static_cast<int>(ks.size()), config.jobs,
               [&](int i) { libs[i] = build_library(config, ks[i]); });
  SweepResult out;
  out.axis = "k_s";
  out.points.resize(2 * ks.size());
  parallel_for(static_cast<int>(out.points.size()), config.jobs, [&](int i) {
    SweepPoint p = measure(config, libs[i / 2], i % 2 == 0, ks[i / 2], config.sweep.frequency_speed);
    p.axis = ks[i / 2];
    out.points[i] = std::move(p);
  });
  finish_sweep(out);
  return out;
}

CsvTable sweep_table(const SweepResult& sweep) {
  CsvTable t;
  t.kind = "sweep";
  t.columns = kSweepColumns;
  t.meta["axis"] = sweep.axis;
  t.meta["mean_reduction"] = num(sweep.mean_reduction);
  t.meta["gaps"] = std::to_string(sweep.gaps);
  for (const SweepPoint& p : sweep.points) {
    t.rows.push_back({num(p.axis), on_off(p.ups), num(p.speed), num(p.k_s), p.flag, num(p.cot),
                      num(p.energy), num(p.distance), num(p.frequency), num(p.mean_speed),
                      std::to_string(p.degraded_ticks), std::to_string(p.violation_ticks),
                      std::to_string(p.mpc_ticks), num(p.max_abs_pitch), p.run_id});
  }
  return t;
}

SweepResult read_sweep(const std::filesystem::path& path) {
  const std::vector<std::string> numeric{"axis",      "speed",      "k_s",
                                         "cot",       "energy",     "distance",
                                         "frequency", "mean_speed", "degraded_ticks",
                                         "violation_ticks", "mpc_ticks", "max_pitch"};
  const CsvTable t = read_csv(path, "sweep", kSweepColumns, numeric);
  SweepResult s;
  const auto axis = t.meta.find("axis");
  if (axis == t.meta.end()) throw CsvError(path.string(), 1, "missing meta axis");
  s.axis = axis->second;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SweepPoint p;
    p.axis = t.number(i, "axis");
    try {
      p.ups = parse_on_off(t.text(i, "ups"));
    } catch (const std::invalid_argument& e) {
      throw CsvError(path.string(), 0, e.what());
    }
    p.speed = t.number(i, "speed");
    p.k_s = t.number(i, "k_s");
    p.flag = t.text(i, "flag");
    p.cot = t.number(i, "cot");
    p.energy = t.number(i, "energy");
    p.distance = t.number(i, "distance");
    p.frequency = t.number(i, "frequency");
    p.mean_speed = t.number(i, "mean_speed");
    p.degraded_ticks = static_cast<int>(t.number(i, "degraded_ticks"));
    p.violation_ticks = static_cast<int>(t.number(i, "violation_ticks"));
    p.mpc_ticks = static_cast<int>(t.number(i, "mpc_ticks"));
    p.max_abs_pitch = t.number(i, "max_pitch");
    p.run_id = t.text(i, "run_id");
    s.points.push_back(std::move(p));
  }
  finish_sweep(s);
  return s;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (n <= 0) return;
  const int workers = std::clamp(jobs, 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hopper
