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
#ifndef HOPPER_HARNESS_HPP_
#define HOPPER_HARNESS_HPP_

// Experiment orchestration behind the command-line tool: single runs with
// their logs, and the velocity and stiffness sweeps fanned out over worker
// threads. Results are placed by grid index, so the output does not depend
// on the number of workers.

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "hopper/config.hpp"
#include "hopper/csv.hpp"
#include "hopper/energy.hpp"
#include "hopper/simulation.hpp"

namespace hopper {

struct RunSummary {
  std::string run_id;
  bool ups = true;
  std::uint64_t seed = 0;
  std::string profile;         // "hops x speed" segments joined by '+'
  double energy = 0.0;         // E+ over the whole run [J]
  double distance = 0.0;       // [m]
  double duration = 0.0;       // [s]
  int hops = 0;
  double max_abs_pitch = 0.0;  // [rad]
  int mpc_ticks = 0;
  int degraded_ticks = 0;
  int violation_ticks = 0;
  double median_tick_ms = 0.0;
  double max_tick_ms = 0.0;
  bool completed = false;
  std::string fault;
  std::int64_t fault_tick = -1;
  std::array<TorqueStats, 2> torque{};  // stance |tau|, hip and knee
};

std::string profile_string(const std::vector<VelocitySegment>& profile);
std::string run_id(bool ups, std::uint64_t seed);

RunSummary summarize(const RunResult& result, bool ups, std::uint64_t seed,
                     const std::vector<VelocitySegment>& profile);

/// Plant-rate rows of a run. Requires keep_samples.
CsvTable timeseries_table(const RunResult& result, const RunSummary& summary);
CsvTable summary_table(const std::vector<RunSummary>& runs);
/// Apex rows of a run; the velocity tracking check reads these.
CsvTable apex_table(const RunResult& result);

extern const std::vector<std::string> kTimeseriesColumns;
extern const std::vector<std::string> kSummaryColumns;

CsvTable read_timeseries(const std::filesystem::path& path);
std::vector<RunSummary> read_summaries(const std::filesystem::path& path);

/// Setup of one run: configuration constants with the given UPS state and
/// leg stiffness.
RunSetup run_setup(const ExperimentConfig& config, bool ups, double k_s);
std::shared_ptr<const GaitLibrary> build_library(const ExperimentConfig& config, double k_s);

struct SweepPoint {
  double axis = 0.0;        // commanded speed [m/s] or k_s [N/m]
  bool ups = true;
  double speed = 0.0;       // commanded [m/s]
  double k_s = 0.0;         // [N/m]
  std::string flag = "ok";  // ok | degraded | no-window | fault
  double cot = 0.0;
  double energy = 0.0;      // E+ over the steady window [J]
  double distance = 0.0;
  double frequency = 0.0;   // [Hz]
  double mean_speed = 0.0;
  int degraded_ticks = 0;
  int violation_ticks = 0;
  int mpc_ticks = 0;
  double max_abs_pitch = 0.0;
  std::string run_id;

  bool measured() const { return flag == "ok" || flag == "degraded"; }
};

struct SweepResult {
  std::string axis;                // "speed" or "k_s"
  std::vector<SweepPoint> points;  // axis-major, UPS on before off
  double mean_reduction = 0.0;     // mean of 1 - CoT_on / CoT_off over paired points
  int gaps = 0;                    // points without a measurement

  bool complete() const { return gaps == 0; }
  const SweepPoint* find(double axis, bool ups) const;
};

extern const std::vector<std::string> kSweepColumns;

SweepResult sweep_velocity(const ExperimentConfig& config,
                           std::shared_ptr<const GaitLibrary> library);
SweepResult sweep_frequency(const ExperimentConfig& config);

CsvTable sweep_table(const SweepResult& sweep);
SweepResult read_sweep(const std::filesystem::path& path);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers stop.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

}  // namespace hopper

#endif  // HOPPER_HARNESS_HPP_
