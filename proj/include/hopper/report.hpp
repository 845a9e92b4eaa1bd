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
#ifndef HOPPER_REPORT_HPP_
#define HOPPER_REPORT_HPP_

// Summary tables and vector plots rendered from run and sweep logs. The
// output depends only on the log contents, never on file order or paths.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hopper/energy.hpp"
#include "hopper/harness.hpp"

namespace hopper {

struct EnergyGroup {
  bool ups = true;
  std::vector<double> energies;  // one per run, ordered by seed
  double mean = 0.0;
  double stddev = 0.0;           // sample standard deviation
};

struct TorqueGroup {
  bool ups = true;
  std::array<TorqueStats, 2> stats{};  // stance |tau| pooled over runs
};

struct Report {
  std::vector<EnergyGroup> energy;   // UPS on first
  std::vector<TorqueGroup> torque;
  std::vector<SweepResult> sweeps;   // sorted by axis name
  std::string text;                  // rendered tables
  std::vector<std::pair<std::string, std::string>> plots;  // file name, SVG
};

/// Mean and sample standard deviation; zero spread for a single value.
std::pair<double, double> mean_std(const std::vector<double>& v);

/// Builds the report from "run" and "sweep" logs. Throws CsvError for a
/// malformed log and std::invalid_argument for an empty or unusable set.
Report build_report(const std::vector<std::filesystem::path>& logs);

/// Writes report.txt and the plots into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

}  // namespace hopper

#endif  // HOPPER_REPORT_HPP_
