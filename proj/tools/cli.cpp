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
#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "hopper/config.hpp"
#include "hopper/csv.hpp"
#include "hopper/gait_library.hpp"
#include "hopper/harness.hpp"
#include "hopper/report.hpp"

namespace hopper {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string ups = "on";
  std::string out;
  std::string library;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  std::vector<std::string> logs;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.config.empty()) c.validate();
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.jobs > 0) c.jobs = o.jobs;
  if (o.seed_set) c.seeds = {o.seed};
  return c;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int cmd_gaitlib(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const GaitLibrary lib = GaitLibrary::build(slip_params(c.setup.constants), c.library);
  const fs::path path = fs::path(c.output_dir) / "gaitlib.txt";
  fs::create_directories(path.parent_path());
  lib.save(path);
  out << "entries " << lib.entries().size() << "  speeds " << fixed(c.library.grid.min, 2) << ".."
      << fixed(c.library.grid.max, 2) << "  max residual " << lib.max_residual() << '\n';
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

std::shared_ptr<const GaitLibrary> library_for(const Options& o, const ExperimentConfig& c) {
  if (o.library.empty()) return build_library(c, c.setup.constants.k_s);
  auto lib = std::make_shared<GaitLibrary>(GaitLibrary::load(o.library));
  if (GaitLibrary::params_hash(lib->params()) !=
      GaitLibrary::params_hash(slip_params(c.setup.constants))) {
    throw SchemaError("library " + o.library + " was built for different template parameters");
  }
  return lib;
}

bool parse_ups(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw SchemaError("--ups must be on or off");
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = load(o);
  const bool ups = parse_ups(o.ups);
  RunOptions ro = c.run;
  if (ro.total_hops() <= 0) {
    err << "error: empty run: the velocity profile has no hops\n";
    return kExitUsage;
  }
  ro.seed = c.seeds.front();
  const auto lib = library_for(o, c);
  const RunResult r = run_closed_loop(run_setup(c, ups, c.setup.constants.k_s), lib, ro);
  const RunSummary s = summarize(r, ups, ro.seed, ro.profile);
  const fs::path dir = c.output_dir;
  write_csv(dir / (s.run_id + ".csv"), timeseries_table(r, s));
  write_csv(dir / (s.run_id + "_apex.csv"), apex_table(r));
  write_csv(dir / (s.run_id + "_summary.csv"), summary_table({s}));
  out << s.run_id << "  hops " << s.hops << "  E+ " << fixed(s.energy, 2) << " J  distance "
      << fixed(s.distance, 3) << " m  max pitch " << fixed(s.max_abs_pitch, 3)
      << " rad  median tick " << fixed(s.median_tick_ms, 2) << " ms\n";
  if (!r.completed) {
    err << "error: run stopped at tick " << r.fault_tick << ": " << s.fault << '\n';
    return kExitRunFailure;
  }
  return kExitOk;
}

int report_sweep(const SweepResult& s, const fs::path& path, std::ostream& out) {
  write_csv(path, sweep_table(s));
  out << s.axis << "  flag on/off  CoT on  CoT off  f on  f off\n";
  for (const SweepPoint& p : s.points) {
    if (!p.ups) continue;
    const SweepPoint* off = s.find(p.axis, false);
    out << fixed(p.axis, 2) << "  " << p.flag << '/' << off->flag << "  " << fixed(p.cot, 3) << "  "
        << fixed(off->cot, 3) << "  " << fixed(p.frequency, 3) << "  " << fixed(off->frequency, 3)
        << '\n';
  }
  out << "mean CoT reduction " << fixed(100.0 * s.mean_reduction, 1) << " %";
  if (!s.complete()) out << "  gaps " << s.gaps;
  out << "\nwrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_sweep_velocity(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const SweepResult s = sweep_velocity(c, library_for(o, c));
  return report_sweep(s, fs::path(c.output_dir) / "sweep_speed.csv", out);
}

int cmd_sweep_frequency(const Options& o, std::ostream& out) {
  const ExperimentConfig c = load(o);
  const SweepResult s = sweep_frequency(c);
  return report_sweep(s, fs::path(c.output_dir) / "sweep_k_s.csv", out);
}

int cmd_report(const Options& o, std::ostream& out) {
  std::vector<fs::path> logs;
  for (const std::string& l : o.logs) {
    if (fs::is_directory(l)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(l)) {
        const std::string kind = e.path().extension() == ".csv" ? csv_kind(e.path()) : "";
        if (kind == "run" || kind == "sweep") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      logs.insert(logs.end(), found.begin(), found.end());
    } else {
      logs.emplace_back(l);
    }
  }
  const Report rep = build_report(logs);
  const fs::path dir = o.out.empty() ? fs::path("report") : fs::path(o.out);
  write_report(rep, dir);
  out << rep.text << "wrote " << (dir / "report.txt").string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar hopper with a parallel knee spring: gait library, closed-loop runs, sweeps"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* s, bool with_ups) {
    s->add_option("--config", o.config, "JSON configuration file");
    s->add_option("--out", o.out, "output directory");
    if (with_ups) s->add_option("--ups", o.ups, "parallel knee spring")->check(CLI::IsMember({"on", "off"}));
    s->add_option("--seed", o.seed, "initial-state seed")->each([&](const std::string&) { o.seed_set = true; });
    s->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* gaitlib = app.add_subcommand("gaitlib", "build and save the gait library");
  common(gaitlib, false);
  CLI::App* run = app.add_subcommand("run", "one closed-loop run over the configured profile");
  common(run, true);
  run->add_option("--library", o.library, "saved gait library");
  CLI::App* sv = app.add_subcommand("sweep-velocity", "cost of transport over commanded speed");
  common(sv, false);
  sv->add_option("--library", o.library, "saved gait library");
  CLI::App* sf = app.add_subcommand("sweep-frequency", "cost of transport over leg stiffness");
  common(sf, false);
  CLI::App* rep = app.add_subcommand("report", "tables and plots from run and sweep logs");
  rep->add_option("logs", o.logs, "log files or directories")->required();
  rep->add_option("--out", o.out, "output directory");

  std::vector<std::string> args(argv.rbegin(), argv.rend() - 1);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    if (*gaitlib) return cmd_gaitlib(o, out);
    if (*run) return cmd_run(o, out, err);
    if (*sv) return cmd_sweep_velocity(o, out);
    if (*sf) return cmd_sweep_frequency(o, out);
    if (*rep) return cmd_report(o, out);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return kExitUsage;
}

}  // namespace hopper
