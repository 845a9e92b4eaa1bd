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
#include "hopper/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace hopper {
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Range of(const std::vector<double>& v, bool zero) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    if (zero) r.include(0.0);
    for (double x : v) r.include(x);
    if (!(r.hi > r.lo)) {
      r.lo = std::isfinite(r.lo) ? r.lo - 1.0 : 0.0;
      r.hi = r.lo + 2.0;
    }
    const double pad = 0.05 * (r.hi - r.lo);
    if (!zero || r.lo < 0.0) r.lo -= pad;
    r.hi += pad;
    return r;
  }
};

// Minimal SVG canvas with one plotting area and linear axes.
class Svg {
 public:
  Svg(std::string title, std::string xlabel, std::string ylabel, Range x, Range y)
      : x_(x), y_(y) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
         << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kW / 2.0, 22, title, "middle", 14);
    text(kL + (kW - kL - kR) / 2.0, kH - 10, xlabel, "middle");
    out_ << "<text transform=\"translate(16," << (kT + (kH - kT - kB) / 2) << ") rotate(-90)\" "
         << "text-anchor=\"middle\">" << ylabel << "</text>\n";
    out_ << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
         << "\" height=\"" << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      line(x_.lo, yv, x_.hi, yv, "#dddddd", 1.0);
      text(kL - 6, py(yv) + 4, fmt("%.3g", yv), "end");
    }
  }

  void x_ticks(const std::vector<std::pair<double, std::string>>& ticks) {
    for (const auto& [v, s] : ticks) text(px(v), kH - kB + 16, s, "middle");
  }
  void x_ticks_auto() {
    std::vector<std::pair<double, std::string>> t;
    for (int i = 0; i <= 4; ++i) {
      const double v = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      t.push_back({v, fmt("%.3g", v)});
    }
    x_ticks(t);
  }
  void line(double x0, double y0, double x1, double y1, const std::string& color, double w) {
    out_ << "<line x1=\"" << fmt("%.2f", px(x0)) << "\" y1=\"" << fmt("%.2f", py(y0))
         << "\" x2=\"" << fmt("%.2f", px(x1)) << "\" y2=\"" << fmt("%.2f", py(y1))
         << "\" stroke=\"" << color << "\" stroke-width=\"" << w << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) out_ << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y)) << ' ';
    out_ << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out_ << "<circle cx=\"" << fmt("%.2f", px(x)) << "\" cy=\"" << fmt("%.2f", py(y))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }
  void box(double x, double half, double q1, double q3, const std::string& color) {
    out_ << "<rect x=\"" << fmt("%.2f", px(x - half)) << "\" y=\"" << fmt("%.2f", py(q3))
         << "\" width=\"" << fmt("%.2f", px(x + half) - px(x - half)) << "\" height=\""
         << fmt("%.2f", py(q1) - py(q3)) << "\" fill=\"" << color
         << "\" fill-opacity=\"0.4\" stroke=\"" << color << "\"/>\n";
  }
  void legend(int slot, const std::string& label, const std::string& color) {
    const double y = kT + 14 + 16 * slot;
    out_ << "<rect x=\"" << kW - kR - 110 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
         << color << "\"/>\n";
    text(kW - kR - 95, y, label, "start");
  }
  void text(double x, double y, const std::string& s, const char* anchor, int size = 12) {
    out_ << "<text x=\"" << fmt("%.1f", x) << "\" y=\"" << fmt("%.1f", y) << "\" text-anchor=\""
         << anchor << "\" font-size=\"" << size << "\">" << s << "</text>\n";
  }
  double px(double x) const { return kL + (x - x_.lo) / (x_.hi - x_.lo) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y_.lo) / (y_.hi - y_.lo) * (kH - kT - kB); }
  std::string str() { return out_.str() + "</svg>\n"; }

 private:
  static constexpr int kW = 640, kH = 400, kL = 70, kR = 20, kT = 40, kB = 50;
  Range x_, y_;
  std::ostringstream out_;
};

const char* kOn = "#1f77b4";
const char* kOff = "#d62728";
const char* label(bool ups) { return ups ? "UPS on" : "UPS off"; }

std::string energy_plot(const std::vector<EnergyGroup>& groups) {
  std::vector<double> ys;
  for (const auto& g : groups) ys.push_back(g.mean + g.stddev);
  Svg s("Positive energy, in-place hopping", "", "E+ [J]", Range{-0.5, groups.size() - 0.5},
        Range::of(ys, true));
  std::vector<std::pair<double, std::string>> ticks;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const EnergyGroup& g = groups[i];
    const std::string c = g.ups ? kOn : kOff;
    s.box(i, 0.25, 0.0, g.mean, c);
    s.line(i, g.mean - g.stddev, i, g.mean + g.stddev, "black", 1.5);
    s.line(i - 0.08, g.mean - g.stddev, i + 0.08, g.mean - g.stddev, "black", 1.5);
    s.line(i - 0.08, g.mean + g.stddev, i + 0.08, g.mean + g.stddev, "black", 1.5);
    ticks.push_back({static_cast<double>(i), label(g.ups)});
  }
  s.x_ticks(ticks);
  return s.str();
}

std::string torque_plot(const std::vector<TorqueGroup>& groups) {
  std::vector<double> ys;
  for (const auto& g : groups)
    for (const auto& j : g.stats) ys.push_back(j.peak);
  const double n = 2.0 * groups.size();
  Svg s("Stance torque distribution", "", "|tau| [N m]", Range{-0.5, n - 0.5}, Range::of(ys, true));
  std::vector<std::pair<double, std::string>> ticks;
  const char* joints[2] = {"hip", "knee"};
  int slot = 0;
  for (int j = 0; j < 2; ++j) {
    for (const auto& g : groups) {
      const TorqueStats& t = g.stats[j];
      const double x = slot;
      const std::string c = g.ups ? kOn : kOff;
      s.line(x, 0.0, x, t.peak, c, 1.0);
      s.box(x, 0.3, t.q1, t.q3, c);
      s.line(x - 0.3, t.median, x + 0.3, t.median, "black", 2.0);
      s.line(x - 0.3, t.mean_abs, x + 0.3, t.mean_abs, c, 1.0);
      ticks.push_back({x, std::string(joints[j]) + " " + (g.ups ? "on" : "off")});
      ++slot;
    }
  }
  s.x_ticks(ticks);
  return s.str();
}

std::string sweep_plot(const SweepResult& sweep) {
  const bool by_speed = sweep.axis == "speed";
  std::vector<double> xs, ys;
  for (const SweepPoint& p : sweep.points) {
    if (!p.measured()) continue;
    xs.push_back(by_speed ? p.axis : p.frequency);
    ys.push_back(p.cot);
  }
  Svg s(by_speed ? "Cost of transport against speed" : "Cost of transport against hop frequency",
        by_speed ? "commanded speed [m/s]" : "hop frequency [Hz]", "CoT", Range::of(xs, false),
        Range::of(ys, true));
  s.x_ticks_auto();
  for (bool ups : {true, false}) {
    std::vector<std::pair<double, double>> pts;
    for (const SweepPoint& p : sweep.points) {
      if (p.ups == ups && p.measured()) pts.push_back({by_speed ? p.axis : p.frequency, p.cot});
    }
    s.polyline(pts, ups ? kOn : kOff);
    s.legend(ups ? 0 : 1, label(ups), ups ? kOn : kOff);
  }
  return s.str();
}

std::string render_text(const Report& r) {
  std::ostringstream o;
  if (!r.energy.empty()) {
    o << "Consumed energy, in-place hopping\n";
    o << "condition   runs   E+ mean [J]   E+ std [J]   per run [J]\n";
    for (const EnergyGroup& g : r.energy) {
      o << (g.ups ? "UPS on " : "UPS off") << "     " << g.energies.size() << "    "
        << fmt("%11.2f", g.mean) << "  " << fmt("%11.2f", g.stddev) << "  ";
      for (double e : g.energies) o << ' ' << fmt("%.2f", e);
      o << '\n';
    }
    if (r.energy.size() == 2 && r.energy[1].mean > 0.0) {
      o << "reduction with UPS: " << fmt("%.1f", 100.0 * (1.0 - r.energy[0].mean / r.energy[1].mean))
        << " %\n";
    }
    o << '\n';
  }
  if (!r.torque.empty()) {
    o << "Stance torque |tau| [N m]\n";
    o << "joint  condition   mean     q1   median     q3   peak\n";
    const char* joints[2] = {"hip ", "knee"};
    for (int j = 0; j < 2; ++j) {
      for (const TorqueGroup& g : r.torque) {
        const TorqueStats& t = g.stats[j];
        o << joints[j] << "   " << (g.ups ? "UPS on " : "UPS off") << "  " << fmt("%6.2f", t.mean_abs)
          << ' ' << fmt("%6.2f", t.q1) << ' ' << fmt("%7.2f", t.median) << ' ' << fmt("%6.2f", t.q3)
          << ' ' << fmt("%6.2f", t.peak) << '\n';
      }
    }
    if (r.torque.size() == 2) {
      for (int j = 0; j < 2; ++j) {
        o << "mean shift " << joints[j] << ": "
          << fmt("%.2f", r.torque[1].stats[j].mean_abs - r.torque[0].stats[j].mean_abs) << " N m\n";
      }
    }
    o << '\n';
  }
  for (const SweepResult& s : r.sweeps) {
    o << "Sweep over " << s.axis << "\n";
    o << s.axis << "   CoT on   CoT off   f on [Hz]   f off [Hz]   flags\n";
    for (const SweepPoint& p : s.points) {
      if (!p.ups) continue;
      const SweepPoint* off = s.find(p.axis, false);
      o << fmt("%8.4g", p.axis) << ' ' << fmt("%8.3f", p.cot) << ' '
        << fmt("%9.3f", off ? off->cot : NAN) << ' ' << fmt("%11.3f", p.frequency) << ' '
        << fmt("%12.3f", off ? off->frequency : NAN) << "   " << p.flag << '/'
        << (off ? off->flag : "missing") << '\n';
    }
    o << "mean CoT reduction with UPS: " << fmt("%.1f", 100.0 * s.mean_reduction) << " %";
    if (!s.complete()) o << " (" << s.gaps << " points missing)";
    o << "\n\n";
  }
  return o.str();
}

}  // namespace

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean_std: no values");
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  if (v.size() < 2) return {m, 0.0};
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / (v.size() - 1))};
}

Report build_report(const std::vector<std::filesystem::path>& logs) {
  if (logs.empty()) throw std::invalid_argument("report: no logs given");
  struct Run {
    bool ups;
    std::uint64_t seed;
    std::string id;
    double energy;
    std::vector<TorqueSample> torques;
  };
  std::vector<Run> runs;
  Report rep;
  for (const auto& path : logs) {
    const std::string kind = csv_kind(path);
    if (kind == "run") {
      const CsvTable t = read_timeseries(path);
      if (t.rows.empty()) throw CsvError(path.string(), 0, "run log has no rows");
      Run r;
      r.ups = t.meta.at("ups") == "on";
      r.seed = std::stoull(t.meta.at("seed"));
      r.id = t.meta.at("run_id");
      r.energy = t.number(t.rows.size() - 1, "energy");
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        r.torques.push_back({Vec2(t.number(i, "tau_hip"), t.number(i, "tau_knee")),
                             t.text(i, "stance") == "1"});
      }
      runs.push_back(std::move(r));
    } else if (kind == "sweep") {
      rep.sweeps.push_back(read_sweep(path));
    } else {
      throw CsvError(path.string(), 1, "not a run or sweep log");
    }
  }
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return std::make_tuple(!a.ups, a.seed, a.id) < std::make_tuple(!b.ups, b.seed, b.id);
  });
  std::stable_sort(rep.sweeps.begin(), rep.sweeps.end(),
                   [](const SweepResult& a, const SweepResult& b) { return a.axis < b.axis; });
  for (bool ups : {true, false}) {
    EnergyGroup e;
    e.ups = ups;
    std::vector<TorqueSample> pooled;
    for (const Run& r : runs) {
      if (r.ups != ups) continue;
      e.energies.push_back(r.energy);
      pooled.insert(pooled.end(), r.torques.begin(), r.torques.end());
    }
    if (e.energies.empty()) continue;
    std::tie(e.mean, e.stddev) = mean_std(e.energies);
    rep.energy.push_back(e);
    rep.torque.push_back({ups, torque_stats(pooled)});
  }
  rep.text = render_text(rep);
  if (!rep.energy.empty()) {
    rep.plots.push_back({"energy.svg", energy_plot(rep.energy)});
    rep.plots.push_back({"torque.svg", torque_plot(rep.torque)});
  }
  for (const SweepResult& s : rep.sweeps) rep.plots.push_back({"sweep_" + s.axis + ".svg", sweep_plot(s)});
  return rep;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  put("report.txt", report.text);
  for (const auto& [name, svg] : report.plots) put(name, svg);
}

}  // namespace hopper
