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
#include "hopper/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hopper {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s == "inf") v = std::numeric_limits<double>::infinity();
  else if (s == "-inf") v = -std::numeric_limits<double>::infinity();
  else if (s == "nan") v = std::numeric_limits<double>::quiet_NaN();
  else {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
  }
  return true;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw std::out_of_range("csv: no column " + name);
  return rows.at(row).at(c);
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  double v = 0.0;
  if (!parse_double(text(row, name), v)) throw std::invalid_argument("csv: not a number in " + name);
  return v;
}

const std::string& CsvTable::meta_value(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw std::out_of_range("csv: no meta key " + key);
  return it->second;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string to_csv_string(const CsvTable& table) {
  std::ostringstream out;
  out << "#hopper-csv," << kCsvVersion << ',' << table.kind << '\n';
  for (const auto& [k, v] : table.meta) out << "#meta," << k << ',' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv_string(table);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string csv_kind(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return {};
  const auto cells = split(line);
  if (cells.size() != 3 || cells[0] != "#hopper-csv") return {};
  return cells[2];
}

CsvTable read_csv(const std::filesystem::path& path, const std::string& kind,
                  const std::vector<std::string>& columns, const std::vector<std::string>& numeric) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw CsvError(file, 0, "cannot open");
  std::string line;
  int n = 0;
  if (!std::getline(in, line)) throw CsvError(file, 1, "empty file");
  ++n;
  auto cells = split(line);
  if (cells.size() != 3 || cells[0] != "#hopper-csv") throw CsvError(file, n, "missing version line");
  if (cells[1] != std::to_string(kCsvVersion)) {
    throw CsvError(file, n, "unsupported version " + cells[1]);
  }
  if (cells[2] != kind) throw CsvError(file, n, "expected kind " + kind + ", found " + cells[2]);
  CsvTable t;
  t.kind = kind;
  bool header = false;
  std::vector<int> numeric_cols;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header && line.rfind("#meta,", 0) == 0) {
      cells = split(line);
      if (cells.size() != 3) throw CsvError(file, n, "malformed meta line");
      t.meta[cells[1]] = cells[2];
      continue;
    }
    cells = split(line);
    if (!header) {
      if (cells != columns) throw CsvError(file, n, "unexpected column header");
      t.columns = cells;
      for (const auto& c : numeric) numeric_cols.push_back(t.column(c));
      header = true;
      continue;
    }
    if (cells.size() != columns.size()) {
      throw CsvError(file, n, "expected " + std::to_string(columns.size()) + " fields, found " +
                                  std::to_string(cells.size()));
    }
    for (int c : numeric_cols) {
      double v;
      if (c >= 0 && !parse_double(cells[c], v)) {
        throw CsvError(file, n, "field " + columns[c] + " is not a number: '" + cells[c] + "'");
      }
    }
    t.rows.push_back(std::move(cells));
  }
  if (!header) throw CsvError(file, n, "missing column header");
  return t;
}

}  // namespace hopper
