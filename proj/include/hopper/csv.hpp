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
#ifndef HOPPER_CSV_HPP_
#define HOPPER_CSV_HPP_

// Versioned CSV files. Layout:
//
//   #hopper-csv,<version>,<kind>
//   #meta,<key>,<value>        (any number)
//   <column>,<column>,...
//   <row>...
//
// Readers check the version, the kind and the exact column list, and report
// malformed rows with their 1-based line number.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopper {

inline constexpr int kCsvVersion = 1;

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct CsvTable {
  std::string kind;
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
  const std::string& meta_value(const std::string& key) const;
};

/// Shortest round-trip representation.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);

/// Throws CsvError on a version, kind, header or row mismatch; numeric
/// columns listed in `numeric` must parse as finite or infinite doubles.
CsvTable read_csv(const std::filesystem::path& path, const std::string& kind,
                  const std::vector<std::string>& columns,
                  const std::vector<std::string>& numeric = {});

/// Reads only the first line and returns the kind, empty when not a
/// versioned file.
std::string csv_kind(const std::filesystem::path& path);

}  // namespace hopper

#endif  // HOPPER_CSV_HPP_
