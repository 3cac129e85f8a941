// Copyright 2026 The cvdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cvdistill::cli {

/// Empty, number, integer or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

/// Rectangular result with a key/value provenance block.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;

  void add_provenance(const std::string& key, const std::string& value) { provenance.emplace_back(key, value); }
  void add_provenance(const std::string& key, double value);
  std::size_t column(const std::string& name) const;  // throws if absent
  /// Numeric view of one column; non-numeric cells become NaN.
  std::vector<double> numeric_column(const std::string& name) const;
};

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

/// CSV with '#'-prefixed provenance lines. Byte-for-byte deterministic.
void write_csv(const Table& t, std::ostream& out);
/// {"provenance": {...}, "columns": [...], "rows": [[...], ...]}
void write_json(const Table& t, std::ostream& out);

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  std::string title;
  /// Optional column whose value splits rows into separate curves.
  std::string group;
};

/// Minimal SVG line plot of numeric columns.
void write_svg(const Table& t, const PlotSpec& spec, std::ostream& out);

/// Write to path ("-" or empty means the given stream) in csv or json.
void emit(const Table& t, const std::string& format, const std::string& path, std::ostream& fallback);
void emit_svg(const Table& t, const PlotSpec& spec, const std::string& path);

}  // namespace cvdistill::cli
