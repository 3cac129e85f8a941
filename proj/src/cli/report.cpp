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

#include "cvdistill/cli/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cvdistill/cli/config.hpp"
#include "json.hpp"

namespace cvdistill::cli {

namespace {

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  return f;
}

}  // namespace

void Table::add_provenance(const std::string& key, double value) { provenance.emplace_back(key, format_number(value)); }

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw UsageError("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const std::size_t k = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (const auto* d = std::get_if<double>(&r[k])) {
      out.push_back(*d);
    } else if (const auto* i = std::get_if<std::int64_t>(&r[k])) {
      out.push_back(static_cast<double>(*i));
    } else {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void write_csv(const Table& t, std::ostream& out) {
  for (const auto& [k, v] : t.provenance) out << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_escape(t.columns[i]);
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(r[i]));
    out << "\n";
  }
}

void write_json(const Table& t, std::ostream& out) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.provenance) prov[k] = v;
  j["provenance"] = prov;
  j["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& c : r) {
      if (const auto* d = std::get_if<double>(&c)) {
        // JSON has no NaN; keep it as text so nothing is silently dropped.
        if (std::isfinite(*d)) {
          row.push_back(*d);
        } else {
          row.push_back(format_number(*d));
        }
      } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
        row.push_back(*i);
      } else if (const auto* s = std::get_if<std::string>(&c)) {
        row.push_back(*s);
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << "\n";
}

void write_svg(const Table& t, const PlotSpec& spec, std::ostream& out) {
  constexpr double W = 640, H = 420, L = 70, R = 20, Tm = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  const std::vector<double> xs = t.numeric_column(spec.x);
  std::vector<std::string> groups(t.rows.size());
  if (!spec.group.empty()) {
    const std::size_t g = t.column(spec.group);
    for (std::size_t i = 0; i < t.rows.size(); ++i) groups[i] = cell_text(t.rows[i][g]);
  }
  struct Curve {
    std::string label;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Curve> curves;
  std::map<std::string, std::size_t> index;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& yname : spec.y) {
    const std::vector<double> ys = t.numeric_column(yname);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
      const std::string label = groups[i].empty() ? yname : yname + " " + groups[i];
      auto [it, fresh] = index.emplace(label, curves.size());
      if (fresh) curves.push_back({label, {}});
      curves[it->second].pts.emplace_back(xs[i], ys[i]);
      x0 = std::min(x0, xs[i]);
      x1 = std::max(x1, xs[i]);
      y0 = std::min(y0, ys[i]);
      y1 = std::max(y1, ys[i]);
    }
  }
  if (curves.empty()) {
    x0 = y0 = 0;
    x1 = y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - Tm - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\">" << spec.title << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4;
    const double yv = y0 + (y1 - y0) * k / 4;
    out << "<text x=\"" << format_number(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
        << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << format_number(py(yv) + 4) << "\" text-anchor=\"end\">"
        << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << spec.x << "</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = colors[c % (sizeof(colors) / sizeof(colors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[c].pts.size(); ++i) {
      out << (i ? " " : "") << format_number(px(curves[c].pts[i].first)) << ","
          << format_number(py(curves[c].pts[i].second));
    }
    out << "\"/>\n";
    out << "<text x=\"" << L + 8 << "\" y=\"" << Tm + 16 + 14 * static_cast<double>(c) << "\" fill=\"" << color
        << "\">" << curves[c].label << "</text>\n";
  }
  out << "</svg>\n";
}

void emit(const Table& t, const std::string& format, const std::string& path, std::ostream& fallback) {
  if (format != "csv" && format != "json") throw UsageError("format must be csv or json, got '" + format + "'");
  auto write = [&](std::ostream& o) { format == "csv" ? write_csv(t, o) : write_json(t, o); };
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream f = open_out(path);
  write(f);
}

void emit_svg(const Table& t, const PlotSpec& spec, const std::string& path) {
  std::ofstream f = open_out(path);
  write_svg(t, spec, f);
}

}  // namespace cvdistill::cli
