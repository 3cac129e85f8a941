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

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cvdistill/analytics.hpp"
#include "cvdistill/cli/commands.hpp"
#include "cvdistill/cli/config.hpp"
#include "cvdistill/cli/report.hpp"
#include "cvdistill/cli/verify.hpp"

using namespace cvdistill;
using namespace cvdistill::cli;

namespace {

std::string csv(const Table& t) {
  std::ostringstream out;
  write_csv(t, out);
  return out.str();
}

}  // namespace

TEST(cli_parse, numbers) {
  EXPECT_EQ(parse_double("0.25"), 0.25);
  EXPECT_EQ(parse_double("+1e-3"), 1e-3);
  EXPECT_EQ(parse_double("-2"), -2.0);
  EXPECT_THROW(parse_double("abc"), UsageError);
  EXPECT_THROW(parse_double("1.0x"), UsageError);
  EXPECT_EQ(parse_int("12"), 12);
  EXPECT_THROW(parse_int("1.5"), UsageError);
}

TEST(cli_parse, ranges) {
  auto r = parse_range("-0.5:3:200");
  ASSERT_EQ(r.size(), 200u);
  EXPECT_EQ(r.front(), -0.5);
  EXPECT_EQ(r.back(), 3.0);
  auto m = parse_range("2:8");
  ASSERT_EQ(m.size(), 7u);
  EXPECT_EQ(m[3], 5.0);
  EXPECT_EQ(parse_range("0.7"), std::vector<double>{0.7});
  EXPECT_THROW(parse_range("1:2:0"), UsageError);
  EXPECT_THROW(parse_range("a:b"), UsageError);
  EXPECT_EQ(parse_list("0.1,0.2, 0.3"), (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(cli_config, file_and_flags) {
  auto file = parse_config("# comment\nlambda = 0.3\n\nT=0.7   # trailing\nbogus = 1\n");
  EXPECT_EQ(file.at("lambda"), "0.3");
  EXPECT_EQ(file.at("T"), "0.7");
  Settings s(file);
  s.set_flag("lambda", "0.5");
  EXPECT_EQ(s.get("lambda", 0.0), 0.5);
  EXPECT_EQ(s.get("T", 0.0), 0.7);
  EXPECT_EQ(s.get("eta", 1.0), 1.0);
  EXPECT_FALSE(s.has("eta"));
  EXPECT_EQ(s.unknown_keys({"lambda", "T"}), std::vector<std::string>{"bogus"});
  EXPECT_THROW(parse_config("no equals sign\n"), UsageError);
  EXPECT_THROW(read_config_file("/nonexistent/cvdistill.cfg"), UsageError);
}

TEST(cli_report, number_format_roundtrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST(cli_report, csv_and_json) {
  Table t;
  t.columns = {"x", "name", "y"};
  t.rows.push_back({1.5, std::string("a,b"), std::int64_t{3}});
  t.rows.push_back({std::nan(""), std::string("c"), std::monostate{}});
  t.add_provenance("command", "test");
  const std::string text = csv(t);
  EXPECT_NE(text.find("# command: test"), std::string::npos);
  EXPECT_NE(text.find("x,name,y"), std::string::npos);
  EXPECT_NE(text.find("1.5,\"a,b\",3"), std::string::npos);
  EXPECT_EQ(text, csv(t));
  std::ostringstream js;
  write_json(t, js);
  auto j = nlohmann::json::parse(js.str());
  EXPECT_EQ(j["columns"].size(), 3u);
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0][1], "a,b");
  EXPECT_EQ(j["rows"][1][0], "nan");
  EXPECT_TRUE(j["rows"][1][2].is_null());
  EXPECT_EQ(j["provenance"]["command"], "test");
  EXPECT_EQ(t.numeric_column("y")[0], 3.0);
  EXPECT_TRUE(std::isnan(t.numeric_column("name")[0]));
  EXPECT_THROW(t.column("missing"), UsageError);
}

TEST(cli_report, svg) {
  Table t;
  t.columns = {"x", "y"};
  for (int i = 0; i < 5; ++i) t.rows.push_back({double(i), double(i * i)});
  std::ostringstream out;
  write_svg(t, {"x", {"y"}, "parabola", ""}, out);
  EXPECT_NE(out.str().find("<svg"), std::string::npos);
  EXPECT_NE(out.str().find("polyline"), std::string::npos);
}

TEST(cli_figure, fig3_minimum_near_stationary_root) {
  Fig3Options o;
  o.kappa2 = parse_range("-0.5:3:351");
  auto r = figure_fig3(o);
  const auto k = r.table.numeric_column("kappa2");
  const auto v = r.table.numeric_column("V_dist");
  // Constant reference rows carry no kappa2.
  std::size_t best = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(k[i])) continue;
    if (best == v.size() || v[i] < v[best]) best = i;
  }
  ASSERT_LT(best, v.size());
  EXPECT_NEAR(k[best], kappa_stationary_roots(0.32).plus, 0.01);
}

TEST(cli_figure, fig6_lossless_slice_has_no_noise) {
  Fig6Options o;
  o.axis = "T";
  o.slices = {1.0};
  o.x = {0.2, 0.5, 0.8};
  auto r = figure_fig6(o);
  ASSERT_FALSE(r.table.rows.empty());
  for (double n : r.table.numeric_column("nbar")) EXPECT_EQ(n, 0.0);
  for (double n : r.table.numeric_column("nbar_prime")) EXPECT_EQ(n, 0.0);
}

TEST(cli_figure, fig6_reduced_noise_below) {
  auto r = figure_fig6({});
  auto a = r.table.numeric_column("nbar");
  auto b = r.table.numeric_column("nbar_prime");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(b[i], a[i] + 1e-15);
}

TEST(cli_figure, fig7_above_asymptote) {
  Fig7Options o;
  o.panels = {{0.4, 0.8}};
  o.kappa2 = {0.0, 1.0, 2.0};
  o.cutoff = 8;
  auto r = figure_fig7(o);
  auto v = r.table.numeric_column("V");
  auto vinf = r.table.numeric_column("V_inf");
  auto bound = r.table.numeric_column("bound");
  ASSERT_EQ(v.size(), 3u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_GT(v[i], vinf[i]);
    EXPECT_GT(vinf[i], bound[i]);
  }
}

TEST(cli_scan, grid_length) {
  ScanOptions o;
  o.grid = parse_range("-0.5:3:200");
  o.source = "analytic";
  o.metrics = {"V"};
  auto r = run_scan(o);
  EXPECT_EQ(r.table.rows.size(), 200u);
  EXPECT_EQ(r.exit_code, kExitOk);
}

TEST(cli_scan, multicopy_fidelity_nondecreasing) {
  ScanOptions o;
  o.scheme = "multicopy";
  o.axis = "M";
  o.grid = parse_range("2:8");
  o.source = "analytic";
  o.metrics = {"F_D"};
  auto f = run_scan(o).table.numeric_column("F_D");
  ASSERT_EQ(f.size(), 7u);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_GE(f[i], f[i - 1]);
}

TEST(cli_scan, small_cutoff_is_flagged) {
  ScanOptions o;
  o.grid = {1.0};
  o.params.lambda = 0.6;
  o.source = "circuit";
  o.metrics = {"V"};
  o.cutoff = 4;
  auto r = run_scan(o);
  EXPECT_EQ(std::get<std::string>(r.table.rows[0].back()), "high_deficit");
  EXPECT_FALSE(r.warnings.empty());
}

TEST(cli_scan, deterministic_across_threads) {
  ScanOptions o;
  o.grid = parse_range("0:2:6");
  o.metrics = {"V", "F"};
  o.cutoff = 10;
  const std::string one = csv(run_scan(o).table);
  o.threads = 3;
  EXPECT_EQ(csv(run_scan(o).table), one);
}

TEST(cli_scan, bad_axis) {
  ScanOptions o;
  o.axis = "gamma";
  o.grid = {1.0};
  EXPECT_THROW(run_scan(o), UsageError);
}

TEST(cli_gaussify, zero_iterations_echo_input) {
  GaussifyOptions o;
  o.iters = 0;
  auto r = run_gaussify(o);
  ASSERT_EQ(r.table.rows.size(), 1u);
  EXPECT_NEAR(r.table.numeric_column("V")[0], v_sub_pure(0.32), 1e-10);
  EXPECT_EQ(r.exit_code, kExitOk);
}

TEST(cli_gaussify, converges_and_diverges) {
  GaussifyOptions o;
  auto ok = run_gaussify(o);
  EXPECT_EQ(ok.exit_code, kExitOk);
  EXPECT_GT(ok.table.numeric_column("F_D").back(), 1 - 1e-6);
  o.params.lambda = 0.7;
  o.cutoff = 14;
  EXPECT_EQ(run_gaussify(o).exit_code, kExitRunFailed);
}

TEST(cli_multicopy, columns_agree) {
  MulticopyOptions o;
  o.params.M = 3;
  o.cutoff = 8;
  auto r = run_multicopy_command(o);
  auto a = r.table.numeric_column("amplitude_circuit");
  auto b = r.table.numeric_column("amplitude_closed_form");
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
}

TEST(cli_verify, listing_and_filter) {
  auto checks = list_checks();
  ASSERT_EQ(checks.size(), 9u);
  VerifyOptions o;
  o.only = {"generalized-subtraction"};
  auto res = run_checks(o);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_TRUE(res[0].passed) << res[0].detail;
}

TEST(cli_verify, impossible_tolerance_fails) {
  VerifyOptions o;
  o.only = {"generalized-subtraction"};
  o.tol = 1e-30;
  auto res = run_checks(o);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_FALSE(res[0].passed);
}
