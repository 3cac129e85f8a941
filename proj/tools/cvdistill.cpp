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

// cvdistill command-line tool.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvdistill/cli/commands.hpp"
#include "cvdistill/cli/config.hpp"
#include "cvdistill/cli/report.hpp"
#include "cvdistill/cli/verify.hpp"
#include "cvdistill/error.hpp"

using namespace cvdistill;
using namespace cvdistill::cli;

namespace {

// Every flag that can also come from a config file.
const std::vector<std::string> kKeys = {
    "lambda", "T",       "kappa2", "eta",   "M",      "cutoff", "tol",     "out",    "format", "plot",
    "iters",  "nu",      "scheme", "metrics", "source", "family", "only",    "axis",   "slices", "lambdas",
    "x",      "kappa2-range", "panels", "deficit-warn"};

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ProtocolParams read_params(const Settings& s) {
  ProtocolParams p;
  p.lambda = s.get("lambda", p.lambda);
  p.T = s.get("T", p.T);
  p.kappa2 = s.get("kappa2", p.kappa2);
  p.eta = s.get("eta", p.eta);
  p.M = s.get("M", p.M);
  return p;
}

SigmaFamily read_family(const Settings& s, SigmaFamily fallback) {
  const std::string f = s.get("family", std::string());
  if (f.empty()) return fallback;
  if (f == "attenuated") return SigmaFamily::kAttenuated;
  if (f == "reduced-noise") return SigmaFamily::kReducedNoise;
  throw UsageError("family must be attenuated or reduced-noise");
}

void warn_params(const ProtocolParams& p) {
  for (const auto& w : p.warnings()) std::cerr << "warning: " << w << "\n";
}

int finish(const CommandResult& r, const Settings& s) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  emit(r.table, s.get("format", std::string("csv")), s.get("out", std::string()), std::cout);
  if (const auto plot = s.raw("plot"); plot && !plot->empty()) emit_svg(r.table, r.plot, *plot);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicopy continuous-variable entanglement distillation: circuits, closed forms and scans."};
  app.set_version_flag("--version", std::string(CVDISTILL_VERSION));
  app.require_subcommand(1);

  std::map<std::string, std::string> flags;
  std::string config_path;
  auto flag = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  app.add_option("--config", config_path, "key = value file; '#' starts a comment; flags override it");
  for (const auto& [k, h] : std::vector<std::pair<std::string, std::string>>{
           {"lambda", "TMSV squeezing parameter"},
           {"T", "subtraction beam splitter transmittance"},
           {"kappa2", "signed ancilla scaling kappa^2"},
           {"eta", "channel transmittance"},
           {"M", "copy count"},
           {"cutoff", "per-mode Fock cutoff"},
           {"tol", "tolerance"},
           {"out", "output file (default stdout)"},
           {"format", "csv or json"},
           {"plot", "also write an SVG line plot to this path"}}) {
    flag(&app, k, h);
  }
  app.fallthrough();

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  flag(verify, "only", "comma separated check names");
  bool list = false;
  verify->add_flag("--list", list, "list check names and exit");

  auto* figure = app.add_subcommand("figure", "figure data: fig3, fig6 or fig7");
  std::string figure_name;
  figure->add_option("name", figure_name, "fig3, fig6 or fig7")->required();
  flag(figure, "kappa2-range", "kappa^2 grid start:stop:count (fig3, fig7)");
  flag(figure, "lambdas", "fig6 lambda values");
  flag(figure, "axis", "fig6 x axis: eta or T");
  flag(figure, "slices", "fig6 fixed values of the other parameter");
  flag(figure, "x", "fig6 x grid start:stop:count");
  flag(figure, "panels", "fig7 panels as lambda:eta pairs, comma separated");
  flag(figure, "family", "fig7 ancilla: reduced-noise or attenuated");

  auto* scan = app.add_subcommand("scan", "scan one parameter");
  std::string scan_axis, scan_range;
  scan->add_option("axis", scan_axis, "lambda, T, kappa2, eta, M or nu")->required();
  scan->add_option("range", scan_range, "start:stop:count, or start:stop for integers")->required();
  flag(scan, "scheme", "simplified, original, multicopy or generalized");
  flag(scan, "metrics", "comma separated: V, E, F, omega, F_D, probability");
  flag(scan, "source", "circuit, analytic or both");
  flag(scan, "nu", "ancilla squeezing for the generalized scheme");
  flag(scan, "family", "ancilla family: attenuated or reduced-noise");
  flag(scan, "deficit-warn", "flag points whose norm deficit exceeds this");

  auto* gaussify = app.add_subcommand("gaussify", "iterate heralded Gaussification");
  flag(gaussify, "iters", "maximum iterations");

  auto* multicopy = app.add_subcommand("multicopy", "run the M-copy circuit against its closed form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Settings s(config_path.empty() ? std::map<std::string, std::string>{} : read_config_file(config_path));
    for (const auto& [k, v] : flags) s.set_flag(k, v);
    for (const auto& k : s.unknown_keys(kKeys)) std::cerr << "warning: unknown config key '" << k << "'\n";

    if (verify->parsed()) {
      if (list) {
        for (const auto& c : list_checks()) std::cout << c.criterion << " " << c.name << ": " << c.summary << "\n";
        return kExitOk;
      }
      VerifyOptions vo;
      if (s.has("cutoff")) vo.cutoff = s.get("cutoff", 0);
      if (s.has("tol")) vo.tol = s.get("tol", 0.0);
      vo.only = split_names(s.get("only", std::string()));
      return cmd_verify(vo, std::cout);
    }

    if (figure->parsed()) {
      CommandResult r;
      if (figure_name == "fig3") {
        Fig3Options o;
        const ProtocolParams p = read_params(s);
        o.lambda = p.lambda;
        o.T = p.T;
        if (s.has("kappa2-range")) o.kappa2 = parse_range(s.get("kappa2-range", std::string()));
        r = figure_fig3(o);
      } else if (figure_name == "fig6") {
        Fig6Options o;
        if (s.has("lambdas")) o.lambdas = parse_list(s.get("lambdas", std::string()));
        o.axis = s.get("axis", o.axis);
        if (s.has("slices")) o.slices = parse_list(s.get("slices", std::string()));
        if (s.has("x")) o.x = parse_range(s.get("x", std::string()));
        r = figure_fig6(o);
      } else if (figure_name == "fig7") {
        Fig7Options o;
        o.T = s.get("T", o.T);
        o.cutoff = s.get("cutoff", o.cutoff);
        o.family = read_family(s, o.family);
        o.threads = thread_count();
        if (s.has("kappa2-range")) o.kappa2 = parse_range(s.get("kappa2-range", std::string()));
        if (s.has("panels")) {
          o.panels.clear();
          for (const auto& item : split_names(s.get("panels", std::string()))) {
            const auto colon = item.find(':');
            if (colon == std::string::npos || item.find(':', colon + 1) != std::string::npos) {
              throw UsageError("panel must be lambda:eta, got '" + item + "'");
            }
            o.panels.emplace_back(parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
          }
        }
        r = figure_fig7(o);
      } else {
        throw UsageError("unknown figure '" + figure_name + "' (fig3, fig6, fig7)");
      }
      return finish(r, s);
    }

    if (scan->parsed()) {
      ScanOptions o;
      o.params = read_params(s);
      warn_params(o.params);
      o.axis = scan_axis;
      o.grid = parse_range(scan_range);
      o.scheme = s.get("scheme", o.scheme);
      o.source = s.get("source", o.source);
      o.nu = s.get("nu", o.nu);
      o.cutoff = s.get("cutoff", o.cutoff);
      o.family = read_family(s, o.family);
      o.deficit_warn = s.get("deficit-warn", o.deficit_warn);
      if (s.has("metrics")) o.metrics = split_names(s.get("metrics", std::string()));
      o.threads = thread_count();
      return finish(run_scan(o), s);
    }

    if (gaussify->parsed()) {
      GaussifyOptions o;
      o.params = read_params(s);
      warn_params(o.params);
      o.iters = s.get("iters", o.iters);
      o.tol = s.get("tol", o.tol);
      o.cutoff = s.get("cutoff", o.cutoff);
      return finish(run_gaussify(o), s);
    }

    if (multicopy->parsed()) {
      MulticopyOptions o;
      o.params = read_params(s);
      warn_params(o.params);
      o.cutoff = s.get("cutoff", o.cutoff);
      return finish(run_multicopy_command(o), s);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const HeraldImpossibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailed;
  } catch (const CutoffTooSmallError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailed;
  }
  return kExitUsage;
}
