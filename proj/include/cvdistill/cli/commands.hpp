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

#include <string>
#include <utility>
#include <vector>

#include "cvdistill/cli/report.hpp"
#include "cvdistill/state_prep.hpp"

namespace cvdistill::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRunFailed = 3;

struct CommandResult {
  Table table;
  PlotSpec plot;
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
};

/// Provenance lines shared by every command.
void add_common_provenance(Table& t, const std::string& command);

struct Fig3Options {
  double lambda = 0.4;
  double T = 0.8;
  std::vector<double> kappa2;  // empty: 0..3 in 301 points
};
CommandResult figure_fig3(const Fig3Options& opt);

struct Fig6Options {
  std::vector<double> lambdas = {0.3, 0.6};
  /// "eta": x is eta and slices fix T. "T": the other way round.
  std::string axis = "eta";
  std::vector<double> slices = {0.6, 0.8, 0.9};
  std::vector<double> x;  // empty: 0.01..1 (eta) or 0.01..0.99 (T), 99 points
};
CommandResult figure_fig6(const Fig6Options& opt);

struct Fig7Options {
  std::vector<std::pair<double, double>> panels = {{0.2, 0.8}, {0.4, 0.8}, {0.4, 0.6}, {0.6, 0.9}};  // (lambda, eta)
  double T = 0.8;
  std::vector<double> kappa2;  // empty: 0..3 in 61 points
  int cutoff = 12;
  SigmaFamily family = SigmaFamily::kReducedNoise;
  int threads = 1;
};
CommandResult figure_fig7(const Fig7Options& opt);

struct ScanOptions {
  ProtocolParams params;
  double nu = 0.1;  // generalized scheme only
  std::string scheme = "simplified";  // simplified, original, multicopy, generalized
  std::string axis = "kappa2";        // lambda, T, kappa2, eta, M, nu
  std::vector<double> grid;
  std::vector<std::string> metrics = {"V", "E", "F", "omega", "F_D", "probability"};
  std::string source = "both";  // circuit, analytic, both
  int cutoff = -1;              // -1: scheme default
  SigmaFamily family = SigmaFamily::kAttenuated;
  double deficit_warn = 1e-6;
  int threads = 1;
};
CommandResult run_scan(const ScanOptions& opt);

struct GaussifyOptions {
  ProtocolParams params;
  int iters = 40;
  double tol = 1e-8;
  int cutoff = -1;  // -1: 20 pure, 18 mixed
};
CommandResult run_gaussify(const GaussifyOptions& opt);

struct MulticopyOptions {
  ProtocolParams params;
  int cutoff = -1;  // -1: 14 for M <= 3, 10 above
};
CommandResult run_multicopy_command(const MulticopyOptions& opt);

/// Default working cutoff for a scheme.
int default_cutoff(const std::string& scheme, int M);

}  // namespace cvdistill::cli
