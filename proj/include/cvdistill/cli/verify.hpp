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

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cvdistill::cli {

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Replaces each check's working cutoff when set.
  std::optional<int> cutoff;
  /// Replaces each check's primary comparison tolerance when set.
  std::optional<double> tol;
  /// Check names to run; empty means all.
  std::vector<std::string> only;
};

struct CheckInfo {
  int criterion;
  std::string name;
  std::string summary;
};

/// Registered checks in run order.
const std::vector<CheckInfo>& list_checks();

/// Runs the selected checks. Unknown names in `only` throw UsageError.
std::vector<CheckResult> run_checks(const VerifyOptions& opt);

/// Prints a pass/fail table; returns 0 iff every check passed.
int cmd_verify(const VerifyOptions& opt, std::ostream& out);

}  // namespace cvdistill::cli
