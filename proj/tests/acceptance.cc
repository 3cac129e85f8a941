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

// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <cstdio>

#include "cvdistill/cli/verify.hpp"

int main() {
  const auto results = cvdistill::cli::run_checks({});
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %d %s (%.2fs): %s\n", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str(),
                r.seconds, r.detail.c_str());
    failed += !r.passed;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  return failed == 0 ? 0 : 1;
}
