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

// Scalar minimization, cubic roots, and the two protocol-specific optimizers.

#include <functional>
#include <stdexcept>
#include <vector>

namespace cvdistill {

class InvalidBracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Bracketed Brent minimization on [lo, hi]. The bracket is accepted when
/// some interior point (the golden point first, then a coarse scan) lies no
/// higher than both end values; otherwise InvalidBracketError. For
/// multimodal f a local minimum inside the bracket is returned.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-8);

/// Real roots of a3 x^3 + a2 x^2 + a1 x + a0, sorted, each refined by Newton
/// steps. Degrades to quadratic or linear when leading coefficients vanish.
std::vector<double> real_cubic_roots(double a3, double a2, double a1, double a0);

struct Kappa2Choice {
  double kappa2 = 0.0;
  double v_dist = 0.0;
  /// mu is too close to zero for the stationarity condition to select kappa.
  bool degenerate = false;
  /// Stationary roots were unusable and the value came from numeric minimization.
  bool numeric_fallback = false;
  /// |kappa| > 1/(1-T) for the T passed in (false if no T given).
  bool exceeds_bound = false;
};

/// kappa^2 minimizing the two-copy distilled squeezing variance. Pass T > 0
/// to have the |kappa| <= 1/(1-T) check performed.
Kappa2Choice optimal_kappa2(double mu, double T = 0.0);

/// omega maximizing the TMSV fidelity of the distilled state.
double optimal_omega(double mu, double kappa2);

}  // namespace cvdistill
