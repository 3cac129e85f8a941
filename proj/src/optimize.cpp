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

#include "cvdistill/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "cvdistill/analytics.hpp"

namespace cvdistill {

namespace {

double eval_poly(double a3, double a2, double a1, double a0, double x) { return ((a3 * x + a2) * x + a1) * x + a0; }

double polish(double a3, double a2, double a1, double a0, double x) {
  for (int it = 0; it < 8; ++it) {
    const double f = eval_poly(a3, a2, a1, a0, x);
    const double df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidBracketError("minimize_scalar: bracket must satisfy lo < hi");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tolerance must be positive");
  int evals = 0;
  auto g = [&](double x) {
    ++evals;
    return f(x);
  };
  const double flo = g(lo);
  const double fhi = g(hi);
  const double golden = lo + (2.0 - std::numbers::phi) * (hi - lo);
  double best_x = golden;
  double best_f = g(golden);
  if (!(best_f <= flo && best_f <= fhi)) {
    constexpr int kScan = 64;
    for (int k = 1; k < kScan; ++k) {
      const double x = lo + (hi - lo) * k / kScan;
      const double fx = g(x);
      if (fx < best_f) {
        best_x = x;
        best_f = fx;
      }
    }
    if (!(best_f <= flo && best_f <= fhi)) {
      throw InvalidBracketError("minimize_scalar: no interior point lies below both bracket ends");
    }
  }
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(tol))) + 1, 4,
                              std::numeric_limits<double>::digits / 2);
  std::uintmax_t max_iter = 500;
  const auto [x, fx] = boost::math::tools::brent_find_minima(g, lo, hi, bits, max_iter);
  if (best_f < fx) return {best_x, best_f, evals};
  return {x, fx, evals};
}

std::vector<double> real_cubic_roots(double a3, double a2, double a1, double a0) {
  const double scale = std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
  std::vector<double> roots;
  if (scale == 0.0) throw std::invalid_argument("real_cubic_roots: all coefficients vanish");
  const double eps = 1e-14 * scale;
  if (std::abs(a3) <= eps) {
    if (std::abs(a2) <= eps) {
      if (std::abs(a1) <= eps) return roots;
      roots.push_back(-a0 / a1);
    } else {
      const double disc = a1 * a1 - 4.0 * a2 * a0;
      if (disc >= 0.0) {
        // Stable quadratic formula.
        const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
        if (q != 0.0) roots.push_back(q / a2);
        roots.push_back(q != 0.0 ? a0 / q : 0.0);
      }
    }
  } else {
    const double b = a2 / a3;
    const double c = a1 / a3;
    const double d = a0 / a3;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double shift = -b / 3.0;
    if (disc > 0.0) {
      const double s = std::sqrt(disc);
      roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
    } else if (p == 0.0) {
      roots.push_back(shift);
    } else {
      const double r = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
    }
  }
  for (double& x : roots) x = polish(a3, a2, a1, a0, x);
  std::sort(roots.begin(), roots.end());
  return roots;
}

Kappa2Choice optimal_kappa2(double mu, double T) {
  Kappa2Choice out;
  if (std::abs(mu) < 1e-8) {
    out.degenerate = true;
    out.kappa2 = std::numeric_limits<double>::quiet_NaN();
    out.v_dist = v_dist(mu, 0.0);
    return out;
  }
  const StationaryRoots roots = kappa_stationary_roots(mu);
  auto v = [mu](double k2) { return v_dist(mu, k2); };
  const double h = 1e-4;
  auto is_min = [&](double k2) {
    return std::isfinite(k2) && v(k2 + h) + v(k2 - h) - 2.0 * v(k2) > 0.0;
  };
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double k2 : {roots.plus, roots.minus}) {
    if (is_min(k2) && (!std::isfinite(best) || v(k2) < v(best))) best = k2;
  }
  if (!std::isfinite(best)) {
    const ScalarMinimum m = minimize_scalar(v, -1.0 / std::pow(1.0 - mu * mu, 2), 100.0, 1e-10);
    best = m.x;
    out.numeric_fallback = true;
  }
  out.kappa2 = best;
  out.v_dist = v(best);
  if (T > 0.0) out.exceeds_bound = std::sqrt(std::abs(best)) > 1.0 / (1.0 - T);
  return out;
}

double optimal_omega(double mu, double kappa2) { return omega_star(mu, kappa2); }

}  // namespace cvdistill
