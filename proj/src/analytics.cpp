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

#include "cvdistill/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>

#include "cvdistill/optimize.hpp"

namespace cvdistill {

namespace {

double sq(double x) { return x * x; }

void require_nonnegative(int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
}

}  // namespace

int series_n_max(double mu) {
  const double a = std::abs(mu);
  if (a < 1e-300) return 1;
  if (a >= 1.0) throw std::invalid_argument("series_n_max: |mu| must be < 1");
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-16) / (2.0 * std::log(a)))) + 1);
}

std::vector<double> subtracted_amplitudes(double lambda, double T, int n_max) {
  require_nonnegative(n_max);
  std::vector<double> out(n_max + 1);
  const double pre = std::sqrt(1.0 - lambda * lambda) * lambda * (1.0 - T);
  const double mu = T * lambda;
  for (int n = 0; n <= n_max; ++n) out[n] = pre * (n + 1) * std::pow(mu, n);
  return out;
}

double normalization_kappa(double mu, double kappa2) {
  const double m2 = mu * mu;
  return 0.25 * std::pow(1.0 - m2, 5) / (sq(1.0 + kappa2 * sq(1.0 - m2)) + 4.0 * m2 + m2 * m2);
}

double normalization_original(double mu) {
  const double m2 = mu * mu;
  return std::pow(1.0 - m2, 5) / (4.0 * (4.0 - 4.0 * m2 + 9.0 * m2 * m2 - 4.0 * m2 * m2 * m2 + m2 * m2 * m2 * m2));
}

PsiOutPrime psi_out_prime(double lambda, double T, double kappa2, int n_max) {
  require_nonnegative(n_max);
  const double mu = T * lambda;
  PsiOutPrime out;
  out.normalization = normalization_kappa(mu, kappa2);
  const double root = std::sqrt(out.normalization);
  out.coefficients.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    out.coefficients[n] = root * (n * n + 3.0 * n + 2.0 + 2.0 * kappa2) * std::pow(mu, n);
  }
  return out;
}

double p_success_original(double lambda, double T) {
  const double mu = T * lambda;
  return std::pow(1.0 - T, 4) * std::pow(lambda, 4) * sq(1.0 - lambda * lambda) / (16.0 * normalization_original(mu));
}

double v_tmsv(double lambda) { return (1.0 - lambda) / (1.0 + lambda); }

double v_sub_pure(double mu) {
  return (1.0 - mu) / (1.0 + mu) * (1.0 - 2.0 * mu + 3.0 * mu * mu) / (1.0 + mu * mu);
}

double v_dist(double mu, double kappa2) {
  const double m2 = mu * mu;
  const double w = sq(1.0 - m2);
  const double num = 1.0 - 4.0 * mu + 12.0 * m2 - 8.0 * m2 * mu + 5.0 * m2 * m2 +
                     2.0 * kappa2 * (1.0 - 2.0 * mu) * w + kappa2 * kappa2 * w * w;
  const double den = m2 * m2 + 4.0 * m2 + sq(1.0 + kappa2 * w);
  return (1.0 - mu) / (1.0 + mu) * num / den;
}

double v_inf_pure(double lambda, double T) { return (1.0 - 2.0 * T * lambda) / (1.0 + 2.0 * T * lambda); }

StationaryRoots kappa_stationary_roots(double mu) {
  const double m2 = mu * mu;
  const double base = -1.0 + 2.0 * mu - 3.0 * m2 * mu + 3.0 * m2 * m2 - 2.0 * m2 * m2 * m2 + m2 * m2 * m2 * mu;
  const double disc = mu * sq(1.0 - m2) * std::sqrt(8.0 - 8.0 * mu + 9.0 * m2 - 4.0 * m2 * mu + m2 * m2);
  const double den = std::pow(1.0 - m2, 4);
  return {(base + disc) / den, (base - disc) / den};
}

PureMetrics pure_metrics(double lambda, double T, double kappa2) {
  const double mu = T * lambda;
  PureMetrics m;
  m.v_in = v_tmsv(lambda);
  m.v_sub = v_sub_pure(mu);
  m.v_dist = v_dist(mu, kappa2);
  m.v_inf = v_inf_pure(lambda, T);
  m.p_s = p_success_original(lambda, T);
  m.normalization = normalization_kappa(mu, kappa2);
  return m;
}

double fidelity_tmsv(double mu, double kappa2, double omega) {
  const double m2 = mu * mu;
  const double num = std::pow(1.0 - m2, 5) * (1.0 - omega * omega) * sq(1.0 + kappa2 * sq(1.0 - mu * omega));
  const double den = std::pow(1.0 - mu * omega, 6) * (m2 * m2 + 4.0 * m2 + sq(1.0 + kappa2 * sq(1.0 - m2)));
  return num / den;
}

std::vector<double> omega_cubic(double mu, double kappa2) {
  const double m2 = mu * mu;
  return {3.0 * mu + kappa2 * mu, -(1.0 + kappa2 + 2.0 * kappa2 * m2), kappa2 * mu * (m2 + 2.0) - 2.0 * mu,
          -kappa2 * m2};
}

double omega_star(double mu, double kappa2) {
  const auto c = omega_cubic(mu, kappa2);
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_f = -std::numeric_limits<double>::infinity();
  for (double w : real_cubic_roots(c[3], c[2], c[1], c[0])) {
    if (!(w > -1.0 && w < 1.0)) continue;
    const double f = fidelity_tmsv(mu, kappa2, w);
    if (f > best_f) {
      best = w;
      best_f = f;
    }
  }
  if (std::isfinite(best)) return best;
  const double edge = 1.0 - 1e-9;
  return minimize_scalar([&](double w) { return -fidelity_tmsv(mu, kappa2, w); }, -edge, edge, 1e-10).x;
}

double v_in_mixed(double lambda, double eta) { return v_tmsv(lambda) * eta + 1.0 - eta; }

double v_sub_mixed(double lambda, double eta, double T) {
  const double mu_t = (1.0 - eta + eta * T) * lambda;
  const double eta_t = eta * T / (1.0 - eta * (1.0 - T));
  return v_sub_pure(mu_t) * eta_t + 1.0 - eta_t;
}

double v_inf_mixed(double lambda, double eta, double T) {
  const double l = lambda;
  const double e1 = 1.0 - eta;
  const double a = 1.0 + e1 * l * (1.0 + e1 * l * (1.0 + e1 * l));
  const double b = 2.0 * eta * T * l * (1.0 + l * (-1.0 + eta + e1 * e1 * l));
  return (a - b) / (a + b);
}

MixedMetrics mixed_metrics(double lambda, double eta, double T) {
  MixedMetrics m;
  m.v_in = v_in_mixed(lambda, eta);
  m.v_sub = v_sub_mixed(lambda, eta, T);
  m.v_inf = v_inf_mixed(lambda, eta, T);
  m.mu_tilde = (1.0 - eta + eta * T) * lambda;
  m.eta_tilde = eta * T / (1.0 - eta * (1.0 - T));
  m.bound = 1.0 - m.eta_tilde;
  return m;
}

std::vector<double> multicopy_amplitudes(double lambda, double T, int M, int n_max) {
  if (M < 2) throw std::invalid_argument("multicopy_amplitudes: M must be at least 2");
  require_nonnegative(n_max);
  const double mu = T * lambda;
  const double nu = (1.0 - T) * lambda;
  const double pre = std::sqrt((1.0 - lambda * lambda) * std::pow(1.0 - nu * nu, M - 1)) * std::pow(nu, M);
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double sum = 0.0;
    for (int k = 0; k <= std::min(n, M); ++k) {
      const double falling = std::exp(std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0));
      sum += boost::math::binomial_coefficient<double>(M, k) * std::pow(static_cast<double>(M), -k) * falling;
    }
    out[n] = pre * std::pow(mu, n) * sum;
  }
  return out;
}

std::vector<double> generalized_subtraction_amplitudes(double lambda, double nu, double T, int n_max) {
  require_nonnegative(n_max);
  const double lt = T * lambda + (1.0 - T) * nu;
  const double nt = T * nu + (1.0 - T) * lambda;
  const double g = T * (1.0 - T) * sq(lambda - nu);
  const double pre = std::sqrt((1.0 - lambda * lambda) * (1.0 - nu * nu));
  std::vector<double> out(n_max + 1);
  // Each power of lt is expanded separately so lt = 0 stays finite.
  for (int n = 0; n <= n_max; ++n) {
    double a = nt * nt * std::pow(lt, n);
    if (n >= 1) a += 2.0 * nt * g * n * std::pow(lt, n - 1);
    if (n >= 2) a += 0.5 * g * g * n * (n - 1.0) * std::pow(lt, n - 2);
    out[n] = pre * a;
  }
  return out;
}

}  // namespace cvdistill
