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

// Closed-form expressions for the distillation protocol: output amplitudes,
// success probabilities, squeezing variances and fidelities.

#include <vector>

namespace cvdistill {

struct PureMetrics {
  double v_in = 1.0;
  double v_sub = 1.0;
  double v_dist = 1.0;
  double v_inf = 1.0;
  double p_s = 0.0;
  double normalization = 0.0;
};

struct MixedMetrics {
  double v_in = 1.0;
  double v_sub = 1.0;
  double v_inf = 1.0;
  double mu_tilde = 0.0;
  double eta_tilde = 1.0;
  double bound = 0.0;  // 1 - eta_tilde
};

struct StationaryRoots {
  double plus = 0.0;
  double minus = 0.0;
};

struct PsiOutPrime {
  std::vector<double> coefficients;  // normalized amplitudes of |n,n>
  double normalization = 0.0;        // N(kappa)
};

/// Smallest n_max with mu^(2 n_max) < 1e-16.
int series_n_max(double mu);

/// Unnormalized amplitudes of |n,n> after single-photon subtraction on both modes.
std::vector<double> subtracted_amplitudes(double lambda, double T, int n_max);

double normalization_kappa(double mu, double kappa2);
double normalization_original(double mu);
PsiOutPrime psi_out_prime(double lambda, double T, double kappa2, int n_max);

/// Success probability of the original two-copy scheme.
double p_success_original(double lambda, double T);

double v_tmsv(double lambda);
double v_sub_pure(double mu);
double v_dist(double mu, double kappa2);
double v_inf_pure(double lambda, double T);
StationaryRoots kappa_stationary_roots(double mu);
PureMetrics pure_metrics(double lambda, double T, double kappa2);

double fidelity_tmsv(double mu, double kappa2, double omega);
/// Coefficients (a0, a1, a2, a3) of the stationarity cubic for omega.
std::vector<double> omega_cubic(double mu, double kappa2);
double omega_star(double mu, double kappa2);

double v_in_mixed(double lambda, double eta);
double v_sub_mixed(double lambda, double eta, double T);
double v_inf_mixed(double lambda, double eta, double T);
MixedMetrics mixed_metrics(double lambda, double eta, double T);

/// Unnormalized |n,n> amplitudes of the M-copy output for pure inputs.
std::vector<double> multicopy_amplitudes(double lambda, double T, int M, int n_max);

/// Unnormalized |n,n> amplitudes of two-photon generalized subtraction with
/// an injected TMSV(nu).
std::vector<double> generalized_subtraction_amplitudes(double lambda, double nu, double T, int n_max);

}  // namespace cvdistill
