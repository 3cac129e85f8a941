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

// Gaussian input states in the truncated Fock basis.

#include <string>
#include <vector>

#include "cvdistill/fock.hpp"

namespace cvdistill {

/// Scalar protocol parameters. kappa2 may be negative, in which case the
/// ancilla squeezing nu is purely imaginary.
struct ProtocolParams {
  double lambda = 0.4;
  double T = 0.8;
  double kappa2 = 1.0;
  double eta = 1.0;
  int M = 2;

  double mu() const { return T * lambda; }
  Complex nu() const;
  double theta() const;
  double lambda_d() const { return 2.0 * T * lambda; }
  bool pure() const { return eta == 1.0; }

  /// |2 T lambda| < 1: iterated Gaussification converges.
  bool convergent_regime() const;
  /// |kappa| <= 1/(1-T).
  bool kappa_within_bound() const;

  /// Throws std::invalid_argument when a hard invariant is violated.
  void validate() const;
  /// Soft violations, as human-readable strings.
  std::vector<std::string> warnings() const;
};

struct ThermalDecomposition {
  double s = 0.0;
  double nbar = 0.0;
};

/// Squeezing and loss of the attenuated ancilla: TMSV(nu) sent through
/// symmetric loss eta_prime.
struct AttenuatedSigmaParams {
  double nu = 0.0;
  double eta_prime = 1.0;
};

/// Same squeezing as the attenuated ancilla with less thermal noise: TMSV(nu_prime)
/// through loss eta.
struct ReducedNoiseParams {
  double nu_prime = 0.0;
  double nbar_prime = 0.0;
};

enum class SigmaFamily {
  kAttenuated,   // TMSV(kappa nu) through eta_prime
  kReducedNoise  // TMSV(kappa nu_prime) through eta
};

struct SigmaState {
  AnyState state;
  /// Probability of obtaining the (kappa = 1) ancilla from rho by noiseless attenuation.
  double p_sigma = 1.0;
  /// Squeezing of the underlying pure TMSV, kappa included.
  Complex squeezing;
  /// Loss applied to that TMSV.
  double loss = 1.0;
};

FockState make_tmsv(Complex lambda, const Cutoffs& cutoffs);
inline FockState make_tmsv(double lambda, const Cutoffs& cutoffs) { return make_tmsv(Complex(lambda, 0.0), cutoffs); }

/// S(s) (tau x tau) S(s)^dag with thermal occupation nbar per mode.
DensityOperator make_squeezed_thermal(double s, double nbar, const Cutoffs& cutoffs);
/// The same state as weighted members S(s)|j,k>; dropped_weight holds the trace deficit.
Ensemble squeezed_thermal_ensemble(double s, double nbar, const Cutoffs& cutoffs);

/// Pure-loss channel with transmittance eta on one mode.
DensityOperator apply_loss_channel(const DensityOperator& rho, int mode, double eta);
DensityOperator apply_loss_channel(const FockState& state, int mode, double eta);
/// Matrices L_k of the loss channel, k = 0..cutoff.
std::vector<Eigen::MatrixXcd> loss_kraus_operators(int cutoff, double eta);

/// Lossy TMSV: TMSV(lambda) with loss eta on both modes. Pure when eta == 1.
AnyState make_lossy_tmsv(Complex lambda, double eta, const Cutoffs& cutoffs);

AttenuatedSigmaParams attenuated_sigma_params(const ProtocolParams& p);
/// Tr[(1-T)^(nA+nB) rho] for the lossy input rho.
double p_sigma(const ProtocolParams& p);
ThermalDecomposition thermal_params(const ProtocolParams& p);
/// Leading-order nbar for weakly mixed ancillas.
double thermal_nbar_approx(const ProtocolParams& p);
ReducedNoiseParams reduced_noise_params(const ProtocolParams& p);

SigmaState make_sigma(const ProtocolParams& p, const Cutoffs& cutoffs,
                      SigmaFamily family = SigmaFamily::kAttenuated);

}  // namespace cvdistill
