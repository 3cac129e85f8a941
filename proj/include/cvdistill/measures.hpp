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

// Figures of merit for two-mode states. Quadratures are x = (a + a^dag)/sqrt2
// and p = i(a^dag - a)/sqrt2, so the vacuum covariance matrix is the identity.

#include <vector>

#include <Eigen/Dense>

#include "cvdistill/fock.hpp"

namespace cvdistill {

/// Quadrature ordering (x_A, p_A, x_B, p_B).
struct CovarianceSummary {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();

  /// Smallest eigenvalue of cov + i Omega; >= 0 for physical states.
  double uncertainty_margin() const;
  /// Symplectic eigenvalues, ascending.
  Eigen::Vector2d symplectic_eigenvalues() const;
};

struct SqueezingVariances {
  double x_minus = 1.0;  // <(dx_A - dx_B)^2>
  double p_plus = 1.0;   // <(dp_A + dp_B)^2>
};

CovarianceSummary covariance_summary(const FockState& state);
CovarianceSummary covariance_summary(const DensityOperator& rho);
CovarianceSummary covariance_summary(const AnyState& state);

SqueezingVariances squeezing_variances(const AnyState& state);
/// <(dx_A - dx_B)^2>, vacuum = 1.
double squeezing_variance(const AnyState& state);

/// von Neumann entropy of mode A in nats. For mixed inputs this is the
/// reduced-state entropy, not an entanglement measure.
double entanglement_entropy(const AnyState& state);
/// -sum p ln p over p normalized to unit sum; entries below 1e-14 are skipped.
double entropy_of_distribution(std::vector<double> p);
/// Entropy of a |n,n> superposition with the given amplitudes.
double schmidt_entropy(const std::vector<double>& amplitudes);

/// |<TMSV(omega)|psi>|^2 or <TMSV(omega)|rho|TMSV(omega)>, state normalized first.
double fidelity_with_tmsv(const AnyState& state, double omega);

/// 1 - fidelity with the squeezed thermal state sharing its covariance matrix.
/// Requires zero mean and the symmetric standard form.
double gaussianity_residual(const AnyState& state);

/// Half the trace norm of the difference of the normalized states.
double trace_distance(const AnyState& a, const AnyState& b);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double uhlmann_fidelity(const DensityOperator& a, const DensityOperator& b);

}  // namespace cvdistill
