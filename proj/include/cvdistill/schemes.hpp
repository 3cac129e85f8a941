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

// Heralded distillation circuits: photon subtraction, the original and the
// simplified two-copy schemes, heralded Gaussification, generalized
// subtraction and the simplified M-copy scheme.
//
// Every scheme takes the output cutoff and internally runs at a larger
// working cutoff so that all retained Fock amplitudes are exact; the mass
// beyond the output cutoff is reported as norm_deficit.

#include <vector>

#include "cvdistill/fock.hpp"
#include "cvdistill/state_prep.hpp"

namespace cvdistill {

enum class SubtractionPath {
  kOperator,  // (1-T)^{m/2}/sqrt(m!) T^{n/2} a^m
  kCircuit    // vacuum ancilla, beam splitter, ancilla projected onto |m>; carries sign (-1)^m
};

struct SchemeOptions {
  /// Results whose normalized deficit exceeds this raise CutoffTooSmallError.
  double max_norm_deficit = 1e-3;
  double herald_floor = kDefaultHeraldFloor;
};

/// Matrix of K_m on one mode truncated at `cutoff`.
Eigen::MatrixXcd subtraction_matrix(int cutoff, double T, int m);

HeraldedResult photon_subtract(const AnyState& state, int mode, double T, int m,
                               SubtractionPath path = SubtractionPath::kOperator,
                               double floor = kDefaultHeraldFloor);

/// Two TMSV copies, four single-photon subtractions, balanced splitters and
/// vacuum heralds. Pure inputs only.
HeraldedResult run_original_two_copy(const ProtocolParams& p, int cutoff, const SchemeOptions& opt = {});

/// rho on (A1,B1), the ancilla on (C2,D2), unbalanced splitters into the
/// vacuum ports C1, D1, inverse balanced splitters and single-photon heralds
/// on C1, C2, D1, D2.
HeraldedResult run_simplified_two_copy(const ProtocolParams& p, int cutoff,
                                       SigmaFamily family = SigmaFamily::kAttenuated,
                                       const SchemeOptions& opt = {});

/// Same circuit for caller-supplied two-mode rho (any cutoff) and ancilla.
/// Returns the unnormalized heralded state on (A1,B1) at rho's cutoffs;
/// its squared norm or trace is the success probability.
AnyState simplified_circuit(const AnyState& rho, const AnyState& sigma, double T);

/// The double Kraus sum over K_{2j} K_{2k} rho K_{2l}^dag K_{2m}^dag weighted
/// by ancilla elements. Unnormalized, at rho's cutoffs; sigma needs cutoffs >= 2.
DensityOperator rho_dist_formula(const DensityOperator& rho, const DensityOperator& sigma, double T);

/// One heralded Gaussification round: two copies, balanced splitters on
/// (A1,A2) and (B1,B2), vacuum heralds on A2 and B2. The output keeps the
/// input cutoffs; probability is N_i.
HeraldedResult gaussification_step(const AnyState& rho, double floor = kDefaultHeraldFloor);

struct GaussificationRecord {
  int iteration = 0;
  double probability = 1.0;
  /// Trace distance to the previous iterate.
  double distance = 0.0;
  double residual = 0.0;  // NaN when not computed
  double norm_deficit = 0.0;
  /// Fraction of this step's heralded mass pushed past the cutoff.
  double escaped = 0.0;
  double mean_photons = 0.0;
  double squeezing_variance = 1.0;
};

struct GaussificationOptions {
  bool compute_residual = true;
  bool keep_iterates = true;
  double deficit_limit = 1e-3;
  double herald_floor = kDefaultHeraldFloor;
};

struct GaussificationTrace {
  AnyState final_state;
  /// records[0] describes the input.
  std::vector<GaussificationRecord> records;
  std::vector<AnyState> iterates;
  bool converged = false;
  bool diverged = false;
};

/// Iterates gaussification_step until successive iterates are closer than
/// `tol` in trace distance, `max_iters` is reached, or divergence is detected
/// (norm deficit above the limit or mean photon number above cutoff/2).
GaussificationTrace iterate_gaussification(const AnyState& rho0, int max_iters, double tol,
                                           const GaussificationOptions& opt = {});

/// TMSV(lambda) on (A,B), TMSV(nu) on (C,D), unbalanced splitters (A,C) and
/// (B,D), herald |2,2> on (C,D).
HeraldedResult run_generalized_subtraction(double lambda, double nu, double T, int cutoff,
                                           const SchemeOptions& opt = {});

/// Real M x M mode matrix of the ancilla ladder, row = input mode (C_1 first).
Eigen::MatrixXd multicopy_interferometer(int M);

/// Simplified M-copy scheme for pure inputs; heralds |1> on all 2M ancillas.
HeraldedResult run_multicopy(const ProtocolParams& p, int M, int cutoff, const SchemeOptions& opt = {});

/// Max elementwise deviation after aligning the global phase of b to a.
double max_deviation_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace cvdistill
