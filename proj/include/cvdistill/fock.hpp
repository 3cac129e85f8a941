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

// Truncated Fock-space states and the mode-local operations that act on them.
//
// Amplitudes are stored flat, row-major over the occupation tuple with mode 0
// varying slowest. Every state carries a norm (or trace) deficit: an estimate
// of the probability mass that left the retained subspace, expressed in the
// same units as the state's own squared norm. Operations never decrease it,
// except for renormalization which rescales it together with the amplitudes.
//
// A mode may be flagged post-selected: the caller promises it will only be
// projected onto Fock outcomes within its cutoff, through photon-number
// conserving couplings with other post-selected modes. Mass that overflows a
// post-selected mode can never reach a heralded output and is dropped without
// being counted as truncation error.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cvdistill {

using Complex = std::complex<double>;
using Cutoffs = std::vector<int>;

class FockLayout {
 public:
  FockLayout() = default;
  explicit FockLayout(Cutoffs cutoffs);

  int num_modes() const { return static_cast<int>(cutoffs_.size()); }
  const Cutoffs& cutoffs() const { return cutoffs_; }
  int cutoff(int mode) const { return cutoffs_.at(mode); }
  int levels(int mode) const { return cutoffs_.at(mode) + 1; }
  std::size_t dim() const { return dim_; }
  std::size_t stride(int mode) const { return strides_.at(mode); }

  std::size_t index(std::span<const int> occupation) const;
  std::vector<int> occupation(std::size_t index) const;
  int occupation(std::size_t index, int mode) const {
    return static_cast<int>((index / strides_[mode]) % static_cast<std::size_t>(cutoffs_[mode] + 1));
  }

  friend bool operator==(const FockLayout& a, const FockLayout& b) { return a.cutoffs_ == b.cutoffs_; }

 private:
  Cutoffs cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 1;
};

/// Pure multimode state over a truncated Fock basis.
class FockState {
 public:
  FockState(Cutoffs cutoffs, Eigen::VectorXcd amplitudes, double norm_deficit = 0.0,
            std::vector<bool> post_selected = {});

  static FockState vacuum(Cutoffs cutoffs);
  static FockState basis(Cutoffs cutoffs, std::span<const int> occupation);
  static FockState basis(Cutoffs cutoffs, std::initializer_list<int> occupation) {
    std::vector<int> occ(occupation);
    return basis(std::move(cutoffs), occ);
  }

  const FockLayout& layout() const { return layout_; }
  const Cutoffs& cutoffs() const { return layout_.cutoffs(); }
  int num_modes() const { return layout_.num_modes(); }
  std::size_t dim() const { return layout_.dim(); }

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::span<const int> occupation) const { return amplitudes_[layout_.index(occupation)]; }
  Complex amplitude(std::initializer_list<int> occupation) const {
    std::vector<int> occ(occupation);
    return amplitude(std::span<const int>(occ));
  }

  double norm_deficit() const { return norm_deficit_; }
  double squared_norm() const { return amplitudes_.squaredNorm(); }
  bool is_post_selected(int mode) const { return post_selected_.at(mode); }
  const std::vector<bool>& post_selected() const { return post_selected_; }

 private:
  FockLayout layout_;
  Eigen::VectorXcd amplitudes_;
  double norm_deficit_;
  std::vector<bool> post_selected_;
};

/// Mixed multimode state; the matrix is indexed by the flattened basis of FockLayout.
class DensityOperator {
 public:
  DensityOperator(Cutoffs cutoffs, Eigen::MatrixXcd matrix, double trace_deficit = 0.0,
                  std::vector<bool> post_selected = {});

  static DensityOperator from_pure(const FockState& state);

  const FockLayout& layout() const { return layout_; }
  const Cutoffs& cutoffs() const { return layout_.cutoffs(); }
  int num_modes() const { return layout_.num_modes(); }
  std::size_t dim() const { return layout_.dim(); }

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Complex element(std::span<const int> row, std::span<const int> col) const {
    return matrix_(static_cast<Eigen::Index>(layout_.index(row)), static_cast<Eigen::Index>(layout_.index(col)));
  }
  Complex element(std::initializer_list<int> row, std::initializer_list<int> col) const {
    std::vector<int> r(row), c(col);
    return element(std::span<const int>(r), std::span<const int>(c));
  }

  double trace_deficit() const { return trace_deficit_; }
  double trace() const { return matrix_.trace().real(); }
  bool is_post_selected(int mode) const { return post_selected_.at(mode); }
  const std::vector<bool>& post_selected() const { return post_selected_; }

  /// max |M - M^dagger| over elements.
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  FockLayout layout_;
  Eigen::MatrixXcd matrix_;
  double trace_deficit_;
  std::vector<bool> post_selected_;
};

using AnyState = std::variant<FockState, DensityOperator>;

/// Density-operator view of either kind.
DensityOperator as_density(const AnyState& state);

struct HeraldOutcome {
  std::string mode;
  int photons = 0;
  friend bool operator==(const HeraldOutcome&, const HeraldOutcome&) = default;
};

/// Conditional state produced by a projection, with its success probability.
struct HeraldedResult {
  AnyState state;
  double probability = 0.0;
  double norm_deficit = 0.0;
  std::vector<HeraldOutcome> herald_pattern;

  bool is_pure() const { return std::holds_alternative<FockState>(state); }
  const FockState& pure() const { return std::get<FockState>(state); }
  const DensityOperator& mixed() const { return std::get<DensityOperator>(state); }
};

inline constexpr double kDefaultHeraldFloor = 1e-300;

// ---------------------------------------------------------------------------
// Composition

FockState tensor_product(const FockState& a, const FockState& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);
/// Throws KindMismatchError when one argument is pure and the other mixed.
AnyState tensor_product(const AnyState& a, const AnyState& b);

FockState mark_post_selected(const FockState& state, int mode);
DensityOperator mark_post_selected(const DensityOperator& state, int mode);

/// Drops levels above the new per-mode cutoffs; dropped mass joins the deficit.
FockState truncate(const FockState& state, const Cutoffs& cutoffs);
DensityOperator truncate(const DensityOperator& rho, const Cutoffs& cutoffs);

// ---------------------------------------------------------------------------
// Beam splitter exp[theta (a_i^dag a_j - a_i a_j^dag)]

/// Matrix of the beam splitter restricted to total photon number N, in the
/// basis |k, N-k> (k photons in the first mode), k = 0..N.
Eigen::MatrixXd beam_splitter_block(double theta, int total_photons);

/// Heisenberg action on creation operators: row r gives the image of
/// a_r^dag as a combination of (a_i^dag, a_j^dag).
Eigen::Matrix2d beam_splitter_mode_matrix(double theta);

FockState apply_beam_splitter(const FockState& state, int mode_i, int mode_j, double theta);
DensityOperator apply_beam_splitter(const DensityOperator& rho, int mode_i, int mode_j, double theta);

// ---------------------------------------------------------------------------
// Single-mode operators

/// Applies an arbitrary (levels x levels) matrix to one mode.
FockState apply_mode_operator(const FockState& state, int mode, const Eigen::MatrixXcd& op);
/// rho -> op_left rho op_right^dagger on one mode.
DensityOperator apply_mode_operator(const DensityOperator& rho, int mode, const Eigen::MatrixXcd& op_left,
                                    const Eigen::MatrixXcd& op_right);

Eigen::MatrixXcd annihilation_matrix(int cutoff);
/// Diagonal base^(n/2).
Eigen::MatrixXcd exponential_number_matrix(int cutoff, double base);

/// a on one mode; the top level is zero-filled. Unnormalized.
FockState apply_annihilation(const FockState& state, int mode);
DensityOperator apply_annihilation(const DensityOperator& rho, int mode);

/// base^(n/2) on one mode. Unnormalized. Throws std::invalid_argument for base <= 0.
FockState apply_exponential_number(const FockState& state, int mode, double base);
DensityOperator apply_exponential_number(const DensityOperator& rho, int mode, double base);

// ---------------------------------------------------------------------------
// Measurement and reduction

/// <n|_mode psi>, unnormalized, with the mode removed.
FockState slice_mode(const FockState& state, int mode, int photons);
DensityOperator slice_mode(const DensityOperator& rho, int mode, int photons);

HeraldedResult project_mode(const FockState& state, int mode, int photons, double floor = kDefaultHeraldFloor);
HeraldedResult project_mode(const DensityOperator& rho, int mode, int photons,
                            double floor = kDefaultHeraldFloor);

/// keep_modes are sorted; the result orders them ascending.
DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep_modes);
DensityOperator partial_trace(const FockState& state, std::vector<int> keep_modes);

/// Returns the unit-norm state and the prior norm. Throws on a zero state.
std::pair<FockState, double> normalize(const FockState& state);
/// Returns the unit-trace operator and the prior trace.
std::pair<DensityOperator, double> normalize(const DensityOperator& rho);

// ---------------------------------------------------------------------------
// Spectral ensembles

/// rho = sum_k weight_k |member_k><member_k| with unit-norm members.
struct Ensemble {
  std::vector<double> weights;
  std::vector<FockState> members;
  /// Weight discarded when building the ensemble.
  double dropped_weight = 0.0;
};

/// Eigendecomposition of rho keeping eigenvalues above relative_floor * max.
/// The dropped positive weight is reported and added to each member's deficit budget by callers.
Ensemble spectral_ensemble(const DensityOperator& rho, double relative_floor = 1e-18);

/// sum_k w_k |v_k><v_k| for unnormalized members; deficits combine linearly.
DensityOperator mixture(const std::vector<double>& weights, const std::vector<FockState>& members);

}  // namespace cvdistill
