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

#include "cvdistill/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cvdistill/error.hpp"

namespace cvdistill {

namespace {

std::vector<bool> flags_or_default(std::vector<bool> flags, std::size_t modes) {
  if (flags.empty()) flags.assign(modes, false);
  if (flags.size() != modes) throw std::invalid_argument("post-selection flags do not match the mode count");
  return flags;
}

void check_mode(const FockLayout& layout, int mode) {
  if (mode < 0 || mode >= layout.num_modes()) {
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range for " +
                            std::to_string(layout.num_modes()) + "-mode state");
  }
}

template <typename Vec>
std::vector<bool> concat(const Vec& a, const Vec& b) {
  std::vector<bool> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<bool> drop_flag(const std::vector<bool>& flags, int mode) {
  std::vector<bool> out = flags;
  out.erase(out.begin() + mode);
  return out;
}

Cutoffs drop_mode(const Cutoffs& cutoffs, int mode) {
  Cutoffs out = cutoffs;
  out.erase(out.begin() + mode);
  return out;
}

// Applies a (levels x levels) matrix to `mode` of a flat vector in place.
void apply_local(Eigen::Ref<Eigen::VectorXcd> v, const FockLayout& layout, int mode, const Eigen::MatrixXcd& op) {
  const int levels = layout.levels(mode);
  const std::size_t stride = layout.stride(mode);
  Eigen::VectorXcd in(levels);
  for (std::size_t base = 0; base < layout.dim(); ++base) {
    if (layout.occupation(base, mode) != 0) continue;
    for (int n = 0; n < levels; ++n) in[n] = v[base + n * stride];
    Eigen::VectorXcd out = op * in;
    for (int n = 0; n < levels; ++n) v[base + n * stride] = out[n];
  }
}

struct TwoModeBlocks {
  std::vector<Eigen::MatrixXd> blocks;  // indexed by total photon number
};

TwoModeBlocks make_blocks(double theta, int max_total) {
  TwoModeBlocks b;
  b.blocks.reserve(max_total + 1);
  for (int n = 0; n <= max_total; ++n) b.blocks.push_back(beam_splitter_block(theta, n));
  return b;
}

// Applies the beam splitter to one flat vector; returns counted overflow mass.
double apply_two_mode(Eigen::Ref<Eigen::VectorXcd> v, const FockLayout& layout, int mi, int mj,
                      const TwoModeBlocks& blocks, bool post_i, bool post_j) {
  const int ci = layout.cutoff(mi);
  const int cj = layout.cutoff(mj);
  const std::size_t si = layout.stride(mi);
  const std::size_t sj = layout.stride(mj);
  double lost = 0.0;
  Eigen::VectorXcd in;
  Eigen::VectorXcd out;
  for (std::size_t base = 0; base < layout.dim(); ++base) {
    if (layout.occupation(base, mi) != 0 || layout.occupation(base, mj) != 0) continue;
    for (int total = 0; total <= ci + cj; ++total) {
      const int lo = std::max(0, total - cj);
      const int hi = std::min(total, ci);
      in.setZero(total + 1);
      bool any = false;
      for (int k = lo; k <= hi; ++k) {
        const Complex a = v[base + k * si + (total - k) * sj];
        in[k] = a;
        any = any || a != Complex{};
      }
      if (!any) continue;
      out = blocks.blocks[total] * in;
      for (int k = 0; k <= total; ++k) {
        const bool over_i = k > ci;
        const bool over_j = total - k > cj;
        if (!over_i && !over_j) {
          v[base + k * si + (total - k) * sj] = out[k];
        } else if (!(over_i && post_i) && !(over_j && post_j)) {
          lost += std::norm(out[k]);
        }
      }
    }
  }
  return lost;
}

// Weighted factorization rho = sum_k w_k v_k v_k^dag used to push a density
// operator through vector kernels that may drop mass.
struct SignedEnsemble {
  std::vector<double> weights;
  std::vector<Eigen::VectorXcd> vectors;
};

// Eigenpairs of a Hermitian matrix, one connected block at a time so the
// vectors stay sparse when degenerate eigenvalues span unrelated sectors.
std::vector<std::pair<double, Eigen::VectorXcd>> block_eigenpairs(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j + 1; i < d; ++i) {
      if (h(i, j) != Complex{}) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(d), -1);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  std::vector<std::pair<double, Eigen::VectorXcd>> pairs;
  for (const auto& idx : blocks) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = h(idx[a], idx[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
      for (Eigen::Index a = 0; a < n; ++a) v[idx[a]] = es.eigenvectors()(a, k);
      pairs.emplace_back(es.eigenvalues()[k], std::move(v));
    }
  }
  return pairs;
}

SignedEnsemble signed_ensemble(const Eigen::MatrixXcd& m) {
  auto pairs = block_eigenpairs(0.5 * (m + m.adjoint()));
  SignedEnsemble out;
  double scale = 1e-300;
  for (const auto& pr : pairs) scale = std::max(scale, std::abs(pr.first));
  for (auto& [w, v] : pairs) {
    if (std::abs(w) <= 1e-17 * scale) continue;
    out.weights.push_back(w);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

// rho += w v v^dag touching only the support of v.
void add_outer(Eigen::MatrixXcd& rho, double w, const Eigen::VectorXcd& v, std::vector<Eigen::Index>& nz) {
  nz.clear();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != Complex{}) nz.push_back(i);
  }
  for (Eigen::Index j : nz) {
    const Complex cj = w * std::conj(v[j]);
    for (Eigen::Index i : nz) rho(i, j) += v[i] * cj;
  }
}

std::vector<int> sorted_unique(std::vector<int> modes) {
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  return modes;
}

}  // namespace

// ---------------------------------------------------------------------------

FockLayout::FockLayout(Cutoffs cutoffs) : cutoffs_(std::move(cutoffs)), strides_(cutoffs_.size()) {
  for (int c : cutoffs_) {
    if (c < 0) throw std::invalid_argument("cutoff must be nonnegative");
  }
  dim_ = 1;
  for (std::size_t k = cutoffs_.size(); k-- > 0;) {
    strides_[k] = dim_;
    dim_ *= static_cast<std::size_t>(cutoffs_[k] + 1);
  }
}

std::size_t FockLayout::index(std::span<const int> occupation) const {
  if (occupation.size() != cutoffs_.size()) throw std::invalid_argument("occupation has wrong number of modes");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    if (occupation[k] < 0 || occupation[k] > cutoffs_[k]) throw std::out_of_range("occupation exceeds cutoff");
    idx += static_cast<std::size_t>(occupation[k]) * strides_[k];
  }
  return idx;
}

std::vector<int> FockLayout::occupation(std::size_t index) const {
  std::vector<int> occ(cutoffs_.size());
  for (int k = 0; k < num_modes(); ++k) occ[k] = occupation(index, k);
  return occ;
}

FockState::FockState(Cutoffs cutoffs, Eigen::VectorXcd amplitudes, double norm_deficit,
                     std::vector<bool> post_selected)
    : layout_(std::move(cutoffs)), amplitudes_(std::move(amplitudes)), norm_deficit_(norm_deficit) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.dim()) {
    throw std::invalid_argument("amplitude vector size " + std::to_string(amplitudes_.size()) +
                                " does not match layout dimension " + std::to_string(layout_.dim()));
  }
  if (!(norm_deficit_ >= 0.0)) throw std::invalid_argument("norm deficit must be nonnegative");
  post_selected_ = flags_or_default(std::move(post_selected), layout_.cutoffs().size());
}

FockState FockState::vacuum(Cutoffs cutoffs) {
  std::vector<int> zeros(cutoffs.size(), 0);
  return basis(std::move(cutoffs), zeros);
}

FockState FockState::basis(Cutoffs cutoffs, std::span<const int> occupation) {
  FockLayout layout(cutoffs);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
  v[static_cast<Eigen::Index>(layout.index(occupation))] = 1.0;
  return FockState(std::move(cutoffs), std::move(v));
}

DensityOperator::DensityOperator(Cutoffs cutoffs, Eigen::MatrixXcd matrix, double trace_deficit,
                                 std::vector<bool> post_selected)
    : layout_(std::move(cutoffs)), matrix_(std::move(matrix)), trace_deficit_(trace_deficit) {
  const auto d = static_cast<Eigen::Index>(layout_.dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("density matrix shape does not match layout dimension " + std::to_string(d));
  }
  if (!(trace_deficit_ >= 0.0)) throw std::invalid_argument("trace deficit must be nonnegative");
  post_selected_ = flags_or_default(std::move(post_selected), layout_.cutoffs().size());
}

DensityOperator DensityOperator::from_pure(const FockState& state) {
  const auto& v = state.amplitudes();
  return DensityOperator(state.cutoffs(), v * v.adjoint(), state.norm_deficit(), state.post_selected());
}

double DensityOperator::hermiticity_error() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (matrix_ + matrix_.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

FockState tensor_product(const FockState& a, const FockState& b) {
  Cutoffs cut = a.cutoffs();
  cut.insert(cut.end(), b.cutoffs().begin(), b.cutoffs().end());
  const auto na = a.amplitudes().size();
  const auto nb = b.amplitudes().size();
  Eigen::VectorXcd v(na * nb);
  for (Eigen::Index i = 0; i < na; ++i) v.segment(i * nb, nb) = a.amplitudes()[i] * b.amplitudes();
  const double sa = a.squared_norm();
  const double sb = b.squared_norm();
  const double da = a.norm_deficit();
  const double db = b.norm_deficit();
  return FockState(std::move(cut), std::move(v), da * sb + db * sa + da * db,
                   concat(a.post_selected(), b.post_selected()));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  Cutoffs cut = a.cutoffs();
  cut.insert(cut.end(), b.cutoffs().begin(), b.cutoffs().end());
  const auto na = a.matrix().rows();
  const auto nb = b.matrix().rows();
  Eigen::MatrixXcd m(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  }
  const double ta = a.trace();
  const double tb = b.trace();
  const double da = a.trace_deficit();
  const double db = b.trace_deficit();
  return DensityOperator(std::move(cut), std::move(m), da * tb + db * ta + da * db,
                         concat(a.post_selected(), b.post_selected()));
}

AnyState tensor_product(const AnyState& a, const AnyState& b) {
  if (a.index() != b.index()) {
    throw KindMismatchError("tensor_product: cannot combine a pure state with a density operator");
  }
  if (std::holds_alternative<FockState>(a)) return tensor_product(std::get<FockState>(a), std::get<FockState>(b));
  return tensor_product(std::get<DensityOperator>(a), std::get<DensityOperator>(b));
}

FockState mark_post_selected(const FockState& state, int mode) {
  check_mode(state.layout(), mode);
  auto flags = state.post_selected();
  flags[mode] = true;
  return FockState(state.cutoffs(), state.amplitudes(), state.norm_deficit(), std::move(flags));
}

DensityOperator mark_post_selected(const DensityOperator& rho, int mode) {
  check_mode(rho.layout(), mode);
  auto flags = rho.post_selected();
  flags[mode] = true;
  return DensityOperator(rho.cutoffs(), rho.matrix(), rho.trace_deficit(), std::move(flags));
}

namespace {

// Maps old flat indices to new ones (or -1 when dropped) and flags whether the
// dropped entry overflows only non-post-selected modes.
struct TruncationMap {
  std::vector<std::ptrdiff_t> target;
  std::vector<bool> counted;
};

TruncationMap truncation_map(const FockLayout& from, const FockLayout& to, const std::vector<bool>& post) {
  TruncationMap map;
  map.target.resize(from.dim());
  map.counted.resize(from.dim());
  std::vector<int> occ(from.num_modes());
  for (std::size_t f = 0; f < from.dim(); ++f) {
    bool inside = true;
    bool counted = true;
    for (int k = 0; k < from.num_modes(); ++k) {
      occ[k] = from.occupation(f, k);
      if (occ[k] > to.cutoff(k)) {
        inside = false;
        if (post[k]) counted = false;
      }
    }
    map.target[f] = inside ? static_cast<std::ptrdiff_t>(to.index(occ)) : -1;
    map.counted[f] = counted;
  }
  return map;
}

void check_truncation(const Cutoffs& from, const Cutoffs& to) {
  if (from.size() != to.size()) throw std::invalid_argument("truncate: mode count mismatch");
  for (std::size_t k = 0; k < from.size(); ++k) {
    if (to[k] > from[k] || to[k] < 0) throw std::invalid_argument("truncate: new cutoff must be in [0, old cutoff]");
  }
}

}  // namespace

FockState truncate(const FockState& state, const Cutoffs& cutoffs) {
  check_truncation(state.cutoffs(), cutoffs);
  FockLayout to(cutoffs);
  const auto map = truncation_map(state.layout(), to, state.post_selected());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.dim()));
  double lost = 0.0;
  for (std::size_t f = 0; f < state.dim(); ++f) {
    const Complex a = state.amplitudes()[static_cast<Eigen::Index>(f)];
    if (map.target[f] >= 0) {
      v[map.target[f]] = a;
    } else if (map.counted[f]) {
      lost += std::norm(a);
    }
  }
  return FockState(cutoffs, std::move(v), state.norm_deficit() + lost, state.post_selected());
}

DensityOperator truncate(const DensityOperator& rho, const Cutoffs& cutoffs) {
  check_truncation(rho.cutoffs(), cutoffs);
  FockLayout to(cutoffs);
  const auto map = truncation_map(rho.layout(), to, rho.post_selected());
  std::vector<Eigen::Index> keep_from;
  std::vector<Eigen::Index> keep_to;
  double lost = 0.0;
  for (std::size_t f = 0; f < rho.dim(); ++f) {
    if (map.target[f] >= 0) {
      keep_from.push_back(static_cast<Eigen::Index>(f));
      keep_to.push_back(map.target[f]);
    } else if (map.counted[f]) {
      lost += rho.matrix()(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f)).real();
    }
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(to.dim()), static_cast<Eigen::Index>(to.dim()));
  for (std::size_t r = 0; r < keep_from.size(); ++r) {
    for (std::size_t c = 0; c < keep_from.size(); ++c) m(keep_to[r], keep_to[c]) = rho.matrix()(keep_from[r], keep_from[c]);
  }
  return DensityOperator(cutoffs, std::move(m), rho.trace_deficit() + std::max(lost, 0.0), rho.post_selected());
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd beam_splitter_block(double theta, int total_photons) {
  const int n = total_photons;
  if (n < 0) throw std::invalid_argument("total photon number must be nonnegative");
  // Generator a^dag b - a b^dag in the basis |k, n-k>; H = i G is Hermitian.
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    const double g = std::sqrt(static_cast<double>((k + 1) * (n - k)));  // <k+1, n-k-1| a^dag b |k, n-k>
    h(k + 1, k) = Complex(0.0, g);
    h(k, k + 1) = Complex(0.0, -g);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(n + 1);
  for (int k = 0; k <= n; ++k) phases[k] = std::exp(Complex(0.0, -theta * es.eigenvalues()[k]));
  const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return u.real();
}

Eigen::Matrix2d beam_splitter_mode_matrix(double theta) {
  Eigen::Matrix2d m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

FockState apply_beam_splitter(const FockState& state, int mode_i, int mode_j, double theta) {
  check_mode(state.layout(), mode_i);
  check_mode(state.layout(), mode_j);
  if (mode_i == mode_j) throw std::invalid_argument("beam splitter needs two distinct modes");
  const auto& layout = state.layout();
  const auto blocks = make_blocks(theta, layout.cutoff(mode_i) + layout.cutoff(mode_j));
  Eigen::VectorXcd v = state.amplitudes();
  const double lost = apply_two_mode(v, layout, mode_i, mode_j, blocks, state.is_post_selected(mode_i),
                                     state.is_post_selected(mode_j));
  return FockState(state.cutoffs(), std::move(v), state.norm_deficit() + lost, state.post_selected());
}

DensityOperator apply_beam_splitter(const DensityOperator& rho, int mode_i, int mode_j, double theta) {
  check_mode(rho.layout(), mode_i);
  check_mode(rho.layout(), mode_j);
  if (mode_i == mode_j) throw std::invalid_argument("beam splitter needs two distinct modes");
  const auto& layout = rho.layout();
  const auto blocks = make_blocks(theta, layout.cutoff(mode_i) + layout.cutoff(mode_j));
  const auto ens = signed_ensemble(rho.matrix());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.matrix().rows(), rho.matrix().cols());
  double lost = 0.0;
  std::vector<Eigen::Index> nz;
  for (std::size_t k = 0; k < ens.weights.size(); ++k) {
    Eigen::VectorXcd v = ens.vectors[k];
    lost += ens.weights[k] *
            apply_two_mode(v, layout, mode_i, mode_j, blocks, rho.is_post_selected(mode_i), rho.is_post_selected(mode_j));
    add_outer(out, ens.weights[k], v, nz);
  }
  return DensityOperator(rho.cutoffs(), std::move(out), rho.trace_deficit() + std::max(lost, 0.0),
                         rho.post_selected());
}

// ---------------------------------------------------------------------------

FockState apply_mode_operator(const FockState& state, int mode, const Eigen::MatrixXcd& op) {
  check_mode(state.layout(), mode);
  const int levels = state.layout().levels(mode);
  if (op.rows() != levels || op.cols() != levels) throw std::invalid_argument("mode operator has wrong shape");
  Eigen::VectorXcd v = state.amplitudes();
  apply_local(v, state.layout(), mode, op);
  return FockState(state.cutoffs(), std::move(v), state.norm_deficit(), state.post_selected());
}

DensityOperator apply_mode_operator(const DensityOperator& rho, int mode, const Eigen::MatrixXcd& op_left,
                                    const Eigen::MatrixXcd& op_right) {
  check_mode(rho.layout(), mode);
  const int levels = rho.layout().levels(mode);
  if (op_left.rows() != levels || op_left.cols() != levels || op_right.rows() != levels || op_right.cols() != levels) {
    throw std::invalid_argument("mode operator has wrong shape");
  }
  Eigen::MatrixXcd m = rho.matrix();
  for (Eigen::Index c = 0; c < m.cols(); ++c) apply_local(m.col(c), rho.layout(), mode, op_left);
  Eigen::MatrixXcd t = m.adjoint();
  for (Eigen::Index c = 0; c < t.cols(); ++c) apply_local(t.col(c), rho.layout(), mode, op_right);
  return DensityOperator(rho.cutoffs(), t.adjoint(), rho.trace_deficit(), rho.post_selected());
}

Eigen::MatrixXcd annihilation_matrix(int cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd exponential_number_matrix(int cutoff, double base) {
  if (!(base > 0.0)) throw std::invalid_argument("exponential number operator needs a positive base");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) m(n, n) = std::pow(base, 0.5 * n);
  return m;
}

FockState apply_annihilation(const FockState& state, int mode) {
  check_mode(state.layout(), mode);
  const int c = state.layout().cutoff(mode);
  FockState out = apply_mode_operator(state, mode, annihilation_matrix(c));
  // The zero-filled top level misses sqrt(c+1) times the truncated amplitude.
  return FockState(out.cutoffs(), out.amplitudes(), state.norm_deficit() * (c + 1), out.post_selected());
}

DensityOperator apply_annihilation(const DensityOperator& rho, int mode) {
  check_mode(rho.layout(), mode);
  const int c = rho.layout().cutoff(mode);
  const auto a = annihilation_matrix(c);
  DensityOperator out = apply_mode_operator(rho, mode, a, a);
  return DensityOperator(out.cutoffs(), out.matrix(), rho.trace_deficit() * (c + 1), out.post_selected());
}

FockState apply_exponential_number(const FockState& state, int mode, double base) {
  check_mode(state.layout(), mode);
  const int c = state.layout().cutoff(mode);
  FockState out = apply_mode_operator(state, mode, exponential_number_matrix(c, base));
  const double scale = base > 1.0 ? std::pow(base, c + 1) : 1.0;
  return FockState(out.cutoffs(), out.amplitudes(), state.norm_deficit() * scale, out.post_selected());
}

DensityOperator apply_exponential_number(const DensityOperator& rho, int mode, double base) {
  check_mode(rho.layout(), mode);
  const int c = rho.layout().cutoff(mode);
  const auto g = exponential_number_matrix(c, base);
  DensityOperator out = apply_mode_operator(rho, mode, g, g);
  const double scale = base > 1.0 ? std::pow(base, c + 1) : 1.0;
  return DensityOperator(out.cutoffs(), out.matrix(), rho.trace_deficit() * scale, out.post_selected());
}

// ---------------------------------------------------------------------------

FockState slice_mode(const FockState& state, int mode, int photons) {
  check_mode(state.layout(), mode);
  if (photons < 0 || photons > state.layout().cutoff(mode)) {
    throw std::out_of_range("projection outcome exceeds the mode cutoff");
  }
  const Cutoffs cut = drop_mode(state.cutoffs(), mode);
  FockLayout out_layout(cut);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(out_layout.dim()));
  const auto& layout = state.layout();
  std::size_t o = 0;
  for (std::size_t f = 0; f < layout.dim(); ++f) {
    if (layout.occupation(f, mode) == photons) v[static_cast<Eigen::Index>(o++)] = state.amplitudes()[static_cast<Eigen::Index>(f)];
  }
  return FockState(cut, std::move(v), state.norm_deficit(), drop_flag(state.post_selected(), mode));
}

DensityOperator slice_mode(const DensityOperator& rho, int mode, int photons) {
  check_mode(rho.layout(), mode);
  if (photons < 0 || photons > rho.layout().cutoff(mode)) {
    throw std::out_of_range("projection outcome exceeds the mode cutoff");
  }
  const Cutoffs cut = drop_mode(rho.cutoffs(), mode);
  std::vector<Eigen::Index> rows;
  const auto& layout = rho.layout();
  for (std::size_t f = 0; f < layout.dim(); ++f) {
    if (layout.occupation(f, mode) == photons) rows.push_back(static_cast<Eigen::Index>(f));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rho.matrix()(rows[r], rows[c]);
  }
  return DensityOperator(cut, std::move(m), rho.trace_deficit(), drop_flag(rho.post_selected(), mode));
}

HeraldedResult project_mode(const FockState& state, int mode, int photons, double floor) {
  FockState slice = slice_mode(state, mode, photons);
  const double p = slice.squared_norm();
  if (!(p >= floor) || p == 0.0) {
    throw HeraldImpossibleError("herald |" + std::to_string(photons) + "> on mode " + std::to_string(mode) +
                                    " has probability " + std::to_string(p),
                                p);
  }
  auto [normed, norm] = normalize(slice);
  const double deficit = normed.norm_deficit();
  return HeraldedResult{std::move(normed), p, deficit, {{std::to_string(mode), photons}}};
}

HeraldedResult project_mode(const DensityOperator& rho, int mode, int photons, double floor) {
  DensityOperator slice = slice_mode(rho, mode, photons);
  const double p = slice.trace();
  if (!(p >= floor) || p <= 0.0) {
    throw HeraldImpossibleError("herald |" + std::to_string(photons) + "> on mode " + std::to_string(mode) +
                                    " has probability " + std::to_string(p),
                                p);
  }
  auto [normed, tr] = normalize(slice);
  const double deficit = normed.trace_deficit();
  return HeraldedResult{std::move(normed), p, deficit, {{std::to_string(mode), photons}}};
}

namespace {

// Splits flat indices into (kept, traced) flat indices for a sorted keep list.
void split_indices(const FockLayout& layout, const std::vector<int>& keep, std::vector<std::size_t>& kept_index,
                   std::vector<std::size_t>& traced_index, Cutoffs& kept_cut, std::size_t& traced_dim) {
  std::vector<bool> is_kept(layout.num_modes(), false);
  for (int m : keep) is_kept[m] = true;
  Cutoffs traced_cut;
  for (int m = 0; m < layout.num_modes(); ++m) (is_kept[m] ? kept_cut : traced_cut).push_back(layout.cutoff(m));
  FockLayout kl(kept_cut);
  FockLayout tl(traced_cut);
  traced_dim = tl.dim();
  kept_index.resize(layout.dim());
  traced_index.resize(layout.dim());
  std::vector<int> ko;
  std::vector<int> to;
  for (std::size_t f = 0; f < layout.dim(); ++f) {
    ko.clear();
    to.clear();
    for (int m = 0; m < layout.num_modes(); ++m) (is_kept[m] ? ko : to).push_back(layout.occupation(f, m));
    kept_index[f] = kl.index(ko);
    traced_index[f] = tl.index(to);
  }
}

std::vector<int> validate_keep(const FockLayout& layout, std::vector<int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  keep = sorted_unique(std::move(keep));
  for (int m : keep) check_mode(layout, m);
  return keep;
}

std::vector<bool> keep_flags(const std::vector<bool>& flags, const std::vector<int>& keep) {
  std::vector<bool> out;
  for (int m : keep) out.push_back(flags[m]);
  return out;
}

}  // namespace

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep_modes) {
  const auto keep = validate_keep(rho.layout(), std::move(keep_modes));
  std::vector<std::size_t> ki;
  std::vector<std::size_t> ti;
  Cutoffs kept_cut;
  std::size_t traced_dim = 0;
  split_indices(rho.layout(), keep, ki, ti, kept_cut, traced_dim);
  const auto kd = static_cast<Eigen::Index>(FockLayout(kept_cut).dim());
  std::vector<std::vector<std::size_t>> groups(traced_dim);
  for (std::size_t f = 0; f < rho.dim(); ++f) groups[ti[f]].push_back(f);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kd, kd);
  for (const auto& g : groups) {
    for (std::size_t r : g) {
      for (std::size_t c : g) {
        out(static_cast<Eigen::Index>(ki[r]), static_cast<Eigen::Index>(ki[c])) +=
            rho.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return DensityOperator(kept_cut, std::move(out), rho.trace_deficit(), keep_flags(rho.post_selected(), keep));
}

DensityOperator partial_trace(const FockState& state, std::vector<int> keep_modes) {
  const auto keep = validate_keep(state.layout(), std::move(keep_modes));
  std::vector<std::size_t> ki;
  std::vector<std::size_t> ti;
  Cutoffs kept_cut;
  std::size_t traced_dim = 0;
  split_indices(state.layout(), keep, ki, ti, kept_cut, traced_dim);
  const auto kd = static_cast<Eigen::Index>(FockLayout(kept_cut).dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(kd, static_cast<Eigen::Index>(traced_dim));
  for (std::size_t f = 0; f < state.dim(); ++f) {
    m(static_cast<Eigen::Index>(ki[f]), static_cast<Eigen::Index>(ti[f])) = state.amplitudes()[static_cast<Eigen::Index>(f)];
  }
  return DensityOperator(kept_cut, m * m.adjoint(), state.norm_deficit(), keep_flags(state.post_selected(), keep));
}

std::pair<FockState, double> normalize(const FockState& state) {
  const double sq = state.squared_norm();
  if (!(sq > 0.0)) throw std::invalid_argument("normalize: zero state");
  const double norm = std::sqrt(sq);
  return {FockState(state.cutoffs(), state.amplitudes() / norm, state.norm_deficit() / sq, state.post_selected()),
          norm};
}

std::pair<DensityOperator, double> normalize(const DensityOperator& rho) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw std::invalid_argument("normalize: zero-trace operator");
  return {DensityOperator(rho.cutoffs(), rho.matrix() / tr, rho.trace_deficit() / tr, rho.post_selected()), tr};
}

// ---------------------------------------------------------------------------

DensityOperator as_density(const AnyState& state) {
  if (const auto* psi = std::get_if<FockState>(&state)) return DensityOperator::from_pure(*psi);
  return std::get<DensityOperator>(state);
}

Ensemble spectral_ensemble(const DensityOperator& rho, double relative_floor) {
  auto pairs = block_eigenpairs(0.5 * (rho.matrix() + rho.matrix().adjoint()));
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  const double top = pairs.empty() ? 0.0 : std::max(pairs.front().first, 0.0);
  Ensemble out;
  for (auto& [w, v] : pairs) {
    if (w > relative_floor * top && w > 0.0) {
      out.weights.push_back(w);
      out.members.emplace_back(rho.cutoffs(), std::move(v), 0.0, rho.post_selected());
    } else if (w > 0.0) {
      out.dropped_weight += w;
    }
  }
  return out;
}

DensityOperator mixture(const std::vector<double>& weights, const std::vector<FockState>& members) {
  if (weights.size() != members.size() || members.empty()) {
    throw std::invalid_argument("mixture: weights and members must be nonempty and of equal length");
  }
  const auto& layout = members.front().layout();
  const auto d = static_cast<Eigen::Index>(layout.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  double deficit = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!(members[k].layout() == layout)) throw std::invalid_argument("mixture: members have different layouts");
    m.noalias() += weights[k] * members[k].amplitudes() * members[k].amplitudes().adjoint();
    deficit += std::abs(weights[k]) * members[k].norm_deficit();
  }
  return DensityOperator(layout.cutoffs(), std::move(m), deficit, members.front().post_selected());
}

}  // namespace cvdistill
