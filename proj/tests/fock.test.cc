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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvdistill/error.hpp"
#include "cvdistill/state_prep.hpp"

using namespace cvdistill;

namespace {

constexpr double kQuarter = std::numbers::pi / 4;

FockState random_state(const Cutoffs& cutoffs, int max_total, std::mt19937_64& rng) {
  FockLayout layout(cutoffs);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    int total = 0;
    for (int n : layout.occupation(i)) total += n;
    if (total <= max_total) v[static_cast<Eigen::Index>(i)] = Complex(g(rng), g(rng));
  }
  v.normalize();
  return FockState(cutoffs, v);
}

}  // namespace

TEST(fock_layout, index_roundtrip) {
  FockLayout layout({2, 3, 1});
  EXPECT_EQ(layout.dim(), 24u);
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    auto occ = layout.occupation(i);
    EXPECT_EQ(layout.index(occ), i);
    for (int m = 0; m < 3; ++m) EXPECT_EQ(layout.occupation(i, m), occ[m]);
  }
  // mode 0 is the slowest index
  EXPECT_EQ(layout.stride(0), 8u);
  EXPECT_EQ(layout.stride(2), 1u);
}

TEST(fock_tensor_product, vacuum_composition) {
  auto s = tensor_product(FockState::vacuum({3}), FockState::vacuum({2}));
  EXPECT_EQ(s.cutoffs(), (Cutoffs{3, 2}));
  EXPECT_NEAR(std::abs(s.amplitude({0, 0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(s.squared_norm(), 1.0, 1e-15);
}

TEST(fock_tensor_product, tmsv_with_vacuum_support) {
  auto s = tensor_product(make_tmsv(0.4, {5, 5}), FockState::vacuum({2, 2}));
  for (std::size_t i = 0; i < s.dim(); ++i) {
    auto occ = s.layout().occupation(i);
    if (occ[0] != occ[1] || occ[2] != 0 || occ[3] != 0) {
      EXPECT_EQ(s.amplitudes()[i], Complex{});
    }
  }
}

TEST(fock_tensor_product, product_amplitude) {
  auto s = tensor_product(make_tmsv(0.4, {4, 4}), make_tmsv(0.144, {4, 4}));
  const double expect = std::sqrt(0.84) * 0.4 * std::sqrt(1 - 0.144 * 0.144) * 0.144;
  EXPECT_NEAR(s.amplitude({1, 1, 1, 1}).real(), expect, 1e-14);
}

TEST(fock_tensor_product, kind_mismatch) {
  AnyState a = FockState::vacuum({1});
  AnyState b = DensityOperator::from_pure(FockState::vacuum({1}));
  EXPECT_THROW(tensor_product(a, b), KindMismatchError);
}

TEST(fock_beam_splitter, single_photon_balanced) {
  auto out = apply_beam_splitter(FockState::basis({1, 1}, {1, 0}), 0, 1, kQuarter);
  EXPECT_NEAR(out.amplitude({1, 0}).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out.amplitude({0, 1}).real(), -1 / std::sqrt(2.0), 1e-15);
}

TEST(fock_beam_splitter, vacuum_stable) {
  for (double theta : {0.1, 0.7, 2.0}) {
    auto out = apply_beam_splitter(FockState::vacuum({3, 3}), 0, 1, theta);
    EXPECT_NEAR(std::abs(out.amplitude({0, 0}) - 1.0), 0.0, 1e-15);
  }
}

TEST(fock_beam_splitter, rejects_bad_modes) {
  auto s = FockState::vacuum({2, 2});
  EXPECT_THROW(apply_beam_splitter(s, 1, 1, 0.3), std::invalid_argument);
  EXPECT_THROW(apply_beam_splitter(s, 0, 2, 0.3), std::out_of_range);
}

TEST(fock_beam_splitter, identical_gaussian_copies_invariant) {
  // Copies ordered A1 B1 A2 B2.
  auto two = tensor_product(make_tmsv(0.3, {16, 16}), make_tmsv(0.3, {16, 16}));
  auto out = apply_beam_splitter(apply_beam_splitter(two, 0, 2, kQuarter), 1, 3, kQuarter);
  EXPECT_LT((out.amplitudes() - two.amplitudes()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(fock_beam_splitter, block_conservation) {
  auto out = apply_beam_splitter(FockState::basis({4, 4}, {2, 1}), 0, 1, 0.37);
  for (std::size_t i = 0; i < out.dim(); ++i) {
    auto occ = out.layout().occupation(i);
    if (occ[0] + occ[1] != 3) {
      EXPECT_EQ(out.amplitudes()[i], Complex{});
    }
  }
  EXPECT_NEAR(out.squared_norm(), 1.0, 1e-14);
}

TEST(fock_beam_splitter, unitary_below_cutoff) {
  std::mt19937_64 rng(7);
  auto s = random_state({6, 6, 6}, 4, rng);
  auto out = apply_beam_splitter(apply_beam_splitter(s, 0, 2, 0.4), 1, 2, 1.1);
  EXPECT_NEAR(out.squared_norm(), 1.0, 1e-10);
  EXPECT_NEAR(out.norm_deficit(), 0.0, 1e-15);
}

TEST(fock_beam_splitter, overflow_goes_to_deficit) {
  auto out = apply_beam_splitter(FockState::basis({2, 1}, {2, 0}), 0, 1, kQuarter);
  // |2,0> -> (|2,0> - sqrt2 |1,1> + |0,2>)/2; |0,2> is outside the cutoff.
  EXPECT_NEAR(out.squared_norm(), 0.75, 1e-14);
  EXPECT_NEAR(out.norm_deficit(), 0.25, 1e-14);
}

TEST(fock_beam_splitter, reordering_identity) {
  // Modes A1 A2 C1 C2; all couplings conserve total photon number.
  std::mt19937_64 rng(11);
  const double theta = std::acos(std::sqrt(0.7));
  for (int trial = 0; trial < 3; ++trial) {
    auto s = random_state({3, 3, 3, 3}, 3, rng);
    auto lhs = apply_beam_splitter(s, 2, 3, -kQuarter);
    lhs = apply_beam_splitter(lhs, 1, 3, theta);
    lhs = apply_beam_splitter(lhs, 0, 2, theta);
    lhs = apply_beam_splitter(lhs, 0, 1, kQuarter);
    auto rhs = apply_beam_splitter(s, 0, 1, kQuarter);
    rhs = apply_beam_splitter(rhs, 1, 3, theta);
    rhs = apply_beam_splitter(rhs, 0, 2, theta);
    rhs = apply_beam_splitter(rhs, 2, 3, -kQuarter);
    EXPECT_LT((lhs.amplitudes() - rhs.amplitudes()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(fock_beam_splitter, density_matches_pure) {
  std::mt19937_64 rng(3);
  auto s = random_state({4, 4}, 6, rng);
  auto pure = apply_beam_splitter(s, 0, 1, 0.6);
  auto mixed = apply_beam_splitter(DensityOperator::from_pure(s), 0, 1, 0.6);
  EXPECT_LT((mixed.matrix() - DensityOperator::from_pure(pure).matrix()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(mixed.trace_deficit(), pure.norm_deficit(), 1e-13);
}

TEST(fock_annihilation, basics) {
  auto one = apply_annihilation(FockState::basis({3}, {1}), 0);
  EXPECT_NEAR(one.amplitude({0}).real(), 1.0, 1e-15);
  EXPECT_NEAR(one.squared_norm(), 1.0, 1e-15);
  auto zero = apply_annihilation(FockState::vacuum({3}), 0);
  EXPECT_EQ(zero.squared_norm(), 0.0);
}

TEST(fock_annihilation, on_tmsv_mode_b) {
  auto out = apply_annihilation(make_tmsv(0.4, {8, 8}), 1);
  for (int n = 0; n < 8; ++n) {
    EXPECT_NEAR(out.amplitude({n + 1, n}).real(), std::sqrt(0.84) * std::pow(0.4, n + 1) * std::sqrt(n + 1.0), 1e-14);
  }
}

TEST(fock_exponential_number, basics) {
  auto s = make_tmsv(0.4, {6, 6});
  auto same = apply_exponential_number(s, 0, 1.0);
  EXPECT_LT((same.amplitudes() - s.amplitudes()).norm(), 1e-15);
  auto two = apply_exponential_number(FockState::basis({3}, {2}), 0, 0.64);
  EXPECT_NEAR(two.amplitude({2}).real(), 0.64, 1e-15);
  EXPECT_THROW(apply_exponential_number(s, 0, 0.0), std::invalid_argument);
}

TEST(fock_exponential_number, attenuated_tmsv_norm) {
  auto s = make_tmsv(0.4, {30, 30});
  auto out = apply_exponential_number(apply_exponential_number(s, 0, 0.2), 1, 0.2);
  const double ratio = out.amplitude({1, 1}).real() / out.amplitude({0, 0}).real();
  EXPECT_NEAR(ratio, 0.08, 1e-14);
  EXPECT_NEAR(out.squared_norm(), 0.84 / (1 - 0.04 * 0.16), 1e-12);
}

TEST(fock_project, tmsv_vacuum_herald) {
  auto r = project_mode(make_tmsv(0.4, {20, 20}), 1, 0);
  EXPECT_NEAR(r.probability, 0.84, 1e-12);
  EXPECT_EQ(r.pure().num_modes(), 1);
  EXPECT_NEAR(std::abs(r.pure().amplitude({0})), 1.0, 1e-14);
}

TEST(fock_project, photon_number_correlation) {
  for (int k : {1, 3}) {
    auto r = project_mode(make_tmsv(0.4, {10, 10}), 1, k);
    EXPECT_NEAR(std::abs(r.pure().amplitude({k})), 1.0, 1e-13);
  }
}

TEST(fock_project, impossible_herald) {
  EXPECT_THROW(project_mode(FockState::vacuum({2, 2}), 0, 1), HeraldImpossibleError);
}

TEST(fock_project, commutes_with_global_phase) {
  std::mt19937_64 rng(5);
  auto s = random_state({3, 3}, 6, rng);
  FockState rotated(s.cutoffs(), s.amplitudes() * std::polar(1.0, 0.9));
  auto a = project_mode(s, 0, 1);
  auto b = project_mode(rotated, 0, 1);
  EXPECT_NEAR(a.probability, b.probability, 1e-14);
  auto da = DensityOperator::from_pure(a.pure()).matrix();
  auto db = DensityOperator::from_pure(b.pure()).matrix();
  EXPECT_LT((da - db).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(fock_partial_trace, vacuum) {
  auto r = partial_trace(FockState::vacuum({2, 2}), {0});
  EXPECT_NEAR(r.element({0}, {0}).real(), 1.0, 1e-15);
  EXPECT_NEAR(r.trace(), 1.0, 1e-15);
}

TEST(fock_partial_trace, tmsv_marginal_is_thermal) {
  auto r = partial_trace(make_tmsv(0.4, {20, 20}), {0});
  for (int n = 0; n < 6; ++n) EXPECT_NEAR(r.element({n}, {n}).real(), 0.84 * std::pow(0.16, n), 1e-14);
  EXPECT_NEAR(std::abs(r.element({1}, {0})), 0.0, 1e-15);
}

TEST(fock_partial_trace, product_factor) {
  std::mt19937_64 rng(9);
  auto a = DensityOperator::from_pure(random_state({3, 2}, 5, rng));
  auto b = DensityOperator::from_pure(random_state({2}, 2, rng));
  auto r = partial_trace(tensor_product(a, b), {0, 1});
  EXPECT_LT((r.matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(r.hermiticity_error(), 1e-15);
  EXPECT_THROW(partial_trace(a, {}), std::invalid_argument);
}

TEST(fock_normalize, scaling) {
  FockState s({2}, Eigen::VectorXcd::Unit(3, 0) * 2.0);
  auto [unit, norm] = normalize(s);
  EXPECT_NEAR(norm, 2.0, 1e-15);
  EXPECT_NEAR(unit.squared_norm(), 1.0, 1e-15);
  auto [same, one] = normalize(unit);
  EXPECT_NEAR(one, 1.0, 1e-15);
  EXPECT_THROW(normalize(FockState({2}, Eigen::VectorXcd::Zero(3))), std::invalid_argument);
}

TEST(fock_ensemble, spectral_roundtrip) {
  auto rho = apply_loss_channel(make_tmsv(0.4, {6, 6}), 0, 0.7);
  auto ens = spectral_ensemble(rho);
  auto back = mixture(ens.weights, ens.members);
  EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}
