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

#include "cvdistill/measures.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "cvdistill/analytics.hpp"
#include "cvdistill/schemes.hpp"
#include "cvdistill/state_prep.hpp"

using namespace cvdistill;

namespace {

double tmsv_entropy(double lambda) {
  const double sh2 = lambda * lambda / (1 - lambda * lambda);
  const double ch2 = 1 + sh2;
  return ch2 * std::log(ch2) - sh2 * std::log(sh2);
}

}  // namespace

TEST(measures_variance, vacuum_and_tmsv) {
  EXPECT_NEAR(squeezing_variance(FockState::vacuum({3, 3})), 1.0, 1e-15);
  EXPECT_NEAR(squeezing_variance(make_tmsv(0.4, {40, 40})), 0.6 / 1.4, 1e-12);
  auto v = squeezing_variances(make_tmsv(0.4, {40, 40}));
  EXPECT_NEAR(v.x_minus, v.p_plus, 1e-12);
}

TEST(measures_variance, density_matches_pure) {
  auto s = make_tmsv(0.3, {20, 20});
  EXPECT_NEAR(squeezing_variance(DensityOperator::from_pure(s)), squeezing_variance(s), 1e-14);
}

TEST(measures_variance, subtracted_state) {
  auto a = photon_subtract(make_tmsv(0.4, {41, 41}), 0, 0.8, 1);
  auto b = photon_subtract(a.state, 1, 0.8, 1);
  EXPECT_NEAR(squeezing_variance(b.state), 0.31178, 1e-5);
}

TEST(measures_covariance, tmsv_and_vacuum) {
  auto vac = covariance_summary(FockState::vacuum({2, 2}));
  EXPECT_LT((vac.cov - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  const double r = std::atanh(0.4);
  auto t = covariance_summary(make_tmsv(0.4, {40, 40}));
  EXPECT_NEAR(t.cov(0, 0), std::cosh(2 * r), 1e-12);
  EXPECT_NEAR(t.cov(0, 2), std::sinh(2 * r), 1e-12);
  EXPECT_NEAR(t.cov(1, 3), -std::sinh(2 * r), 1e-12);
  EXPECT_NEAR(t.cov(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(t.symplectic_eigenvalues()[0], 1.0, 1e-10);
  EXPECT_GT(t.uncertainty_margin(), -1e-10);
}

TEST(measures_entropy, reference_values) {
  EXPECT_NEAR(entanglement_entropy(FockState::basis({2, 2}, {1, 0})), 0.0, 1e-12);
  EXPECT_NEAR(entanglement_entropy(make_tmsv(0.4, {40, 40})), tmsv_entropy(0.4), 1e-12);
  EXPECT_NEAR(tmsv_entropy(0.4), 0.523417, 1e-6);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(9);
  v[2] = 1 / std::sqrt(2.0);   // |0,2>
  v[6] = -1 / std::sqrt(2.0);  // |2,0>
  EXPECT_NEAR(entanglement_entropy(FockState({2, 2}, v)), std::log(2.0), 1e-14);
}

TEST(measures_entropy, helpers) {
  EXPECT_NEAR(entropy_of_distribution({0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy_of_distribution({2.0, 2.0}), std::log(2.0), 1e-15);
  EXPECT_THROW(entropy_of_distribution({0.0}), std::invalid_argument);
  EXPECT_NEAR(schmidt_entropy({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), std::log(2.0), 1e-15);
}

TEST(measures_fidelity, reference_values) {
  EXPECT_NEAR(fidelity_with_tmsv(make_tmsv(0.5, {30, 30}), 0.5), 1.0, 1e-14);
  EXPECT_NEAR(fidelity_with_tmsv(FockState::vacuum({10, 10}), 0.6), 1 - 0.36, 1e-15);
  auto rho = DensityOperator::from_pure(make_tmsv(0.5, {30, 30}));
  EXPECT_NEAR(fidelity_with_tmsv(rho, 0.5), 1.0, 1e-14);
}

TEST(measures_fidelity, distilled_state_matches_closed_form) {
  ProtocolParams p;
  auto r = run_simplified_two_copy(p, 24);
  const double w = omega_star(0.32, 1.0);
  EXPECT_NEAR(fidelity_with_tmsv(r.state, w), fidelity_tmsv(0.32, 1.0, w), 1e-9);
}

TEST(measures_gaussianity, tmsv_and_subtracted) {
  EXPECT_LT(gaussianity_residual(make_tmsv(0.4, {30, 30})), 1e-9);
  auto a = photon_subtract(make_tmsv(0.4, {31, 31}), 0, 0.8, 1);
  auto b = photon_subtract(a.state, 1, 0.8, 1);
  EXPECT_GT(gaussianity_residual(b.state), 1e-3);
  auto th = make_squeezed_thermal(0.2, 0.05, {16, 16});
  EXPECT_LT(gaussianity_residual(th), 1e-9);
}

TEST(measures_trace_distance, reference_values) {
  auto a = make_tmsv(0.4, {20, 20});
  auto b = make_tmsv(0.41, {20, 20});
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(FockState::basis({2, 2}, {1, 0}), FockState::basis({2, 2}, {0, 1})), 1.0, 1e-14);
  const double ab = trace_distance(a, b);
  EXPECT_GT(ab, 0.0);
  EXPECT_LT(ab, 0.05);
  EXPECT_NEAR(ab, trace_distance(b, a), 1e-14);
  // pure states: sqrt(1 - |<a|b>|^2)
  EXPECT_NEAR(ab, std::sqrt(1 - std::norm(a.amplitudes().dot(b.amplitudes()))), 1e-10);
  EXPECT_NEAR(trace_distance(AnyState(a), AnyState(DensityOperator::from_pure(b))), ab, 1e-10);
}

TEST(measures_uhlmann, pure_overlap) {
  auto a = make_tmsv(0.4, {12, 12});
  auto b = make_tmsv(0.2, {12, 12});
  const double want = std::norm(a.amplitudes().dot(b.amplitudes()));
  EXPECT_NEAR(uhlmann_fidelity(DensityOperator::from_pure(a), DensityOperator::from_pure(b)), want, 1e-8);
}
