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

#include "cvdistill/state_prep.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "cvdistill/measures.hpp"

using namespace cvdistill;

namespace {

ProtocolParams params(double lambda, double eta, double T, double kappa2 = 1.0) {
  ProtocolParams p;
  p.lambda = lambda;
  p.eta = eta;
  p.T = T;
  p.kappa2 = kappa2;
  return p;
}

Eigen::Matrix4d tmsv_cov(double lambda) {
  const double l2 = lambda * lambda;
  const double a = (1 + l2) / (1 - l2);
  const double c = 2 * lambda / (1 - l2);
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  // ordering x_A p_A x_B p_B
  g.diagonal().setConstant(a);
  g(0, 2) = g(2, 0) = c;
  g(1, 3) = g(3, 1) = -c;
  return g;
}

}  // namespace

TEST(state_prep_tmsv, vacuum_at_zero) {
  auto s = make_tmsv(0.0, {4, 4});
  EXPECT_EQ(s.amplitude({0, 0}), Complex(1.0));
  EXPECT_NEAR(s.squared_norm(), 1.0, 1e-15);
}

TEST(state_prep_tmsv, coefficients_and_tail) {
  auto s = make_tmsv(0.4, {14, 14});
  EXPECT_NEAR(s.amplitude({0, 0}).real(), 0.9165151390, 1e-9);
  EXPECT_NEAR(s.amplitude({1, 1}).real(), 0.3666060556, 1e-9);
  EXPECT_EQ(s.amplitude({1, 0}), Complex{});
  EXPECT_NEAR(s.norm_deficit(), std::pow(0.16, 15), 1e-25);
  EXPECT_NEAR(s.squared_norm() + s.norm_deficit(), 1.0, 1e-15);
  EXPECT_THROW(make_tmsv(1.0, {3, 3}), std::invalid_argument);
}

TEST(state_prep_tmsv, covariance) {
  auto cov = covariance_summary(make_tmsv(0.4, {40, 40})).cov;
  EXPECT_LT((cov - tmsv_cov(0.4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(state_prep_squeezed_thermal, zero_noise_is_tmsv) {
  const double s = 0.3;
  auto rho = make_squeezed_thermal(s, 0.0, {10, 10});
  auto ref = DensityOperator::from_pure(make_tmsv(std::tanh(s), {10, 10}));
  EXPECT_LT((rho.matrix() - ref.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(state_prep_squeezed_thermal, zero_squeezing_is_thermal_product) {
  const double nbar = 0.2;
  auto rho = make_squeezed_thermal(0.0, nbar, {8, 8});
  EXPECT_LT((rho.matrix() - Eigen::MatrixXcd(rho.matrix().diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  auto p = [&](int n) { return std::pow(nbar, n) / std::pow(1 + nbar, n + 1); };
  EXPECT_NEAR(rho.element({2, 1}, {2, 1}).real(), p(2) * p(1), 1e-14);
}

TEST(state_prep_loss, identity_at_unit_transmittance) {
  auto s = make_tmsv(0.4, {6, 6});
  auto rho = apply_loss_channel(s, 0, 1.0);
  EXPECT_LT((rho.matrix() - DensityOperator::from_pure(s).matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(apply_loss_channel(s, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(apply_loss_channel(s, 0, 1.2), std::invalid_argument);
}

TEST(state_prep_loss, single_photon) {
  auto rho = apply_loss_channel(FockState::basis({3}, {1}), 0, 0.7);
  EXPECT_NEAR(rho.element({1}, {1}).real(), 0.7, 1e-15);
  EXPECT_NEAR(rho.element({0}, {0}).real(), 0.3, 1e-15);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
}

TEST(state_prep_loss, matches_kraus_sum) {
  // Explicit Kraus sandwich as an independent construction.
  auto pure = make_tmsv(0.5, {5, 5});
  auto rho = DensityOperator::from_pure(pure);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : loss_kraus_operators(5, 0.6)) want += apply_mode_operator(rho, 1, k, k).matrix();
  auto got = apply_loss_channel(pure, 1, 0.6);
  EXPECT_LT((got.matrix() - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(state_prep_loss, covariance_relation) {
  auto rho = as_density(make_lossy_tmsv(0.4, 0.8, {30, 30}));
  Eigen::Matrix4d want = 0.8 * tmsv_cov(0.4) + 0.2 * Eigen::Matrix4d::Identity();
  EXPECT_LT((covariance_summary(rho).cov - want).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(state_prep_sigma, pure_case) {
  auto sig = make_sigma(params(0.4, 1.0, 0.8), {12, 12});
  ASSERT_TRUE(std::holds_alternative<FockState>(sig.state));
  auto ref = make_tmsv(0.08, {12, 12});
  EXPECT_LT((std::get<FockState>(sig.state).amplitudes() - ref.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(sig.p_sigma, 0.84 / (1 - 0.04 * 0.16), 1e-15);
  EXPECT_NEAR(sig.p_sigma, 0.845411, 1e-6);
}

TEST(state_prep_sigma, p_sigma_is_fock_sum) {
  for (double eta : {1.0, 0.7}) {
    auto p = params(0.4, eta, 0.7);
    auto att = as_density(make_lossy_tmsv(0.4, eta, {30, 30}));
    att = apply_exponential_number(apply_exponential_number(att, 0, 0.3), 1, 0.3);
    EXPECT_NEAR(att.trace(), p_sigma(p), 1e-12);
  }
}

TEST(state_prep_sigma, mixed_parameters) {
  auto ap = attenuated_sigma_params(params(0.4, 0.8, 0.8));
  EXPECT_NEAR(ap.nu, 0.144, 1e-15);
  EXPECT_NEAR(ap.eta_prime, 4.0 / 9.0, 1e-15);
}

TEST(state_prep_sigma, negative_kappa2_is_imaginary) {
  auto sig = make_sigma(params(0.4, 1.0, 0.8, -0.25), {6, 6});
  EXPECT_NEAR(sig.squeezing.real(), 0.0, 1e-15);
  EXPECT_NEAR(sig.squeezing.imag(), 0.04, 1e-15);
}

TEST(state_prep_sigma, high_transmittance_gives_vacuum) {
  auto sig = make_sigma(params(0.4, 0.8, 1 - 1e-9), {6, 6});
  auto rho = as_density(sig.state);
  EXPECT_NEAR(rho.element({0, 0}, {0, 0}).real(), 1.0, 1e-9);
}

TEST(state_prep_sigma, attenuation_equivalence_grid) {
  const int c = 14;
  for (double l : {0.2, 0.4, 0.6}) {
    for (double e : {0.5, 0.8, 1.0}) {
      for (double T : {0.6, 0.8, 0.9}) {
        auto p = params(l, e, T);
        auto att = as_density(make_lossy_tmsv(l, e, {c, c}));
        att = normalize(apply_exponential_number(apply_exponential_number(att, 0, 1 - T), 1, 1 - T)).first;
        auto sig = normalize(as_density(make_sigma(p, {c, c}).state)).first;
        EXPECT_LT((covariance_summary(att).cov - covariance_summary(sig).cov).cwiseAbs().maxCoeff(), 1e-8)
            << l << " " << e << " " << T;
        EXPECT_LT((att.matrix() - sig.matrix()).cwiseAbs().maxCoeff(), 1e-7);
        EXPECT_LE(attenuated_sigma_params(p).eta_prime, e + 1e-15);
      }
    }
  }
}

TEST(state_prep_thermal, reference_point) {
  auto p = params(0.4, 0.8, 0.8);
  auto th = thermal_params(p);
  EXPECT_NEAR(std::tanh(2 * th.s), 0.12830, 5e-6);
  EXPECT_NEAR(th.nbar, 0.0052014, 1e-7);
  EXPECT_NEAR(thermal_nbar_approx(p), 0.005228, 1e-6);
  EXPECT_NEAR(thermal_nbar_approx(p) / th.nbar, 1.0, 0.01);
}

TEST(state_prep_thermal, nbar_matches_symplectic_eigenvalue) {
  for (double e : {0.3, 0.6, 0.9}) {
    auto p = params(0.5, e, 0.7);
    auto ap = attenuated_sigma_params(p);
    const double n2 = ap.nu * ap.nu;
    const double a = ap.eta_prime * (1 + n2) / (1 - n2) + 1 - ap.eta_prime;
    const double c = ap.eta_prime * 2 * ap.nu / (1 - n2);
    EXPECT_NEAR(thermal_params(p).nbar, 0.5 * (std::sqrt(a * a - c * c) - 1), 1e-13);
  }
}

TEST(state_prep_thermal, lossless_has_no_noise) {
  EXPECT_EQ(thermal_params(params(0.4, 1.0, 0.8)).nbar, 0.0);
}

TEST(state_prep_thermal, squeezed_thermal_reproduces_sigma) {
  auto p = params(0.4, 0.8, 0.8);
  auto th = thermal_params(p);
  auto a = normalize(make_squeezed_thermal(th.s, th.nbar, {12, 12})).first;
  auto b = normalize(as_density(make_sigma(p, {12, 12}).state)).first;
  EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(state_prep_thermal, reduced_noise_below_full_noise) {
  for (double l : {0.3, 0.6}) {
    for (double e = 0.05; e < 1.0; e += 0.05) {
      for (double T : {0.6, 0.8, 0.9}) {
        auto p = params(l, e, T);
        EXPECT_LE(reduced_noise_params(p).nbar_prime, thermal_params(p).nbar + 1e-15) << l << " " << e << " " << T;
      }
    }
  }
}

TEST(state_prep_thermal, reduced_noise_covariance) {
  // TMSV(nu') through eta keeps the squeezing of the ancilla and carries nbar' noise.
  auto p = params(0.4, 0.8, 0.8);
  auto rn = reduced_noise_params(p);
  auto rho = normalize(as_density(make_sigma(p, {24, 24}, SigmaFamily::kReducedNoise).state)).first;
  auto cov = covariance_summary(rho).cov;
  const double a = cov(0, 0);
  const double c = cov(0, 2);
  EXPECT_NEAR(c / a, std::tanh(2 * thermal_params(p).s), 1e-10);
  EXPECT_NEAR(std::sqrt(a * a - c * c), 2 * rn.nbar_prime + 1, 1e-10);
}

TEST(state_prep_params, validation) {
  EXPECT_THROW(params(1.0, 1.0, 0.8).validate(), std::invalid_argument);
  EXPECT_THROW(params(0.4, 0.0, 0.8).validate(), std::invalid_argument);
  EXPECT_THROW(params(0.4, 1.0, 1.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(params(0.4, 1.0, 0.8).validate());
  EXPECT_FALSE(params(0.7, 1.0, 0.8).convergent_regime());
  EXPECT_FALSE(params(0.4, 1.0, 0.8).warnings().size() > 0);
  EXPECT_FALSE(params(0.4, 1.0, 0.8, 30.0).kappa_within_bound());
}
