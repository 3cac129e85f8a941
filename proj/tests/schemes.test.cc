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

#include "cvdistill/schemes.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "cvdistill/analytics.hpp"
#include "cvdistill/error.hpp"
#include "cvdistill/measures.hpp"

using namespace cvdistill;

namespace {

ProtocolParams params(double lambda, double T, double kappa2 = 1.0, double eta = 1.0) {
  ProtocolParams p;
  p.lambda = lambda;
  p.T = T;
  p.kappa2 = kappa2;
  p.eta = eta;
  return p;
}

// Unit vector with amplitudes c[n] on |n,n>, cutoff c.size() - 1.
Eigen::VectorXcd diagonal_vector(const std::vector<double>& c) {
  const int cut = static_cast<int>(c.size()) - 1;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero((cut + 1) * (cut + 1));
  for (int n = 0; n <= cut; ++n) v[n * (cut + 1) + n] = c[n];
  return v.normalized();
}

std::vector<double> poly_mu(int cut, double mu, double c0, double c1, double c2) {
  std::vector<double> c(cut + 1);
  for (int n = 0; n <= cut; ++n) c[n] = (c2 * n * n + c1 * n + c0) * std::pow(mu, n);
  return c;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(schemes_subtract, single_photon_both_modes) {
  auto a = photon_subtract(make_tmsv(0.4, {15, 15}), 0, 0.8, 1);
  auto b = photon_subtract(a.state, 1, 0.8, 1);
  auto want = diagonal_vector(poly_mu(14, 0.32, 1, 1, 0));
  EXPECT_LT(max_deviation_up_to_phase(truncate(b.pure(), {14, 14}).amplitudes().normalized(), want), 1e-12);
}

TEST(schemes_subtract, zero_photons_is_exponential_number) {
  auto s = make_tmsv(0.4, {10, 10});
  auto r = photon_subtract(s, 0, 0.7, 0);
  auto want = apply_exponential_number(s, 0, 0.7);
  EXPECT_NEAR(r.probability, want.squared_norm() / s.squared_norm(), 1e-14);
  EXPECT_LT(max_abs(r.pure().amplitudes() - want.amplitudes().normalized()), 1e-14);
}

TEST(schemes_subtract, circuit_matches_operator) {
  auto s = make_tmsv(0.4, {12, 12});
  for (int m : {0, 1, 2, 3}) {
    auto op = photon_subtract(s, 0, 0.8, m, SubtractionPath::kOperator);
    auto circ = photon_subtract(s, 0, 0.8, m, SubtractionPath::kCircuit);
    EXPECT_NEAR(op.probability, circ.probability, 1e-12) << m;
    EXPECT_LT(max_deviation_up_to_phase(op.pure().amplitudes(), circ.pure().amplitudes()), 1e-10) << m;
  }
  auto rho = as_density(make_lossy_tmsv(0.4, 0.8, {8, 8}));
  auto op = photon_subtract(rho, 1, 0.8, 1, SubtractionPath::kOperator);
  auto circ = photon_subtract(rho, 1, 0.8, 1, SubtractionPath::kCircuit);
  EXPECT_NEAR(op.probability, circ.probability, 1e-12);
  EXPECT_LT(max_abs(op.mixed().matrix() - circ.mixed().matrix()), 1e-10);
}

TEST(schemes_subtract, two_photons_one_mode) {
  const double l = 0.4, T = 0.8;
  auto r = photon_subtract(make_tmsv(l, {16, 16}), 0, T, 2);
  // |n, n+2> carries sqrt((n+1)(n+2)) T^{n/2} lambda^{n+2}
  for (int n = 0; n < 8; ++n) {
    const double want = std::sqrt((n + 1.0) * (n + 2.0)) * std::pow(T, 0.5 * n) * std::pow(l, n + 2);
    const double ref = std::sqrt(2.0) * l * l;
    EXPECT_NEAR(std::abs(r.pure().amplitude({n, n + 2}) / r.pure().amplitude({0, 2})), want / ref, 1e-12);
  }
}

TEST(schemes_subtract, impossible_on_vacuum) {
  EXPECT_THROW(photon_subtract(FockState::vacuum({4, 4}), 0, 0.8, 1), HeraldImpossibleError);
}

TEST(schemes_original, closed_form) {
  auto r = run_original_two_copy(params(0.4, 0.8), 14);
  EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), diagonal_vector(poly_mu(14, 0.32, 4, 3, 1))), 1e-8);
  EXPECT_NEAR(r.probability, p_success_original(0.4, 0.8), 1e-8 * r.probability);
  EXPECT_EQ(r.herald_pattern.size(), 6u);
}

TEST(schemes_original, no_photons_to_subtract) {
  EXPECT_THROW(run_original_two_copy(params(0.0, 0.8), 8), HeraldImpossibleError);
}

TEST(schemes_simplified, equivalence_grid) {
  for (double l : {0.2, 0.4, 0.6}) {
    for (double T : {0.6, 0.8, 0.9}) {
      auto p = params(l, T);
      const int c = l > 0.5 ? 34 : 18;
      auto a = run_original_two_copy(p, c);
      auto e = run_simplified_two_copy(p, c);
      EXPECT_LT(max_deviation_up_to_phase(a.pure().amplitudes(), e.pure().amplitudes()), 1e-8) << l << " " << T;
      EXPECT_NEAR(e.probability / a.probability, 1 / p_sigma(p), 1e-8 / p_sigma(p)) << l << " " << T;
    }
  }
}

TEST(schemes_simplified, vacuum_ancilla) {
  auto r = run_simplified_two_copy(params(0.4, 0.8, 0.0), 14);
  EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), diagonal_vector(poly_mu(14, 0.32, 2, 3, 1))), 1e-10);
}

TEST(schemes_simplified, variance_at_optimal_kappa) {
  auto roots = kappa_stationary_roots(0.32);
  auto r = run_simplified_two_copy(params(0.4, 0.8, roots.plus), 16);
  EXPECT_NEAR(squeezing_variance(r.state), v_dist(0.32, roots.plus), 1e-9);
  EXPECT_NEAR(squeezing_variance(r.state), 0.25501, 1e-5);
}

TEST(schemes_simplified, negative_kappa2) {
  auto r = run_simplified_two_copy(params(0.4, 0.8, -0.5), 14);
  auto psi = psi_out_prime(0.4, 0.8, -0.5, 14);
  EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), diagonal_vector(psi.coefficients)), 1e-10);
}

TEST(schemes_rho_dist, vacuum_ancilla_is_double_two_photon_subtraction) {
  const int c = 10;
  auto rho = as_density(make_lossy_tmsv(0.4, 0.8, {c, c}));
  auto sigma = DensityOperator::from_pure(FockState::vacuum({2, 2}));
  auto out = normalize(rho_dist_formula(rho, sigma, 0.8)).first;
  auto a = photon_subtract(rho, 0, 0.8, 2);
  auto b = photon_subtract(a.state, 1, 0.8, 2);
  EXPECT_LT(max_abs(out.matrix() - b.mixed().matrix()), 1e-12);
}

TEST(schemes_rho_dist, pure_inputs_match_closed_form) {
  const int c = 14, w = c + 2;
  auto p = params(0.4, 0.8);
  auto rho = DensityOperator::from_pure(make_tmsv(0.4, {w, w}));
  auto sigma = as_density(make_sigma(p, {w, w}).state);
  auto out = normalize(truncate(rho_dist_formula(rho, sigma, 0.8), {c, c})).first;
  auto v = diagonal_vector(poly_mu(c, 0.32, 4, 3, 1));
  EXPECT_LT(max_abs(out.matrix() - v * v.adjoint()), 1e-8);
}

TEST(schemes_rho_dist, matches_mixed_circuit) {
  const int c = 6, w = c + 2;
  for (double l : {0.2, 0.4}) {
    for (double e : {0.7, 0.9}) {
      for (double k2 : {0.5, 1.0}) {
        auto p = params(l, 0.8, k2, e);
        // Both sides see the same truncation, so the deficit guard is lifted.
        SchemeOptions opt;
        opt.max_norm_deficit = std::numeric_limits<double>::infinity();
        auto circ = run_simplified_two_copy(p, c, SigmaFamily::kAttenuated, opt);
        auto rho = as_density(make_lossy_tmsv(l, e, {w, w}));
        auto sigma = as_density(make_sigma(p, {w, w}).state);
        auto out = normalize(truncate(rho_dist_formula(rho, sigma, 0.8), {c, c})).first;
        EXPECT_LT(max_abs(out.matrix() - circ.mixed().matrix()), 1e-8) << l << " " << e << " " << k2;
      }
    }
  }
}

TEST(schemes_gaussification, tmsv_fixed_point) {
  for (double l : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    auto s = make_tmsv(l, {30, 30});
    auto r = gaussification_step(s);
    auto ref = truncate(s, r.pure().cutoffs());
    EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), ref.amplitudes().normalized()), 1e-9) << l;
  }
}

TEST(schemes_gaussification, vacuum_stable) {
  auto r = gaussification_step(FockState::vacuum({6, 6}));
  EXPECT_NEAR(r.probability, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(r.pure().amplitude({0, 0})), 1.0, 1e-14);
}

TEST(schemes_gaussification, pure_convergence) {
  auto a = photon_subtract(make_tmsv(0.4, {21, 21}), 0, 0.8, 1);
  auto b = photon_subtract(a.state, 1, 0.8, 1);
  auto start = truncate(b.pure(), {20, 20});
  auto trace = iterate_gaussification(start, 12, 1e-8);
  EXPECT_FALSE(trace.diverged);
  EXPECT_GT(fidelity_with_tmsv(trace.final_state, 0.64), 1 - 1e-6);
  for (std::size_t i = 2; i < trace.records.size(); ++i) {
    EXPECT_LT(trace.records[i].residual, trace.records[i - 1].residual + 1e-12);
  }
  // Successive iterates approach each other only geometrically.
  auto longer = iterate_gaussification(start, 40, 1e-8);
  EXPECT_TRUE(longer.converged);
  EXPECT_LT(longer.records.back().norm_deficit, 1e-7);
}

TEST(schemes_gaussification, diverges_above_threshold) {
  auto a = photon_subtract(make_tmsv(0.7, {15, 15}), 0, 0.8, 1);
  auto b = photon_subtract(a.state, 1, 0.8, 1);
  auto trace = iterate_gaussification(truncate(b.pure(), {14, 14}), 20, 1e-8);
  EXPECT_TRUE(trace.diverged);
  EXPECT_FALSE(trace.converged);
}

TEST(schemes_gaussification, zero_iterations_echo_input) {
  auto s = make_tmsv(0.3, {10, 10});
  auto trace = iterate_gaussification(s, 0, 1e-8);
  ASSERT_EQ(trace.records.size(), 1u);
  EXPECT_NEAR(trace.records[0].squeezing_variance, squeezing_variance(s), 1e-14);
}

TEST(schemes_generalized, vacuum_ancilla_pattern) {
  auto r = run_generalized_subtraction(0.4, 0.0, 0.8, 14);
  EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), diagonal_vector(poly_mu(14, 0.32, 2, 3, 1))), 1e-10);
}

TEST(schemes_generalized, closed_form) {
  for (double nu : {0.1, 0.4}) {
    auto r = run_generalized_subtraction(0.4, nu, 0.8, 14);
    auto want = diagonal_vector(generalized_subtraction_amplitudes(0.4, nu, 0.8, 14));
    EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), want), 1e-9) << nu;
  }
}

TEST(schemes_multicopy, interferometer_is_orthogonal) {
  for (int M : {2, 3, 5, 8}) {
    auto v = multicopy_interferometer(M);
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff(), 1e-14);
    for (int k = 0; k < M; ++k) EXPECT_NEAR(v(0, k), 1 / std::sqrt(static_cast<double>(M)), 1e-14);
  }
}

TEST(schemes_multicopy, matches_closed_form) {
  for (int M : {2, 3}) {
    auto r = run_multicopy(params(0.4, 0.8), M, 8);
    auto want = diagonal_vector(multicopy_amplitudes(0.4, 0.8, M, 8));
    EXPECT_LT(max_deviation_up_to_phase(r.pure().amplitudes(), want), 1e-8) << M;
  }
  auto two = run_multicopy(params(0.4, 0.8), 2, 8);
  EXPECT_LT(max_deviation_up_to_phase(two.pure().amplitudes(), diagonal_vector(poly_mu(8, 0.32, 4, 3, 1))), 1e-8);
  EXPECT_THROW(run_multicopy(params(0.4, 0.8), 1, 8), std::invalid_argument);
}

TEST(schemes_phase, deviation_ignores_global_phase) {
  Eigen::VectorXcd a(2);
  a << 0.6, 0.8;
  EXPECT_NEAR(max_deviation_up_to_phase(a, a * std::polar(1.0, 2.0)), 0.0, 1e-15);
  Eigen::VectorXcd b(2);
  b << 0.8, 0.6;
  EXPECT_NEAR(max_deviation_up_to_phase(a, b), 0.2, 1e-15);
}
