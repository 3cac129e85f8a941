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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cvdistill {

namespace {

void require_two_modes(const Cutoffs& cutoffs, const char* what) {
  if (cutoffs.size() != 2) throw std::invalid_argument(std::string(what) + ": expected two cutoffs");
}

// sqrt(n! / (n-k)!) computed in log space.
double sqrt_falling(int n, int k) {
  if (k == 0) return 1.0;
  return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

Complex ProtocolParams::nu() const {
  const double base = std::sqrt(std::abs(kappa2)) * (1.0 - T) * lambda;
  return kappa2 >= 0.0 ? Complex(base, 0.0) : Complex(0.0, base);
}

double ProtocolParams::theta() const { return std::acos(std::sqrt(T)); }

bool ProtocolParams::convergent_regime() const { return std::abs(lambda_d()) < 1.0; }

bool ProtocolParams::kappa_within_bound() const {
  return std::sqrt(std::abs(kappa2)) <= 1.0 / (1.0 - T);
}

void ProtocolParams::validate() const {
  std::ostringstream err;
  if (!(std::abs(lambda) < 1.0)) err << "lambda must satisfy |lambda| < 1 (got " << lambda << "); ";
  if (!(T > 0.0 && T < 1.0)) err << "T must lie in (0, 1) (got " << T << "); ";
  if (!(eta > 0.0 && eta <= 1.0)) err << "eta must lie in (0, 1] (got " << eta << "); ";
  if (!std::isfinite(kappa2)) err << "kappa2 must be finite; ";
  if (M < 2) err << "M must be at least 2 (got " << M << "); ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("invalid protocol parameters: " + msg.substr(0, msg.size() - 2));
}

std::vector<std::string> ProtocolParams::warnings() const {
  std::vector<std::string> out;
  if (!convergent_regime()) out.emplace_back("|2 T lambda| >= 1: iterated Gaussification diverges");
  if (!kappa_within_bound()) out.emplace_back("|kappa| exceeds 1/(1-T): ancilla is more squeezed than the input");
  return out;
}

// ---------------------------------------------------------------------------

FockState make_tmsv(Complex lambda, const Cutoffs& cutoffs) {
  require_two_modes(cutoffs, "make_tmsv");
  if (!(std::abs(lambda) < 1.0)) throw std::invalid_argument("make_tmsv: |lambda| must be < 1");
  FockLayout layout(cutoffs);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
  const int c = std::min(cutoffs[0], cutoffs[1]);
  const double a0 = std::sqrt(1.0 - std::norm(lambda));
  Complex coeff = a0;
  for (int n = 0; n <= c; ++n) {
    const int occ[2] = {n, n};
    v[static_cast<Eigen::Index>(layout.index(occ))] = coeff;
    coeff *= lambda;
  }
  const double deficit = std::pow(std::norm(lambda), c + 1);
  return FockState(cutoffs, std::move(v), deficit);
}

Ensemble squeezed_thermal_ensemble(double s, double nbar, const Cutoffs& cutoffs) {
  require_two_modes(cutoffs, "make_squeezed_thermal");
  if (!(nbar >= 0.0)) throw std::invalid_argument("make_squeezed_thermal: nbar must be nonnegative");
  FockLayout layout(cutoffs);
  const int cw = std::max(cutoffs[0], cutoffs[1]);
  const double t = std::tanh(s);
  const double sech = 1.0 / std::cosh(s);
  const double ratio = nbar / (nbar + 1.0);

  Ensemble out;
  double deficit = 0.0;
  double kept_thermal = 0.0;
  for (int j = 0; j <= cw; ++j) {
    for (int k = 0; k <= cw; ++k) {
      const double w = std::pow(ratio, j + k) / ((nbar + 1.0) * (nbar + 1.0));
      if (w == 0.0) continue;
      kept_thermal += w;
      // S|j,k> = e^{t c^dag d^dag} sech^{nc+nd+1} e^{-t c d} |j,k>
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dim()));
      for (int m = 0; m <= std::min(j, k); ++m) {
        const double down = std::pow(-t, m) * std::exp(-std::lgamma(m + 1.0)) * sqrt_falling(j, m) * sqrt_falling(k, m);
        const int j1 = j - m;
        const int k1 = k - m;
        const double damp = std::pow(sech, j1 + k1 + 1);
        for (int p = 0;; ++p) {
          const int a = j1 + p;
          const int b = k1 + p;
          if (a > cutoffs[0] || b > cutoffs[1]) break;
          const double up = std::pow(t, p) * std::exp(-std::lgamma(p + 1.0)) * sqrt_falling(a, p) * sqrt_falling(b, p);
          const int occ[2] = {a, b};
          v[static_cast<Eigen::Index>(layout.index(occ))] += down * damp * up;
        }
      }
      deficit += w * std::max(0.0, 1.0 - v.squaredNorm());
      out.weights.push_back(w);
      out.members.emplace_back(cutoffs, std::move(v));
    }
  }
  deficit += std::max(0.0, 1.0 - kept_thermal);
  out.dropped_weight = deficit;
  return out;
}

DensityOperator make_squeezed_thermal(double s, double nbar, const Cutoffs& cutoffs) {
  const Ensemble ens = squeezed_thermal_ensemble(s, nbar, cutoffs);
  DensityOperator rho = mixture(ens.weights, ens.members);
  return DensityOperator(cutoffs, rho.matrix(), ens.dropped_weight);
}

std::vector<Eigen::MatrixXcd> loss_kraus_operators(int cutoff, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("loss channel: eta must lie in (0, 1]");
  std::vector<Eigen::MatrixXcd> ops;
  for (int k = 0; k <= cutoff; ++k) {
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    bool any = false;
    for (int n = k; n <= cutoff; ++n) {
      const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      const double amp = std::sqrt(binom) * std::pow(eta, 0.5 * (n - k)) * std::pow(1.0 - eta, 0.5 * k);
      l(n - k, n) = amp;
      any = any || amp != 0.0;
    }
    if (any) ops.push_back(std::move(l));
  }
  return ops;
}

DensityOperator apply_loss_channel(const DensityOperator& rho, int mode, double eta) {
  if (mode < 0 || mode >= rho.num_modes()) throw std::out_of_range("loss channel: mode out of range");
  const auto ops = loss_kraus_operators(rho.layout().cutoff(mode), eta);
  if (ops.size() == 1) return rho;
  // Kraus operator k only moves n to n - k, so each output element collects
  // one term per k from the diagonal strip of the input.
  const auto& layout = rho.layout();
  const int c = layout.cutoff(mode);
  const auto s = static_cast<Eigen::Index>(layout.stride(mode));
  const auto d = static_cast<Eigen::Index>(layout.dim());
  std::vector<int> occ(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) occ[i] = layout.occupation(static_cast<std::size_t>(i), mode);
  const Eigen::MatrixXcd& in = rho.matrix();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const int nj = occ[j];
    for (Eigen::Index i = 0; i < d; ++i) {
      const int ni = occ[i];
      Complex sum{};
      for (int k = 0; k < static_cast<int>(ops.size()) && ni + k <= c && nj + k <= c; ++k) {
        sum += ops[k](ni, ni + k).real() * ops[k](nj, nj + k).real() * in(i + k * s, j + k * s);
      }
      acc(i, j) = sum;
    }
  }
  return DensityOperator(rho.cutoffs(), std::move(acc), rho.trace_deficit(), rho.post_selected());
}

DensityOperator apply_loss_channel(const FockState& state, int mode, double eta) {
  return apply_loss_channel(DensityOperator::from_pure(state), mode, eta);
}

AnyState make_lossy_tmsv(Complex lambda, double eta, const Cutoffs& cutoffs) {
  FockState tmsv = make_tmsv(lambda, cutoffs);
  if (eta == 1.0) return tmsv;
  return apply_loss_channel(apply_loss_channel(tmsv, 0, eta), 1, eta);
}

// ---------------------------------------------------------------------------

AttenuatedSigmaParams attenuated_sigma_params(const ProtocolParams& p) {
  const double tp = 1.0 - p.eta * p.T;
  return {p.lambda * tp, p.eta * (1.0 - p.T) / tp};
}

double p_sigma(const ProtocolParams& p) {
  // Noiseless attenuation commutes with loss once the attenuation is moved
  // onto the pure TMSV with transmittance 1 - eta T.
  const double l2 = p.lambda * p.lambda;
  const double tp = 1.0 - p.eta * p.T;
  return (1.0 - l2) / (1.0 - l2 * tp * tp);
}

ThermalDecomposition thermal_params(const ProtocolParams& p) {
  const double l = p.lambda;
  const double e = p.eta;
  const double T = p.T;
  const double tanh2s = 2.0 * e * l * (1.0 - T) / (1.0 - l * l * (1.0 - 2.0 * e + e * e * (2.0 - T) * T));
  const double num = 1.0 - l * l * std::pow(1.0 - e * (2.0 - T), 2);
  const double den = 1.0 - l * l * std::pow(1.0 - e * T, 2);
  // A lossless input leaves a pure ancilla; keep the rounding out of nbar.
  const double nbar = e == 1.0 ? 0.0 : 0.5 * (std::sqrt(num / den) - 1.0);
  return {0.5 * std::atanh(tanh2s), nbar};
}

double thermal_nbar_approx(const ProtocolParams& p) {
  const double l2 = p.lambda * p.lambda;
  return p.eta * (1.0 - p.eta) * l2 * (1.0 - p.T) / (1.0 - l2 * std::pow(1.0 - p.eta * p.T, 2));
}

ReducedNoiseParams reduced_noise_params(const ProtocolParams& p) {
  const ThermalDecomposition th = thermal_params(p);
  const double t = std::tanh(2.0 * th.s);
  const double e = p.eta;
  if (t == 0.0) return {0.0, 0.0};
  if (e == 1.0) return {t / (1.0 + std::sqrt(1.0 - t * t)), 0.0};
  // Rationalized form; finite at eta = 1/2.
  const double nu_prime = t / (e + std::sqrt(e * e + (1.0 - 2.0 * e) * t * t));
  const double nbar_prime = 0.5 * (2.0 * e * nu_prime / ((1.0 - nu_prime * nu_prime) * std::sinh(2.0 * th.s)) - 1.0);
  return {nu_prime, nbar_prime};
}

SigmaState make_sigma(const ProtocolParams& p, const Cutoffs& cutoffs, SigmaFamily family) {
  p.validate();
  const double kappa = std::sqrt(std::abs(p.kappa2));
  const Complex phase = p.kappa2 >= 0.0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
  double base = 0.0;
  double loss = 1.0;
  if (family == SigmaFamily::kAttenuated) {
    const auto ap = attenuated_sigma_params(p);
    base = ap.nu;
    loss = ap.eta_prime;
  } else {
    base = reduced_noise_params(p).nu_prime;
    loss = p.eta;
  }
  const Complex squeezing = phase * kappa * base;
  return SigmaState{make_lossy_tmsv(squeezing, loss, cutoffs), p_sigma(p), squeezing, loss};
}

}  // namespace cvdistill
