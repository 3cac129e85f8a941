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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvdistill/state_prep.hpp"

namespace cvdistill {

namespace {

using Ops = std::vector<std::pair<int, Eigen::MatrixXcd>>;

void require_two_modes(int modes, const char* what) {
  if (modes != 2) throw std::invalid_argument(std::string(what) + ": expected a two-mode state");
}

Eigen::MatrixXcd lower(const FockLayout& layout, int mode, int power) {
  const Eigen::MatrixXcd a = annihilation_matrix(layout.cutoff(mode));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  for (int k = 0; k < power; ++k) out = a * out;
  return out;
}

// Tr[L rho R^dag] for products L, R of single-mode operators; state normalized.
class MomentEvaluator {
 public:
  explicit MomentEvaluator(const AnyState& state) : state_(state) {
    if (const auto* psi = std::get_if<FockState>(&state_)) {
      layout_ = psi->layout();
      scale_ = psi->squared_norm();
    } else {
      const auto& rho = std::get<DensityOperator>(state_);
      layout_ = rho.layout();
      scale_ = rho.trace();
    }
    if (!(scale_ > 0.0)) throw std::invalid_argument("moments of a zero state");
  }

  const FockLayout& layout() const { return layout_; }

  Complex operator()(const Ops& left, const Ops& right) const {
    if (const auto* psi = std::get_if<FockState>(&state_)) {
      FockState l = *psi;
      for (const auto& [m, op] : left) l = apply_mode_operator(l, m, op);
      FockState r = *psi;
      for (const auto& [m, op] : right) r = apply_mode_operator(r, m, op);
      return r.amplitudes().dot(l.amplitudes()) / scale_;
    }
    // Tr[L rho R^dag] = Tr[O rho] with O = R^dag L, a product of per-mode factors.
    const auto& rho = std::get<DensityOperator>(state_);
    std::vector<Eigen::MatrixXcd> o(static_cast<std::size_t>(layout_.num_modes()));
    auto factor = [&](int m) -> Eigen::MatrixXcd& {
      if (o[m].size() == 0) {
        o[m] = Eigen::MatrixXcd::Identity(layout_.levels(m), layout_.levels(m));
      }
      return o[m];
    };
    for (const auto& [m, op] : left) factor(m) = op * factor(m);
    for (const auto& [m, op] : right) factor(m) = op.adjoint() * factor(m);
    const auto d = static_cast<Eigen::Index>(layout_.dim());
    const auto& r = rho.matrix();
    Complex sum{};
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        Complex w(1.0, 0.0);
        bool other_equal = true;
        for (int m = 0; m < layout_.num_modes() && other_equal; ++m) {
          const int a = layout_.occupation(static_cast<std::size_t>(i), m);
          const int b = layout_.occupation(static_cast<std::size_t>(j), m);
          if (o[m].size() == 0) {
            other_equal = a == b;
          } else {
            w *= o[m](a, b);
          }
        }
        if (other_equal && w != Complex{}) sum += w * r(j, i);
      }
    }
    return sum / scale_;
  }

 private:
  const AnyState& state_;
  FockLayout layout_;
  double scale_ = 1.0;
};

Eigen::MatrixXd symplectic_form(int modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

// Positive square root of a Hermitian PSD matrix; small negative eigenvalues clipped.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double CovarianceSummary::uncertainty_margin() const {
  Eigen::MatrixXcd m = cov.cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(2).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::Vector2d CovarianceSummary::symplectic_eigenvalues() const {
  Eigen::MatrixXcd m = Complex(0.0, 1.0) * symplectic_form(2).cast<Complex>() * cov.cast<Complex>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<double> w;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) w.push_back(std::abs(es.eigenvalues()[k].real()));
  std::sort(w.begin(), w.end());
  // Eigenvalues come in +/- pairs.
  return Eigen::Vector2d(0.5 * (w[0] + w[1]), 0.5 * (w[2] + w[3]));
}

CovarianceSummary covariance_summary(const AnyState& state) {
  MomentEvaluator m(state);
  require_two_modes(m.layout().num_modes(), "covariance_summary");
  const double r = 1.0 / std::sqrt(2.0);
  // R = alpha a + conj(alpha) a^dag for x and p.
  const Complex alpha[2] = {Complex(r, 0.0), Complex(0.0, -r)};

  Complex a1[2];
  Complex a2[2];
  double n[2];
  for (int k = 0; k < 2; ++k) {
    a1[k] = m({{k, lower(m.layout(), k, 1)}}, {});
    a2[k] = m({{k, lower(m.layout(), k, 2)}}, {});
    n[k] = m({{k, lower(m.layout(), k, 1)}}, {{k, lower(m.layout(), k, 1)}}).real();
  }
  const Complex ab = m({{0, lower(m.layout(), 0, 1)}, {1, lower(m.layout(), 1, 1)}}, {});
  // <a_B^dag a_A> = Tr[a_A rho a_B^dag]
  const Complex bdag_a = m({{0, lower(m.layout(), 0, 1)}}, {{1, lower(m.layout(), 1, 1)}});

  CovarianceSummary out;
  for (int i = 0; i < 4; ++i) out.mean[i] = 2.0 * (alpha[i % 2] * a1[i / 2]).real();
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const Complex ai = alpha[i % 2];
      const Complex aj = alpha[j % 2];
      double sym = 0.0;
      const int mi = i / 2;
      const int mj = j / 2;
      if (mi == mj) {
        sym = 4.0 * (ai * aj * a2[mi]).real() + 2.0 * (ai * std::conj(aj)).real() * (2.0 * n[mi] + 1.0);
      } else {
        // i on mode A, j on mode B.
        sym = 4.0 * (ai * aj * ab + ai * std::conj(aj) * bdag_a).real();
      }
      out.cov(i, j) = sym - 2.0 * out.mean[i] * out.mean[j];
      out.cov(j, i) = out.cov(i, j);
    }
  }
  return out;
}

CovarianceSummary covariance_summary(const FockState& state) { return covariance_summary(AnyState(state)); }
CovarianceSummary covariance_summary(const DensityOperator& rho) { return covariance_summary(AnyState(rho)); }

SqueezingVariances squeezing_variances(const AnyState& state) {
  const CovarianceSummary c = covariance_summary(state);
  return {0.5 * (c.cov(0, 0) + c.cov(2, 2) - 2.0 * c.cov(0, 2)), 0.5 * (c.cov(1, 1) + c.cov(3, 3) + 2.0 * c.cov(1, 3))};
}

double squeezing_variance(const AnyState& state) { return squeezing_variances(state).x_minus; }

double entropy_of_distribution(std::vector<double> p) {
  double total = 0.0;
  for (double x : p) total += std::max(x, 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("entropy of an empty distribution");
  double e = 0.0;
  for (double x : p) {
    const double q = x / total;
    if (q > 1e-14) e -= q * std::log(q);
  }
  return e;
}

double schmidt_entropy(const std::vector<double>& amplitudes) {
  std::vector<double> p;
  p.reserve(amplitudes.size());
  for (double c : amplitudes) p.push_back(c * c);
  return entropy_of_distribution(std::move(p));
}

double entanglement_entropy(const AnyState& state) {
  if (const auto* psi = std::get_if<FockState>(&state)) {
    require_two_modes(psi->num_modes(), "entanglement_entropy");
    const int ra = psi->layout().levels(0);
    const int rb = psi->layout().levels(1);
    // Row-major flattening with mode 0 slowest.
    Eigen::MatrixXcd amp(ra, rb);
    for (int i = 0; i < ra; ++i) {
      for (int j = 0; j < rb; ++j) amp(i, j) = psi->amplitudes()[i * rb + j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(amp);
    std::vector<double> p;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) p.push_back(std::pow(svd.singularValues()[k], 2));
    return entropy_of_distribution(std::move(p));
  }
  const auto& rho = std::get<DensityOperator>(state);
  require_two_modes(rho.num_modes(), "entanglement_entropy");
  const DensityOperator ra = partial_trace(rho, {0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (ra.matrix() + ra.matrix().adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return entropy_of_distribution(std::move(p));
}

double fidelity_with_tmsv(const AnyState& state, double omega) {
  const Cutoffs cut = std::visit([](const auto& s) { return s.cutoffs(); }, state);
  require_two_modes(static_cast<int>(cut.size()), "fidelity_with_tmsv");
  const Eigen::VectorXcd ref = make_tmsv(omega, cut).amplitudes();
  if (const auto* psi = std::get_if<FockState>(&state)) {
    return std::norm(ref.dot(psi->amplitudes())) / psi->squared_norm();
  }
  const auto& rho = std::get<DensityOperator>(state);
  return (ref.adjoint() * rho.matrix() * ref)(0, 0).real() / rho.trace();
}

double uhlmann_fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument("uhlmann_fidelity: layouts differ");
  const Eigen::MatrixXcd sa = psd_sqrt(a.matrix());
  const Eigen::MatrixXcd inner = sa * b.matrix() * sa;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

double gaussianity_residual(const AnyState& state) {
  const CovarianceSummary c = covariance_summary(state);
  const Eigen::Matrix4d& g = c.cov;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  const double tol = 1e-7 * scale;
  const double a = g(0, 0);
  const double cc = g(0, 2);
  Eigen::Matrix4d standard;
  standard << a, 0, cc, 0, 0, a, 0, -cc, cc, 0, a, 0, 0, -cc, 0, a;
  if ((g - standard).cwiseAbs().maxCoeff() > tol || c.mean.cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("gaussianity_residual: state is not in symmetric standard form with zero mean");
  }
  const double nu = std::sqrt(std::max(a * a - cc * cc, 1.0));
  const double nbar = 0.5 * (nu - 1.0);
  const double s = 0.5 * std::atanh(cc / a);

  const Cutoffs cut = std::visit([](const auto& st) { return st.cutoffs(); }, state);
  double fid = 0.0;
  if (nbar < 1e-13) {
    fid = fidelity_with_tmsv(state, std::tanh(s));
  } else {
    if (const auto* psi = std::get_if<FockState>(&state)) {
      const Ensemble ref = squeezed_thermal_ensemble(s, nbar, cut);
      for (std::size_t k = 0; k < ref.members.size(); ++k) {
        fid += ref.weights[k] * std::norm(ref.members[k].amplitudes().dot(psi->amplitudes()));
      }
      fid /= psi->squared_norm();
    } else {
      const auto& rho = std::get<DensityOperator>(state);
      fid = uhlmann_fidelity(DensityOperator(cut, rho.matrix() / rho.trace()), make_squeezed_thermal(s, nbar, cut));
    }
  }
  return std::max(0.0, 1.0 - fid);
}

double trace_distance(const AnyState& a, const AnyState& b) {
  const auto* pa = std::get_if<FockState>(&a);
  const auto* pb = std::get_if<FockState>(&b);
  if (pa != nullptr && pb != nullptr) {
    if (!(pa->layout() == pb->layout())) throw std::invalid_argument("trace_distance: layouts differ");
    const double f = std::norm(pa->amplitudes().dot(pb->amplitudes())) / (pa->squared_norm() * pb->squared_norm());
    return std::sqrt(std::max(0.0, 1.0 - f));
  }
  const DensityOperator ra = as_density(a);
  const DensityOperator rb = as_density(b);
  if (!(ra.layout() == rb.layout())) throw std::invalid_argument("trace_distance: layouts differ");
  const Eigen::MatrixXcd d = ra.matrix() / ra.trace() - rb.matrix() / rb.trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace cvdistill
