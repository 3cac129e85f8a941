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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCore>

#include "cvdistill/error.hpp"
#include "cvdistill/measures.hpp"

namespace cvdistill {

namespace {

constexpr double kBalanced = std::numbers::pi / 4.0;

double weight(const FockState& s) { return s.squared_norm(); }
double weight(const DensityOperator& r) { return r.trace(); }

FockState scaled(const FockState& s, double f) {
  return FockState(s.cutoffs(), s.amplitudes() * f, s.norm_deficit() * f * f, s.post_selected());
}
DensityOperator scaled(const DensityOperator& r, double f) {
  return DensityOperator(r.cutoffs(), r.matrix() * (f * f), r.trace_deficit() * f * f, r.post_selected());
}

double deficit_of(const FockState& s) { return s.norm_deficit(); }
double deficit_of(const DensityOperator& r) { return r.trace_deficit(); }

// Heralded ancilla: every mode post-selected, tail mass irrelevant.
FockState as_ancilla(const FockState& s, const Cutoffs& cutoffs) {
  FockState t = s;
  for (int m = 0; m < t.num_modes(); ++m) t = mark_post_selected(t, m);
  t = truncate(t, cutoffs);
  return FockState(t.cutoffs(), t.amplitudes(), 0.0, t.post_selected());
}
DensityOperator as_ancilla(const DensityOperator& r, const Cutoffs& cutoffs) {
  DensityOperator t = r;
  for (int m = 0; m < t.num_modes(); ++m) t = mark_post_selected(t, m);
  t = truncate(t, cutoffs);
  return DensityOperator(t.cutoffs(), t.matrix(), 0.0, t.post_selected());
}

std::string describe(double p) { return std::to_string(p); }

template <typename S>
HeraldedResult finish(const S& unnormalized, int cutoff, double probability, std::vector<HeraldOutcome> pattern,
                      const SchemeOptions& opt, const char* scheme) {
  if (!(probability >= opt.herald_floor) || !(probability > 0.0)) {
    throw HeraldImpossibleError(std::string(scheme) + ": herald probability " + describe(probability) +
                                    " is below the floor",
                                probability);
  }
  const S t = truncate(unnormalized, Cutoffs{cutoff, cutoff});
  auto [n, r] = normalize(t);
  (void)r;
  const double d = deficit_of(n);
  if (d > opt.max_norm_deficit) {
    throw CutoffTooSmallError(std::string(scheme) + ": norm deficit " + describe(d) + " exceeds " +
                                  describe(opt.max_norm_deficit) + "; raise the cutoff",
                              d);
  }
  return HeraldedResult{std::move(n), probability, d, std::move(pattern)};
}

template <typename S>
S subtract_operator(const S& state, int mode, double T, int m) {
  S s = state;
  for (int k = 0; k < m; ++k) s = apply_annihilation(s, mode);
  s = apply_exponential_number(s, mode, T);
  return scaled(s, std::pow(1.0 - T, 0.5 * m) / std::sqrt(std::tgamma(m + 1.0)));
}

FockState with_vacuum_ancilla(const FockState& s, int anc_cutoff) {
  return tensor_product(s, mark_post_selected(FockState::vacuum({anc_cutoff}), 0));
}
DensityOperator with_vacuum_ancilla(const DensityOperator& r, int anc_cutoff) {
  return tensor_product(r, DensityOperator::from_pure(mark_post_selected(FockState::vacuum({anc_cutoff}), 0)));
}

template <typename S>
S subtract_circuit(const S& state, int mode, double T, int m) {
  const int anc = state.num_modes();
  S s = with_vacuum_ancilla(state, m);
  s = apply_beam_splitter(s, mode, anc, std::acos(std::sqrt(T)));
  return slice_mode(s, anc, m);
}

// The simplified circuit for one pure (rho, ancilla) pair. Modes A1 B1 C1 D1 C2 D2.
FockState simplified_kernel(const FockState& psi, const FockState& phi, double theta) {
  FockState s = tensor_product(psi, as_ancilla(FockState::vacuum({2, 2}), {2, 2}));
  s = tensor_product(s, phi);
  s = apply_beam_splitter(s, 0, 2, theta);
  s = apply_beam_splitter(s, 1, 3, theta);
  s = apply_beam_splitter(s, 2, 4, -kBalanced);
  s = apply_beam_splitter(s, 3, 5, -kBalanced);
  for (int k = 0; k < 4; ++k) s = slice_mode(s, 2, 1);
  return s;
}

std::vector<HeraldOutcome> single_photon_heralds(std::initializer_list<const char*> names) {
  std::vector<HeraldOutcome> out;
  for (const char* n : names) out.push_back({n, 1});
  return out;
}

struct PureEnsemble {
  std::vector<double> weights;
  std::vector<FockState> members;
  double extra_deficit = 0.0;
};

PureEnsemble to_ensemble(const AnyState& s) {
  if (const auto* psi = std::get_if<FockState>(&s)) return {{1.0}, {*psi}, 0.0};
  const auto& rho = std::get<DensityOperator>(s);
  Ensemble e = spectral_ensemble(rho);
  return {std::move(e.weights), std::move(e.members), rho.trace_deficit() + e.dropped_weight};
}

// ---------------------------------------------------------------------------
// Gaussification merge. For inputs psi (on A1,B1) and phi (on A2,B2) the
// vacuum-heralded output amplitude is
//   o(na, nb) = sum w(na, x) w(nb, y) psi(x, y) phi(na - x, nb - y)
// with w(n, x) = <n,0| U |x, n-x>.

struct MergeTable {
  std::vector<std::vector<double>> w;  // w[n][x]
};

MergeTable merge_table(int max_total) {
  MergeTable t;
  t.w.resize(max_total + 1);
  for (int n = 0; n <= max_total; ++n) {
    const Eigen::MatrixXd block = beam_splitter_block(kBalanced, n);
    t.w[n].resize(n + 1);
    for (int x = 0; x <= n; ++x) t.w[n][x] = block(n, x);
  }
  return t;
}

struct SparseAmp {
  int a;
  int b;
  Complex v;
};

std::vector<SparseAmp> sparse_amplitudes(const FockState& s) {
  std::vector<SparseAmp> out;
  const double top = s.amplitudes().cwiseAbs().maxCoeff();
  const int lb = s.layout().levels(1);
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    const Complex v = s.amplitudes()[i];
    if (std::abs(v) > 1e-15 * top) out.push_back({static_cast<int>(i / lb), static_cast<int>(i % lb), v});
  }
  return out;
}

// Full merged output on the (2ca+1) x (2cb+1) grid, flattened row-major.
Eigen::VectorXcd merge(const std::vector<SparseAmp>& psi, const std::vector<SparseAmp>& phi, const MergeTable& t,
                       int out_a, int out_b) {
  Eigen::VectorXcd o = Eigen::VectorXcd::Zero((out_a + 1) * (out_b + 1));
  for (const auto& p : psi) {
    for (const auto& q : phi) {
      const int na = p.a + q.a;
      const int nb = p.b + q.b;
      o[na * (out_b + 1) + nb] += t.w[na][p.a] * t.w[nb][p.b] * p.v * q.v;
    }
  }
  return o;
}

struct SplitOutput {
  Eigen::VectorXcd kept;
  double kept_mass = 0.0;
  double lost_mass = 0.0;
};

SplitOutput split_merged(const Eigen::VectorXcd& o, int out_a, int out_b, int ca, int cb) {
  SplitOutput s;
  s.kept = Eigen::VectorXcd::Zero((ca + 1) * (cb + 1));
  for (int na = 0; na <= out_a; ++na) {
    for (int nb = 0; nb <= out_b; ++nb) {
      const Complex v = o[na * (out_b + 1) + nb];
      if (na <= ca && nb <= cb) {
        s.kept[na * (cb + 1) + nb] = v;
        s.kept_mass += std::norm(v);
      } else {
        s.lost_mass += std::norm(v);
      }
    }
  }
  return s;
}

double mean_photons_a(const AnyState& s) {
  if (const auto* psi = std::get_if<FockState>(&s)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < psi->dim(); ++i) {
      acc += psi->layout().occupation(i, 0) * std::norm(psi->amplitudes()[static_cast<Eigen::Index>(i)]);
    }
    return acc / psi->squared_norm();
  }
  const auto& rho = std::get<DensityOperator>(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc += rho.layout().occupation(i, 0) * rho.matrix()(k, k).real();
  }
  return acc / rho.trace();
}

double deficit_of_any(const AnyState& s) {
  return std::visit([](const auto& x) { return deficit_of(x); }, s);
}

// Kronecker product of two matrices with at most one nonzero per row.
Eigen::SparseMatrix<Complex> sparse_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == Complex{}) continue;
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        for (Eigen::Index l = 0; l < b.cols(); ++l) {
          if (b(k, l) != Complex{}) t.emplace_back(i * b.rows() + k, j * b.cols() + l, a(i, j) * b(k, l));
        }
      }
    }
  }
  Eigen::SparseMatrix<Complex> m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::MatrixXcd subtraction_matrix(int cutoff, double T, int m) {
  if (m < 0) throw std::invalid_argument("subtraction_matrix: m must be nonnegative");
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  const double pre = std::pow(1.0 - T, 0.5 * m) / std::sqrt(std::tgamma(m + 1.0));
  for (int n = m; n <= cutoff; ++n) {
    const double falling = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n - m + 1.0)));
    k(n - m, n) = pre * std::pow(T, 0.5 * (n - m)) * falling;
  }
  return k;
}

HeraldedResult photon_subtract(const AnyState& state, int mode, double T, int m, SubtractionPath path, double floor) {
  if (m < 0) throw std::invalid_argument("photon_subtract: m must be nonnegative");
  if (!(T > 0.0 && T <= 1.0)) throw std::invalid_argument("photon_subtract: T must lie in (0, 1]");
  return std::visit(
      [&](const auto& s) -> HeraldedResult {
        const double before = weight(s);
        if (!(before > 0.0)) throw std::invalid_argument("photon_subtract: zero input state");
        auto out = path == SubtractionPath::kOperator ? subtract_operator(s, mode, T, m) : subtract_circuit(s, mode, T, m);
        const double p = weight(out) / before;
        if (!(p >= floor) || !(p > 0.0)) {
          throw HeraldImpossibleError("photon_subtract: " + std::to_string(m) + "-photon herald has probability " +
                                          describe(p),
                                      p);
        }
        auto [n, r] = normalize(out);
        (void)r;
        const double d = deficit_of(n);
        return HeraldedResult{std::move(n), p, d, {{std::to_string(mode), m}}};
      },
      state);
}

HeraldedResult run_original_two_copy(const ProtocolParams& p, int cutoff, const SchemeOptions& opt) {
  p.validate();
  if (p.eta != 1.0) throw std::invalid_argument("run_original_two_copy: pure inputs only (eta = 1)");
  const int w = cutoff + 1;
  const FockState tmsv = make_tmsv(p.lambda, {w, w});
  AnyState s = tensor_product(tmsv, tmsv);  // A1 B1 A2 B2
  double prob = 1.0;
  for (int mode = 0; mode < 4; ++mode) {
    HeraldedResult r = photon_subtract(s, mode, p.T, 1, SubtractionPath::kCircuit, opt.herald_floor);
    prob *= r.probability;
    s = std::move(r.state);
  }
  FockState f = std::get<FockState>(s);
  f = mark_post_selected(mark_post_selected(f, 2), 3);
  f = apply_beam_splitter(f, 0, 2, kBalanced);
  f = apply_beam_splitter(f, 1, 3, kBalanced);
  for (int k = 0; k < 2; ++k) {
    HeraldedResult r = project_mode(f, 2, 0, opt.herald_floor);
    prob *= r.probability;
    f = r.pure();
  }
  std::vector<HeraldOutcome> pattern = single_photon_heralds({"C1", "D1", "C2", "D2"});
  pattern.push_back({"A2", 0});
  pattern.push_back({"B2", 0});
  return finish(f, cutoff, prob, std::move(pattern), opt, "run_original_two_copy");
}

AnyState simplified_circuit(const AnyState& rho, const AnyState& sigma, double T) {
  const double theta = std::acos(std::sqrt(T));
  const AnyState anc = std::visit([](const auto& s) -> AnyState { return as_ancilla(s, {2, 2}); }, sigma);
  const bool pure = std::holds_alternative<FockState>(rho) && std::holds_alternative<FockState>(anc);
  if (pure) return simplified_kernel(std::get<FockState>(rho), std::get<FockState>(anc), theta);

  const PureEnsemble re = to_ensemble(rho);
  const PureEnsemble se = to_ensemble(anc);
  const Cutoffs cut = std::visit([](const auto& s) { return s.cutoffs(); }, rho);
  const auto d = static_cast<Eigen::Index>(FockLayout(cut).dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  double deficit = re.extra_deficit;
  std::vector<Eigen::Index> nz;
  for (std::size_t i = 0; i < re.members.size(); ++i) {
    for (std::size_t j = 0; j < se.members.size(); ++j) {
      const FockState out = simplified_kernel(re.members[i], se.members[j], theta);
      const double w = re.weights[i] * se.weights[j];
      const Eigen::VectorXcd& v = out.amplitudes();
      nz.clear();
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (v[k] != Complex{}) nz.push_back(k);
      }
      for (Eigen::Index b : nz) {
        const Complex cb = w * std::conj(v[b]);
        for (Eigen::Index a : nz) acc(a, b) += v[a] * cb;
      }
      deficit += w * out.norm_deficit();
    }
  }
  return DensityOperator(cut, std::move(acc), deficit);
}

HeraldedResult run_simplified_two_copy(const ProtocolParams& p, int cutoff, SigmaFamily family,
                                       const SchemeOptions& opt) {
  p.validate();
  const int w = cutoff + 2;
  const AnyState rho = make_lossy_tmsv(p.lambda, p.eta, {w, w});
  const SigmaState sigma = make_sigma(p, {w, w}, family);
  const AnyState out = simplified_circuit(rho, sigma.state, p.T);
  const auto pattern = single_photon_heralds({"C1", "C2", "D1", "D2"});
  return std::visit(
      [&](const auto& s) { return finish(s, cutoff, weight(s), pattern, opt, "run_simplified_two_copy"); }, out);
}

DensityOperator rho_dist_formula(const DensityOperator& rho, const DensityOperator& sigma, double T) {
  if (rho.num_modes() != 2 || sigma.num_modes() != 2) throw std::invalid_argument("rho_dist_formula: two-mode inputs");
  if (sigma.layout().cutoff(0) < 2 || sigma.layout().cutoff(1) < 2) {
    throw std::invalid_argument("rho_dist_formula: ancilla cutoffs must be at least 2");
  }
  const int ca = rho.layout().cutoff(0);
  const int cb = rho.layout().cutoff(1);
  Eigen::MatrixXcd ka[2] = {subtraction_matrix(ca, T, 0), subtraction_matrix(ca, T, 2)};
  Eigen::MatrixXcd kb[2] = {subtraction_matrix(cb, T, 0), subtraction_matrix(cb, T, 2)};
  Eigen::SparseMatrix<Complex> left[2][2];
  Eigen::SparseMatrix<Complex> left_adj[2][2];
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      left[j][k] = sparse_kron(ka[j], kb[k]);
      left_adj[j][k] = left[j][k].adjoint();
    }
  }
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const Eigen::MatrixXcd lr = left[j][k] * rho.matrix();
      for (int l = 0; l < 2; ++l) {
        for (int m = 0; m < 2; ++m) {
          const Complex s = sigma.element({2 - 2 * j, 2 - 2 * k}, {2 - 2 * l, 2 - 2 * m});
          if (s == Complex{}) continue;
          const double sign = ((j + k + l + m) % 2 == 0) ? 1.0 : -1.0;
          acc += ((0.25 * sign) * s) * (lr * left_adj[l][m]);
        }
      }
    }
  }
  return DensityOperator(rho.cutoffs(), std::move(acc), rho.trace_deficit());
}

// ---------------------------------------------------------------------------

namespace {

// One step; *escaped receives the fraction of heralded mass pushed past the cutoff.
HeraldedResult gaussification_step_impl(const AnyState& rho, double floor, double* escaped) {
  const Cutoffs cut = std::visit([](const auto& s) { return s.cutoffs(); }, rho);
  if (cut.size() != 2) throw std::invalid_argument("gaussification_step: expected a two-mode state");
  const int ca = cut[0];
  const int cb = cut[1];
  const int oa = 2 * ca;
  const int ob = 2 * cb;
  const MergeTable table = merge_table(std::max(oa, ob));
  const std::vector<HeraldOutcome> pattern = {{"A2", 0}, {"B2", 0}};

  if (const auto* psi = std::get_if<FockState>(&rho)) {
    const double s2 = psi->squared_norm();
    const auto sp = sparse_amplitudes(*psi);
    const SplitOutput out = split_merged(merge(sp, sp, table, oa, ob), oa, ob, ca, cb);
    const double n = (out.kept_mass + out.lost_mass) / (s2 * s2);
    if (!(n >= floor) || !(n > 0.0)) {
      throw HeraldImpossibleError("gaussification_step: vacuum herald has probability " + describe(n), n);
    }
    // Amplitudes inside the cutoff only draw on amplitudes inside the cutoff,
    // so the input tail changes nothing here; the output tail is what escapes.
    const double deficit = out.lost_mass / (out.kept_mass + out.lost_mass);
    if (escaped) *escaped = deficit;
    FockState next(cut, out.kept / std::sqrt(out.kept_mass), deficit);
    return HeraldedResult{std::move(next), n, deficit, pattern};
  }

  const auto& r = std::get<DensityOperator>(rho);
  const double tr = r.trace();
  const Ensemble ens = spectral_ensemble(r);
  std::vector<std::vector<SparseAmp>> sparse;
  sparse.reserve(ens.members.size());
  for (const auto& m : ens.members) sparse.push_back(sparse_amplitudes(m));
  const double wmax = ens.weights.empty() ? 0.0 : ens.weights.front();
  const auto dim = static_cast<Eigen::Index>(FockLayout(cut).dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  double kept = 0.0;
  double lost = 0.0;
  double pruned = 0.0;
  std::vector<Eigen::Index> nz;
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    for (std::size_t j = i; j < sparse.size(); ++j) {
      // Swapping the copies leaves the merged output unchanged.
      const double w = ens.weights[i] * ens.weights[j] * (i == j ? 1.0 : 2.0);
      if (w < 1e-20 * wmax * wmax) {
        pruned += w;
        continue;
      }
      const SplitOutput out = split_merged(merge(sparse[i], sparse[j], table, oa, ob), oa, ob, ca, cb);
      // Outputs live in a few photon-difference sectors; skip the zeros.
      nz.clear();
      for (Eigen::Index k = 0; k < out.kept.size(); ++k) {
        if (out.kept[k] != Complex{}) nz.push_back(k);
      }
      for (Eigen::Index a : nz) {
        const Complex va = w * out.kept[a];
        for (Eigen::Index b : nz) acc(a, b) += va * std::conj(out.kept[b]);
      }
      kept += w * out.kept_mass;
      lost += w * out.lost_mass;
    }
  }
  const double n = (kept + lost) / (tr * tr);
  if (!(n >= floor) || !(n > 0.0)) {
    throw HeraldImpossibleError("gaussification_step: vacuum herald has probability " + describe(n), n);
  }
  // Pruned pairs and dropped ensemble weight do perturb the kept block.
  const double deficit = lost / (kept + lost) + (pruned + 2.0 * ens.dropped_weight * tr) / kept;
  if (escaped) *escaped = lost / (kept + lost);
  DensityOperator next(cut, acc / kept, deficit);
  return HeraldedResult{std::move(next), n, deficit, pattern};
}

}  // namespace

HeraldedResult gaussification_step(const AnyState& rho, double floor) {
  return gaussification_step_impl(rho, floor, nullptr);
}

GaussificationTrace iterate_gaussification(const AnyState& rho0, int max_iters, double tol,
                                           const GaussificationOptions& opt) {
  if (max_iters < 0) throw std::invalid_argument("iterate_gaussification: max_iters must be nonnegative");
  const Cutoffs cut = std::visit([](const auto& s) { return s.cutoffs(); }, rho0);
  const double photon_limit = 0.5 * *std::min_element(cut.begin(), cut.end());

  auto describe_state = [&](const AnyState& s, int it, double prob, double dist) {
    GaussificationRecord rec;
    rec.iteration = it;
    rec.probability = prob;
    rec.distance = dist;
    rec.norm_deficit = deficit_of_any(s) / std::visit([](const auto& x) { return weight(x); }, s);
    rec.mean_photons = mean_photons_a(s);
    rec.squeezing_variance = squeezing_variance(s);
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    if (opt.compute_residual) {
      try {
        rec.residual = gaussianity_residual(s);
      } catch (const std::invalid_argument&) {
      }
    }
    return rec;
  };

  GaussificationTrace trace{rho0, {}, {}, false, false};
  trace.records.push_back(describe_state(rho0, 0, 1.0, std::numeric_limits<double>::quiet_NaN()));
  if (opt.keep_iterates) trace.iterates.push_back(rho0);
  AnyState current = rho0;
  for (int it = 1; it <= max_iters; ++it) {
    std::optional<HeraldedResult> attempt;
    double escaped = 0.0;
    try {
      attempt = gaussification_step_impl(current, opt.herald_floor, &escaped);
    } catch (const HeraldImpossibleError&) {
      trace.diverged = true;
      break;
    }
    HeraldedResult& step = *attempt;
    const double dist = trace_distance(current, step.state);
    GaussificationRecord rec = describe_state(step.state, it, step.probability, dist);
    rec.escaped = escaped;
    trace.records.push_back(rec);
    current = std::move(step.state);
    if (opt.keep_iterates) trace.iterates.push_back(current);
    if (rec.escaped > opt.deficit_limit || rec.mean_photons > photon_limit || !std::isfinite(rec.mean_photons)) {
      trace.diverged = true;
      break;
    }
    if (dist < tol) {
      trace.converged = true;
      break;
    }
  }
  trace.final_state = current;
  return trace;
}

// ---------------------------------------------------------------------------

HeraldedResult run_generalized_subtraction(double lambda, double nu, double T, int cutoff, const SchemeOptions& opt) {
  if (!(std::abs(lambda) < 1.0) || !(std::abs(nu) < 1.0)) {
    throw std::invalid_argument("run_generalized_subtraction: |lambda| and |nu| must be < 1");
  }
  if (!(T > 0.0 && T < 1.0)) throw std::invalid_argument("run_generalized_subtraction: T must lie in (0, 1)");
  const int w = cutoff + 2;
  const double theta = std::acos(std::sqrt(T));
  FockState s = tensor_product(make_tmsv(lambda, {w, w}), as_ancilla(make_tmsv(nu, {w, w}), {w, w}));
  s = apply_beam_splitter(s, 0, 2, theta);
  s = apply_beam_splitter(s, 1, 3, theta);
  s = slice_mode(s, 2, 2);
  s = slice_mode(s, 2, 2);
  return finish(s, cutoff, s.squared_norm(), {{"C", 2}, {"D", 2}}, opt, "run_generalized_subtraction");
}

Eigen::MatrixXd multicopy_interferometer(int M) {
  if (M < 1) throw std::invalid_argument("multicopy_interferometer: M must be positive");
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(M, M);
  for (int j = 1; j < M; ++j) {
    const double theta = std::acos(std::sqrt(static_cast<double>(M - j) / (M - j + 1)));
    const Eigen::Matrix2d b = beam_splitter_mode_matrix(theta);
    // Splitter on (C_{j+1}, C_1): first index is the new mode.
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(M, M);
    g(j, j) = b(0, 0);
    g(j, 0) = b(0, 1);
    g(0, j) = b(1, 0);
    g(0, 0) = b(1, 1);
    v = v * g;
  }
  return v;
}

HeraldedResult run_multicopy(const ProtocolParams& p, int M, int cutoff, const SchemeOptions& opt) {
  p.validate();
  if (M < 2) throw std::invalid_argument("run_multicopy: M must be at least 2");
  if (p.eta != 1.0) throw std::invalid_argument("run_multicopy: pure inputs only (eta = 1)");
  const int w = cutoff + M;
  const double theta = p.theta();
  const double nu = (1.0 - p.T) * p.lambda;
  // A B C1 D1, then one (C_j, D_j) pair at a time.
  FockState s = tensor_product(make_tmsv(p.lambda, {w, w}), as_ancilla(FockState::vacuum({M, M}), {M, M}));
  s = apply_beam_splitter(s, 0, 2, theta);
  s = apply_beam_splitter(s, 1, 3, theta);
  std::vector<HeraldOutcome> pattern;
  for (int j = 1; j < M; ++j) {
    s = tensor_product(s, as_ancilla(make_tmsv(nu, {M, M}), {M, M}));
    const double tj = std::acos(std::sqrt(static_cast<double>(M - j) / (M - j + 1)));
    s = apply_beam_splitter(s, 4, 2, tj);
    s = apply_beam_splitter(s, 5, 3, tj);
    s = slice_mode(s, 4, 1);
    s = slice_mode(s, 4, 1);
    pattern.push_back({"C" + std::to_string(j + 1), 1});
    pattern.push_back({"D" + std::to_string(j + 1), 1});
  }
  s = slice_mode(s, 2, 1);
  s = slice_mode(s, 2, 1);
  pattern.insert(pattern.begin(), {{"C1", 1}, {"D1", 1}});
  return finish(s, cutoff, s.squared_norm(), std::move(pattern), opt, "run_multicopy");
}

double max_deviation_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_deviation_up_to_phase: size mismatch");
  const Complex overlap = b.dot(a);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace cvdistill
