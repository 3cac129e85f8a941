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

#include "cvdistill/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cvdistill/analytics.hpp"
#include "cvdistill/cli/commands.hpp"
#include "cvdistill/cli/config.hpp"
#include "cvdistill/measures.hpp"
#include "cvdistill/schemes.hpp"
#include "cvdistill/state_prep.hpp"

namespace cvdistill::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Ctx {
  const VerifyOptions& opt;
  int cutoff(int d) const { return opt.cutoff.value_or(d); }
  double tol(double d) const { return opt.tol.value_or(d); }
};

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

Eigen::VectorXcd diagonal_vector(const std::vector<double>& c, int cutoff) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero((cutoff + 1) * (cutoff + 1));
  for (int n = 0; n <= cutoff && n < static_cast<int>(c.size()); ++n) v[n * (cutoff + 1) + n] = c[static_cast<std::size_t>(n)];
  return v;
}

Eigen::VectorXcd unit(Eigen::VectorXcd v) { return v / v.norm(); }

double projector_deviation(const DensityOperator& rho, const Eigen::VectorXcd& v) {
  return (rho.matrix() - v * v.adjoint()).cwiseAbs().maxCoeff();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FockState subtracted_pure(double lambda, double T, int cutoff) {
  const FockState t = make_tmsv(lambda, {cutoff, cutoff});
  const HeraldedResult a = photon_subtract(t, 0, T, 1);
  return photon_subtract(a.state, 1, T, 1).pure();
}

// 1 -------------------------------------------------------------------------
Outcome check_scheme_equivalence(const Ctx& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  ProtocolParams p;
  const int c = ctx.cutoff(14);
  const double tol = ctx.tol(1e-8);
  const HeraldedResult orig = run_original_two_copy(p, c);
  const HeraldedResult simp = run_simplified_two_copy(p, c);
  const int w = c + 2;
  const DensityOperator rho = DensityOperator::from_pure(make_tmsv(p.lambda, {w, w}));
  const DensityOperator sigma = as_density(make_sigma(p, {w, w}).state);
  const DensityOperator kraus = normalize(truncate(rho_dist_formula(rho, sigma, p.T), {c, c})).first;
  const Eigen::VectorXcd closed = unit(diagonal_vector(psi_out_prime(p.lambda, p.T, 1.0, c).coefficients, c));

  const Eigen::VectorXcd& a = orig.pure().amplitudes();
  const Eigen::VectorXcd& e = simp.pure().amplitudes();
  const double dev = std::max({max_deviation_up_to_phase(a, e), max_deviation_up_to_phase(a, closed),
                               max_deviation_up_to_phase(e, closed), projector_deviation(kraus, a),
                               projector_deviation(kraus, e), projector_deviation(kraus, closed)});
  const double ratio = simp.probability / orig.probability;
  const double ps = p_sigma(p);
  const double secs = seconds_since(t0);
  o.detail << "max pairwise deviation " << g(dev) << ", p_e/p_a " << ratio << " vs 1/P_sigma " << 1.0 / ps
           << ", P_sigma " << ps << ", " << g(secs) << " s; ";
  o.require(dev < tol, "pairwise deviation < " + g(tol));
  o.require(std::abs(ratio - 1.0 / ps) < tol, "probability ratio within " + g(tol));
  o.require(std::abs(ps - 0.845411) < 5e-7, "P_sigma = 0.845411");
  o.require(secs < 5.0, "runtime < 5 s");
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome check_gaussification(const Ctx& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  const int c = ctx.cutoff(20);
  const double gap = ctx.tol(1e-6);
  const FockState start = subtracted_pure(0.4, 0.8, c);
  GaussificationOptions go;
  const GaussificationTrace tr = iterate_gaussification(start, 12, 0.0, go);
  int reached = -1;
  double best = 0.0;
  for (std::size_t k = 0; k < tr.iterates.size(); ++k) {
    const double f = fidelity_with_tmsv(tr.iterates[k], 0.64);
    best = std::max(best, f);
    if (reached < 0 && f > 1.0 - gap) reached = static_cast<int>(k);
  }
  bool decreasing = true;
  for (std::size_t k = 2; k + 1 < tr.records.size(); ++k) {
    decreasing = decreasing && tr.records[k + 1].residual < tr.records[k].residual;
  }
  const double secs = seconds_since(t0);
  o.detail << "1-F reaches " << g(1.0 - best) << (reached >= 0 ? " (below target at iteration " + std::to_string(reached) + ")" : "")
           << ", final residual " << g(tr.records.back().residual) << ", " << g(secs) << " s; ";
  o.require(!tr.diverged, "no divergence");
  o.require(reached >= 0 && reached <= 12, "fidelity > 1-" + g(gap) + " within 12 iterations");
  o.require(decreasing, "residual strictly decreasing after iteration 2");
  o.require(secs < 30.0, "runtime < 30 s");
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome check_mixed_asymptotics(const Ctx& ctx) {
  Outcome o;
  const int c = ctx.cutoff(18);
  const double tol = ctx.tol(1e-4);
  const double l = 0.4, e = 0.8, T = 0.8;
  const AnyState input = make_lossy_tmsv(l, e, {c, c});
  const HeraldedResult a = photon_subtract(input, 0, T, 1);
  const HeraldedResult b = photon_subtract(a.state, 1, T, 1);
  GaussificationOptions go;
  go.compute_residual = false;
  go.keep_iterates = false;
  const GaussificationTrace tr = iterate_gaussification(b.state, 40, 2e-5, go);
  const double v = tr.records.back().squeezing_variance;
  const double vinf = v_inf_mixed(l, e, T);
  o.detail << "V after " << tr.records.back().iteration << " iterations " << v << " vs " << vinf
           << " (deficit " << g(tr.records.back().norm_deficit) << "); ";
  o.require(tr.converged && !tr.diverged, "iteration converged");
  o.require(std::abs(v - vinf) < tol, "|V - V_inf| < " + g(tol));
  o.require(std::abs(vinf - 0.39238) < 5e-6, "V_inf = 0.39238");

  // Lower bound across the fig7 panels and a dense (lambda, eta) grid at T = 0.8.
  Fig7Options f7;
  std::vector<std::pair<double, double>> grid = f7.panels;
  for (int i = 1; i <= 12; ++i) {
    for (int j = 1; j <= 20; ++j) grid.emplace_back(0.05 * i, 0.05 * j);
  }
  double worst = 1e300;
  for (const auto& [gl, ge] : grid) {
    const MixedMetrics m = mixed_metrics(gl, ge, f7.T);
    worst = std::min(worst, m.v_inf - m.bound);
  }
  o.detail << "min(V_inf - (1 - eta~)) over " << grid.size() << " points " << g(worst) << "; ";
  o.require(worst >= 0.0, "V_inf >= 1 - eta~ on the grid");
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome check_stationarity(const Ctx& ctx) {
  Outcome o;
  const double mu = 0.32;
  const double tol = ctx.tol(1e-6);
  const StationaryRoots r = kappa_stationary_roots(mu);
  const double h = 1e-5;
  auto deriv = [&](double k) { return (v_dist(mu, k + h) - v_dist(mu, k - h)) / (2 * h); };
  const double dp = deriv(r.plus), dm = deriv(r.minus);
  const double vp = v_dist(mu, r.plus), v1 = v_dist(mu, 1.0);
  ProtocolParams p;
  p.kappa2 = r.plus;
  const double v_circuit = squeezing_variance(run_simplified_two_copy(p, ctx.cutoff(14)).state);
  o.detail << "roots " << r.plus << ", " << r.minus << "; dV " << g(dp) << ", " << g(dm) << "; V(k+) " << vp
           << " (circuit " << v_circuit << "), V(1) " << v1 << "; ";
  o.require(std::abs(dp) < tol && std::abs(dm) < tol, "|dV/dk2| < " + g(tol) + " at both roots");
  o.require(std::abs(r.plus - 0.331882) < 5e-6 && std::abs(r.minus + 1.652576) < 5e-6, "root values");
  o.require(std::abs(vp - 0.2550135) < 5e-7, "V(k+) = 0.25501");
  o.require(std::abs(v1 - 0.275493) < 5e-7, "V(1) = 0.27549");
  o.require(vp < v1, "V(k+) < V(1)");
  o.require(std::abs(v_circuit - vp) < std::max(1e-8, tol), "circuit V matches at k+");
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome check_multicopy(const Ctx& ctx) {
  Outcome o;
  const int c = ctx.cutoff(8);
  const double tol = ctx.tol(1e-8);
  ProtocolParams p;
  const double mu = p.mu();
  for (int M : {2, 3}) {
    const HeraldedResult h = run_multicopy(p, M, c);
    const Eigen::VectorXcd closed = unit(diagonal_vector(multicopy_amplitudes(p.lambda, p.T, M, c), c));
    const double dev = max_deviation_up_to_phase(h.pure().amplitudes(), closed);
    o.detail << "M=" << M << " deviation " << g(dev) << "; ";
    o.require(dev < tol, "M=" + std::to_string(M) + " circuit vs closed form < " + g(tol));
  }
  const std::vector<double> a2 = multicopy_amplitudes(p.lambda, p.T, 2, 30);
  double lo = 1e300, hi = -1e300;
  for (int n = 0; n <= 30; ++n) {
    const double r = a2[static_cast<std::size_t>(n)] / ((n * n + 3.0 * n + 4.0) * std::pow(mu, n));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  o.detail << "M=2 pattern spread " << g((hi - lo) / hi) << "; ";
  o.require((hi - lo) / hi < 1e-12, "M=2 amplitudes proportional to (n^2+3n+4) mu^n");
  std::vector<double> fid;
  for (int M : {2, 4, 8}) {
    std::vector<double> a = multicopy_amplitudes(p.lambda, p.T, M, series_n_max(mu) + 60);
    double n2 = 0.0, ov = 0.0;
    const double w = p.lambda_d();
    for (std::size_t n = 0; n < a.size(); ++n) {
      n2 += a[n] * a[n];
      ov += a[n] * std::sqrt(1.0 - w * w) * std::pow(w, static_cast<double>(n));
    }
    fid.push_back(ov * ov / n2);
  }
  o.detail << "F(M=2,4,8) " << fid[0] << ", " << fid[1] << ", " << fid[2] << "; ";
  o.require(fid[0] <= fid[1] && fid[1] <= fid[2], "fidelity nondecreasing in M");
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome check_preparation(const Ctx& ctx) {
  Outcome o;
  const int c = ctx.cutoff(16);
  const double tol = ctx.tol(1e-8);
  double cov_dev = 0.0, fock_dev = 0.0, psig_dev = 0.0;
  for (double l : {0.2, 0.4}) {
    for (double e : {0.6, 0.9}) {
      for (double T : {0.6, 0.8}) {
        ProtocolParams p;
        p.lambda = l;
        p.eta = e;
        p.T = T;
        DensityOperator att = as_density(make_lossy_tmsv(l, e, {c, c}));
        att = apply_exponential_number(apply_exponential_number(att, 0, 1.0 - T), 1, 1.0 - T);
        psig_dev = std::max(psig_dev, std::abs(att.trace() - p_sigma(p)));
        const DensityOperator sa = normalize(att).first;
        const DensityOperator sb = normalize(as_density(make_sigma(p, {c, c}).state)).first;
        cov_dev = std::max(cov_dev, (covariance_summary(sa).cov - covariance_summary(sb).cov).cwiseAbs().maxCoeff());
        fock_dev = std::max(fock_dev, (sa.matrix() - sb.matrix()).cwiseAbs().maxCoeff());
      }
    }
  }
  o.detail << "covariance " << g(cov_dev) << ", Fock " << g(fock_dev) << ", P_sigma Fock sum " << g(psig_dev) << "; ";
  o.require(cov_dev < tol, "covariance agreement < " + g(tol));
  o.require(fock_dev < 10 * tol, "Fock agreement < " + g(10 * tol));
  o.require(psig_dev < 1e-10, "P_sigma closed form equals the Fock sum");

  ProtocolParams p;
  p.eta = 0.8;
  const ThermalDecomposition th = thermal_params(p);
  const double approx = thermal_nbar_approx(p);
  const DensityOperator st = normalize(make_squeezed_thermal(th.s, th.nbar, {12, 12})).first;
  const DensityOperator sg = normalize(as_density(make_sigma(p, {12, 12}).state)).first;
  const double st_dev = (st.matrix() - sg.matrix()).cwiseAbs().maxCoeff();
  o.detail << "nbar " << th.nbar << ", approx " << approx << ", thermal form vs sigma " << g(st_dev) << "; ";
  // Independent value: symplectic eigenvalue of eta' gamma_TMSV(nu) + (1 - eta') I.
  const AttenuatedSigmaParams ap = attenuated_sigma_params(p);
  const double nu2 = ap.nu * ap.nu;
  const double ca = ap.eta_prime * (1 + nu2) / (1 - nu2) + 1 - ap.eta_prime;
  const double cc = ap.eta_prime * 2 * ap.nu / (1 - nu2);
  const double nbar_cov = 0.5 * (std::sqrt(ca * ca - cc * cc) - 1);
  o.require(std::abs(th.nbar - nbar_cov) < 1e-12, "nbar equals the covariance oracle");
  o.require(std::abs(th.nbar - 0.005202) < 1e-6, "nbar = 0.005202");
  o.require(std::abs(approx / th.nbar - 1.0) < 0.01, "approximation within 1%");
  o.require(st_dev < 10 * tol, "squeezed thermal form matches sigma");
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome check_oracles(const Ctx& ctx) {
  Outcome o;
  // TMSV references with omega near 0.7 need a deep window for overlaps.
  const int c = ctx.cutoff(20);
  const double base = ctx.tol(1e-8);
  int compared = 0;
  double worst = 0.0;
  auto cmp = [&](const std::string& name, double got, double want, double deficit, const std::string& at) {
    const double lim = std::max(base, 10.0 * deficit);
    const double d = std::abs(got - want);
    ++compared;
    worst = std::max(worst, d / lim);
    if (!(d < lim)) o.require(false, name + " at " + at + " (" + g(d) + " > " + g(lim) + ")");
  };
  for (double l : {0.2, 0.4}) {
    for (double T : {0.6, 0.8}) {
      for (double e : {0.8, 1.0}) {
        std::ostringstream at;
        at << "lambda=" << l << " T=" << T << " eta=" << e;
        ProtocolParams p;
        p.lambda = l;
        p.T = T;
        p.eta = e;
        const double mu = p.mu();
        // Locally subtracted input.
        const AnyState in = make_lossy_tmsv(l, e, {c + 1, c + 1});
        const HeraldedResult s1 = photon_subtract(in, 0, T, 1, SubtractionPath::kCircuit);
        const HeraldedResult s2 = photon_subtract(s1.state, 1, T, 1, SubtractionPath::kCircuit);
        // The top level of the c+1 window misses feed from c+2; keep levels up to c.
        const AnyState sub = std::visit(
            [&](const auto& x) -> AnyState { return normalize(truncate(x, Cutoffs{c, c})).first; }, s2.state);
        cmp("input-variance", squeezing_variance(in), v_in_mixed(l, e), 0.0, at.str());
        cmp("subtracted-variance", squeezing_variance(sub), v_sub_mixed(l, e, T), s2.norm_deficit, at.str());
        if (e != 1.0) continue;
        cmp("subtracted-variance-pure", squeezing_variance(sub), v_sub_pure(mu), s2.norm_deficit, at.str());
        // Unnormalized subtracted amplitudes.
        const std::vector<double> amp = subtracted_amplitudes(l, T, c);
        const FockState& ps = s2.pure();
        const double scale = std::sqrt(s1.probability * s2.probability);
        const int cp = c + 1;
        for (int n = 0; n <= c; ++n) {
          cmp("subtracted-state", std::abs(ps.amplitudes()[n * (cp + 1) + n] * scale), amp[static_cast<std::size_t>(n)],
              ps.norm_deficit(), at.str() + " n=" + std::to_string(n));
        }
        // Original scheme probability.
        const HeraldedResult orig = run_original_two_copy(p, c);
        cmp("success-probability", orig.probability, p_success_original(l, T), orig.norm_deficit, at.str());
        for (double k2 : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
          p.kappa2 = k2;
          const std::string at2 = at.str() + " kappa2=" + g(k2);
          const HeraldedResult out = run_simplified_two_copy(p, c);
          const PsiOutPrime psi = psi_out_prime(l, T, k2, c);
          const Eigen::VectorXcd closed = unit(diagonal_vector(psi.coefficients, c));
          cmp("distilled-state", max_deviation_up_to_phase(out.pure().amplitudes(), closed), 0.0, out.norm_deficit, at2);
          cmp("distilled-variance", squeezing_variance(out.state), v_dist(mu, k2), out.norm_deficit, at2);
          const double ws = omega_star(mu, k2);
          for (double w : {ws, 0.5 * mu}) {
            cmp("fidelity", fidelity_with_tmsv(out.state, w), fidelity_tmsv(mu, k2, w), out.norm_deficit,
                at2 + " omega=" + g(w));
          }
        }
      }
    }
  }
  o.detail << compared << " comparisons, worst error/limit " << g(worst) << "; ";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome check_generalized(const Ctx& ctx) {
  Outcome o;
  const int c = ctx.cutoff(14);
  const double tol = ctx.tol(1e-9);
  const double l = 0.4, T = 0.8;
  const HeraldedResult h = run_generalized_subtraction(l, 0.1, T, c);
  const Eigen::VectorXcd closed = unit(diagonal_vector(generalized_subtraction_amplitudes(l, 0.1, T, c), c));
  const double dev = max_deviation_up_to_phase(h.pure().amplitudes(), closed);
  o.detail << "nu=0.1 deviation " << g(dev) << "; ";
  o.require(dev < tol, "circuit vs closed form < " + g(tol));

  // nu = 0: amplitudes / (T lambda)^n follow A (n^2 + d1 n + d0).
  const HeraldedResult z = run_generalized_subtraction(l, 0.0, T, c);
  const FockState& s = z.pure();
  const Complex phase = std::conj(s.amplitudes()[0]) / std::abs(s.amplitudes()[0]);
  std::vector<double> r;
  for (int n = 0; n <= c; ++n) r.push_back((phase * s.amplitudes()[n * (c + 1) + n]).real() / std::pow(T * l, n));
  const double A = (r[2] - 2 * r[1] + r[0]) / 2;
  const double d0 = r[0] / A;
  const double d1 = r[1] / A - 1 - d0;
  double fit = 0.0;
  for (int n = 0; n <= 8; ++n) fit = std::max(fit, std::abs(r[static_cast<std::size_t>(n)] / (A * (n * n + d1 * n + d0)) - 1));
  o.detail << "nu=0: d1 " << d1 << ", d0 " << d0 << ", fit " << g(fit) << "; ";
  o.require(std::abs(d1 - 3) < tol && std::abs(d0 - 2) < tol, "d1 = 3 and d0 = 2");
  o.require(fit < tol, "quadratic pattern holds for n <= 8");
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome check_figure_shapes(const Ctx& ctx) {
  Outcome o;
  const CommandResult r = figure_fig3(Fig3Options{});
  std::vector<double> k, v, e, f, w;
  const std::size_t row = r.table.column("row");
  const auto K = r.table.numeric_column("kappa2"), V = r.table.numeric_column("V_dist"),
             E = r.table.numeric_column("E"), F = r.table.numeric_column("F_max"),
             W = r.table.numeric_column("omega_star");
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    if (std::get<std::string>(r.table.rows[i][row]) != "curve") continue;
    k.push_back(K[i]);
    v.push_back(V[i]);
    e.push_back(E[i]);
    f.push_back(F[i]);
    w.push_back(W[i]);
  }
  const std::size_t imin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  auto strictly = [](const std::vector<double>& x, bool down) {
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (down ? !(x[i] < x[i - 1]) : !(x[i] > x[i - 1])) return false;
    }
    return true;
  };
  const double kplus = kappa_stationary_roots(0.32).plus;
  const double spacing = k.size() > 1 ? k[1] - k[0] : 0.0;
  o.detail << k.size() << " points on [" << k.front() << ", " << k.back() << "]; V_dist min at " << k[imin] << "; F "
           << f.front() << " -> " << f.back() << "; omega " << w.front() << " -> " << w.back() << "; ";
  o.require(imin > 0 && imin + 1 < v.size(), "(a) interior V_dist minimum");
  o.require(std::abs(k[imin] - kplus) <= ctx.tol(spacing), "(a) minimum at the stationary root");
  o.require(strictly(e, true), "(b) E decreasing");
  o.require(strictly(f, false) && f.back() > 0.999 && f.back() <= 1.0, "(c) F increasing toward 1");
  o.require(strictly(w, true), "(d) omega decreasing");
  return o;
}

using CheckFn = Outcome (*)(const Ctx&);

struct Entry {
  CheckInfo info;
  CheckFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {{1, "scheme-equivalence", "original, simplified, Kraus and closed-form outputs agree"}, check_scheme_equivalence},
      {{2, "gaussification", "pure iteration reaches TMSV(2 T lambda)"}, check_gaussification},
      {{3, "mixed-asymptotics", "mixed iteration reaches the asymptotic variance; lower bound"}, check_mixed_asymptotics},
      {{4, "stationarity", "optimal kappa^2 roots are stationary minima"}, check_stationarity},
      {{5, "multicopy", "M-copy circuit equals the closed form; fidelity grows with M"}, check_multicopy},
      {{6, "preparation-equivalence", "two ancilla constructions agree; thermal parameters"}, check_preparation},
      {{7, "oracle-suite", "closed forms agree with circuit quantities"}, check_oracles},
      {{8, "generalized-subtraction", "two-photon generalized subtraction closed form"}, check_generalized},
      {{9, "figure-shapes", "fig3 extremum and monotonicity"}, check_figure_shapes},
  };
  return r;
}

}  // namespace

const std::vector<CheckInfo>& list_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

std::vector<CheckResult> run_checks(const VerifyOptions& opt) {
  for (const auto& name : opt.only) {
    const auto& reg = registry();
    if (std::none_of(reg.begin(), reg.end(), [&](const Entry& e) { return e.info.name == name; })) {
      throw UsageError("unknown check '" + name + "'");
    }
  }
  const Ctx ctx{opt};
  std::vector<CheckResult> out;
  for (const auto& e : registry()) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), e.info.name) == opt.only.end()) continue;
    CheckResult r;
    r.criterion = e.info.criterion;
    r.name = e.info.name;
    const auto t0 = Clock::now();
    try {
      Outcome o = e.fn(ctx);
      r.passed = o.passed;
      r.detail = o.detail.str();
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = seconds_since(t0);
    while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
    out.push_back(std::move(r));
  }
  return out;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  const std::vector<CheckResult> results = run_checks(opt);
  bool all = true;
  for (const auto& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "%-2d %-24s %s %7.2fs  ", r.criterion, r.name.c_str(), r.passed ? "PASS" : "FAIL",
                  r.seconds);
    out << head << r.detail << "\n";
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace cvdistill::cli
