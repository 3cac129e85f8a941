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

#include "cvdistill/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include "cvdistill/analytics.hpp"
#include "cvdistill/cli/config.hpp"
#include "cvdistill/error.hpp"
#include "cvdistill/measures.hpp"
#include "cvdistill/optimize.hpp"
#include "cvdistill/schemes.hpp"

#ifndef CVDISTILL_VERSION
#define CVDISTILL_VERSION "unknown"
#endif

namespace cvdistill::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  out.back() = b;
  return out;
}

void add_params(Table& t, const ProtocolParams& p) {
  t.add_provenance("lambda", p.lambda);
  t.add_provenance("T", p.T);
  t.add_provenance("kappa2", p.kappa2);
  t.add_provenance("eta", p.eta);
  t.add_provenance("M", static_cast<double>(p.M));
}

/// Runs f(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

double tmsv_entropy(double lambda) {
  const double l2 = lambda * lambda;
  if (l2 == 0.0) return 0.0;
  const double c2 = 1.0 / (1.0 - l2);
  const double s2 = l2 / (1.0 - l2);
  return c2 * std::log(c2) - s2 * std::log(s2);
}

FockState diagonal_state(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero((n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k) a[k * (n + 1) + k] = c[static_cast<std::size_t>(k)];
  return FockState({n, n}, a, 0.0);
}

struct StateMetrics {
  double V = kNaN;
  double E = kNaN;
  double F = kNaN;
  double omega = kNaN;
  double F_D = kNaN;
  double probability = kNaN;
  double norm_deficit = kNaN;
};

double get_metric(const StateMetrics& m, const std::string& name) {
  if (name == "V") return m.V;
  if (name == "E") return m.E;
  if (name == "F") return m.F;
  if (name == "omega") return m.omega;
  if (name == "F_D") return m.F_D;
  if (name == "probability") return m.probability;
  throw UsageError("unknown metric '" + name + "' (V, E, F, omega, F_D, probability)");
}

// Best TMSV fidelity over real omega.
std::pair<double, double> max_tmsv_fidelity(const AnyState& s) {
  const ScalarMinimum m = minimize_scalar([&](double w) { return -fidelity_with_tmsv(s, w); }, -0.999, 0.999, 1e-9);
  return {-m.fx, m.x};
}

StateMetrics measure_state(const AnyState& s, double lambda_d) {
  StateMetrics m;
  m.V = squeezing_variance(s);
  m.E = entanglement_entropy(s);
  std::tie(m.F, m.omega) = max_tmsv_fidelity(s);
  if (std::abs(lambda_d) < 1.0) m.F_D = fidelity_with_tmsv(s, lambda_d);
  return m;
}

std::vector<double> normalized(std::vector<double> c) {
  double n2 = 0.0;
  for (double x : c) n2 += x * x;
  for (double& x : c) x /= std::sqrt(n2);
  return c;
}

StateMetrics analytic_metrics(const ScanOptions& opt, const ProtocolParams& p, double nu) {
  StateMetrics m;
  const double mu = p.mu();
  const int n_max = series_n_max(mu) + 4 * p.M + 8;
  if (opt.scheme == "simplified" || opt.scheme == "original") {
    if (!p.pure()) return m;  // no closed form for mixed distilled states
    const double k2 = opt.scheme == "original" ? 1.0 : p.kappa2;
    const PsiOutPrime psi = psi_out_prime(p.lambda, p.T, k2, n_max);
    m.V = v_dist(mu, k2);
    m.E = schmidt_entropy(psi.coefficients);
    m.omega = omega_star(mu, k2);
    m.F = fidelity_tmsv(mu, k2, m.omega);
    if (std::abs(p.lambda_d()) < 1.0) m.F_D = fidelity_tmsv(mu, k2, p.lambda_d());
    if (k2 == 1.0) {
      m.probability = p_success_original(p.lambda, p.T);
      if (opt.scheme == "simplified") m.probability /= p_sigma(p);
    }
    m.norm_deficit = 0.0;
    return m;
  }
  std::vector<double> c;
  if (opt.scheme == "multicopy") {
    if (!p.pure()) return m;
    c = multicopy_amplitudes(p.lambda, p.T, p.M, n_max);
  } else {
    c = generalized_subtraction_amplitudes(p.lambda, nu, p.T, n_max);
  }
  const AnyState s = diagonal_state(normalized(std::move(c)));
  m = measure_state(s, p.lambda_d());
  m.norm_deficit = 0.0;
  return m;
}

HeraldedResult circuit_run(const ScanOptions& opt, const ProtocolParams& p, double nu, int cutoff) {
  SchemeOptions so;
  so.max_norm_deficit = std::numeric_limits<double>::infinity();
  if (opt.scheme == "simplified") return run_simplified_two_copy(p, cutoff, opt.family, so);
  if (opt.scheme == "original") return run_original_two_copy(p, cutoff, so);
  if (opt.scheme == "multicopy") return run_multicopy(p, p.M, cutoff, so);
  return run_generalized_subtraction(p.lambda, nu, p.T, cutoff, so);
}

void set_axis(ProtocolParams& p, double& nu, const std::string& axis, double v) {
  if (axis == "lambda") {
    p.lambda = v;
  } else if (axis == "T") {
    p.T = v;
  } else if (axis == "kappa2") {
    p.kappa2 = v;
  } else if (axis == "eta") {
    p.eta = v;
  } else if (axis == "M") {
    if (v != std::floor(v)) throw UsageError("M grid must be integral");
    p.M = static_cast<int>(v);
  } else if (axis == "nu") {
    nu = v;
  } else {
    throw UsageError("unknown scan axis '" + axis + "' (lambda, T, kappa2, eta, M, nu)");
  }
}

}  // namespace

void add_common_provenance(Table& t, const std::string& command) {
  t.add_provenance("tool", "cvdistill");
  t.add_provenance("version", CVDISTILL_VERSION);
  t.add_provenance("command", command);
}

int default_cutoff(const std::string& scheme, int M) {
  if (scheme == "multicopy") return M <= 3 ? 14 : 10;
  return 14;
}

// ---------------------------------------------------------------------------

CommandResult figure_fig3(const Fig3Options& opt) {
  ProtocolParams p;
  p.lambda = opt.lambda;
  p.T = opt.T;
  p.validate();
  const std::vector<double> grid = opt.kappa2.empty() ? linspace(0.0, 3.0, 301) : opt.kappa2;
  const double mu = p.mu();
  const int n_max = series_n_max(mu) + 8;

  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "figure fig3");
  t.add_provenance("lambda", p.lambda);
  t.add_provenance("T", p.T);
  t.add_provenance("series_n_max", static_cast<double>(n_max));
  t.columns = {"row", "kappa2", "V_dist", "E", "F_max", "omega_star"};
  for (double k2 : grid) {
    const PsiOutPrime psi = psi_out_prime(p.lambda, p.T, k2, n_max);
    const double w = omega_star(mu, k2);
    t.rows.push_back({std::string("curve"), k2, v_dist(mu, k2), schmidt_entropy(psi.coefficients),
                      fidelity_tmsv(mu, k2, w), w});
  }
  const PureMetrics pm = pure_metrics(p.lambda, p.T, 1.0);
  const double e_sub = schmidt_entropy(normalized(subtracted_amplitudes(p.lambda, p.T, n_max)));
  t.rows.push_back({std::string("V_in"), Cell{}, pm.v_in, tmsv_entropy(p.lambda), Cell{}, Cell{}});
  t.rows.push_back({std::string("V_sub"), Cell{}, pm.v_sub, e_sub, Cell{}, Cell{}});
  if (p.convergent_regime()) {
    t.rows.push_back({std::string("V_inf"), Cell{}, pm.v_inf, tmsv_entropy(p.lambda_d()), Cell{}, Cell{}});
  } else {
    r.warnings.push_back("|2 T lambda| >= 1: no asymptotic state, V_inf row omitted");
  }
  r.plot = {"kappa2", {"V_dist", "E", "F_max", "omega_star"}, "fig3", "row"};
  return r;
}

CommandResult figure_fig6(const Fig6Options& opt) {
  if (opt.axis != "eta" && opt.axis != "T") throw UsageError("fig6 axis must be eta or T");
  const bool eta_axis = opt.axis == "eta";
  const std::vector<double> xs = !opt.x.empty() ? opt.x : eta_axis ? linspace(0.01, 1.0, 100) : linspace(0.01, 0.99, 99);
  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "figure fig6");
  t.add_provenance("axis", opt.axis);
  t.columns = {"lambda", eta_axis ? "T" : "eta", "x", "nbar", "nbar_prime"};
  for (double l : opt.lambdas) {
    for (double sl : opt.slices) {
      for (double x : xs) {
        ProtocolParams p;
        p.lambda = l;
        p.eta = eta_axis ? x : sl;
        p.T = eta_axis ? sl : x;
        p.validate();
        const ThermalDecomposition th = thermal_params(p);
        const ReducedNoiseParams rn = reduced_noise_params(p);
        t.rows.push_back({l, sl, x, th.nbar, rn.nbar_prime});
      }
    }
  }
  r.plot = {"x", {"nbar", "nbar_prime"}, "fig6", eta_axis ? "T" : "eta"};
  return r;
}

CommandResult figure_fig7(const Fig7Options& opt) {
  const std::vector<double> grid = opt.kappa2.empty() ? linspace(0.0, 3.0, 61) : opt.kappa2;
  const int c = opt.cutoff;
  const int w = c + 2;
  struct Point {
    std::size_t panel;
    double kappa2;
  };
  std::vector<Point> points;
  for (std::size_t k = 0; k < opt.panels.size(); ++k) {
    for (double k2 : grid) points.push_back({k, k2});
  }
  std::vector<DensityOperator> inputs;
  for (const auto& [l, e] : opt.panels) {
    ProtocolParams p;
    p.lambda = l;
    p.eta = e;
    p.T = opt.T;
    p.validate();
    inputs.push_back(as_density(make_lossy_tmsv(l, e, {w, w})));
  }
  std::vector<std::pair<double, double>> values(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const auto& [l, e] = opt.panels[points[i].panel];
    ProtocolParams p;
    p.lambda = l;
    p.eta = e;
    p.T = opt.T;
    p.kappa2 = points[i].kappa2;
    const DensityOperator sigma = as_density(make_sigma(p, {w, w}, opt.family).state);
    const DensityOperator out = truncate(rho_dist_formula(inputs[points[i].panel], sigma, p.T), {c, c});
    auto [n, norm] = normalize(out);
    (void)norm;
    values[i] = {squeezing_variance(n), n.trace_deficit()};
  });

  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "figure fig7");
  t.add_provenance("T", opt.T);
  t.add_provenance("cutoff", static_cast<double>(c));
  t.add_provenance("sigma", opt.family == SigmaFamily::kReducedNoise ? "reduced-noise" : "attenuated");
  t.columns = {"panel", "lambda", "eta", "kappa2", "V", "V_in", "V_sub", "V_inf", "bound", "norm_deficit"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [l, e] = opt.panels[points[i].panel];
    const MixedMetrics mm = mixed_metrics(l, e, opt.T);
    t.rows.push_back({static_cast<std::int64_t>(points[i].panel), l, e, points[i].kappa2, values[i].first, mm.v_in,
                      mm.v_sub, mm.v_inf, mm.bound, values[i].second});
  }
  r.plot = {"kappa2", {"V", "V_in", "V_sub", "V_inf"}, "fig7", "panel"};
  return r;
}

// ---------------------------------------------------------------------------

CommandResult run_scan(const ScanOptions& opt) {
  if (opt.scheme != "simplified" && opt.scheme != "original" && opt.scheme != "multicopy" &&
      opt.scheme != "generalized") {
    throw UsageError("unknown scheme '" + opt.scheme + "' (simplified, original, multicopy, generalized)");
  }
  if (opt.source != "circuit" && opt.source != "analytic" && opt.source != "both") {
    throw UsageError("source must be circuit, analytic or both");
  }
  if (opt.grid.empty()) throw UsageError("scan grid is empty");
  const bool circuit = opt.source != "analytic";
  const bool analytic = opt.source != "circuit";
  for (const auto& m : opt.metrics) (void)get_metric(StateMetrics{}, m);  // validate names

  struct Outcome {
    StateMetrics c;
    StateMetrics a;
    std::string status = "ok";
  };
  std::vector<Outcome> out(opt.grid.size());
  parallel_for(opt.grid.size(), opt.threads, [&](std::size_t i) {
    ProtocolParams p = opt.params;
    double nu = opt.nu;
    Outcome& o = out[i];
    try {
      set_axis(p, nu, opt.axis, opt.grid[i]);
      p.validate();
      if (analytic) o.a = analytic_metrics(opt, p, nu);
      if (circuit) {
        const int cutoff = opt.cutoff > 0 ? opt.cutoff : default_cutoff(opt.scheme, p.M);
        const HeraldedResult h = circuit_run(opt, p, nu, cutoff);
        o.c = measure_state(h.state, p.lambda_d());
        o.c.probability = h.probability;
        o.c.norm_deficit = h.norm_deficit;
        if (h.norm_deficit > opt.deficit_warn) o.status = "high_deficit";
      }
    } catch (const HeraldImpossibleError&) {
      o.status = "herald_impossible";
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      o.status = std::string("invalid: ") + e.what();
    }
  });

  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "scan");
  add_params(t, opt.params);
  if (opt.scheme == "generalized") t.add_provenance("nu", opt.nu);
  t.add_provenance("scheme", opt.scheme);
  t.add_provenance("axis", opt.axis);
  t.add_provenance("source", opt.source);
  t.add_provenance("cutoff", opt.cutoff > 0 ? std::to_string(opt.cutoff) : "default");
  t.add_provenance("points", static_cast<double>(opt.grid.size()));
  t.columns = {opt.axis};
  std::vector<std::string> ys;
  for (const auto& m : opt.metrics) {
    if (circuit && analytic) {
      t.columns.push_back(m + "_circuit");
      t.columns.push_back(m + "_analytic");
    } else {
      t.columns.push_back(m);
    }
    ys.push_back(t.columns.back());
  }
  t.columns.push_back("norm_deficit");
  t.columns.push_back("status");
  int herald_failures = 0;
  int high = 0;
  for (std::size_t i = 0; i < opt.grid.size(); ++i) {
    std::vector<Cell> row = {opt.grid[i]};
    for (const auto& m : opt.metrics) {
      if (circuit) row.emplace_back(get_metric(out[i].c, m));
      if (analytic) row.emplace_back(get_metric(out[i].a, m));
    }
    row.emplace_back(circuit ? out[i].c.norm_deficit : out[i].a.norm_deficit);
    row.emplace_back(out[i].status);
    t.rows.push_back(std::move(row));
    herald_failures += out[i].status == "herald_impossible";
    high += out[i].status == "high_deficit";
  }
  if (high > 0) {
    r.warnings.push_back(std::to_string(high) + " point(s) have norm_deficit above " + format_number(opt.deficit_warn) +
                         "; raise --cutoff");
  }
  if (herald_failures > 0) {
    r.warnings.push_back(std::to_string(herald_failures) + " point(s) could not be heralded");
    r.exit_code = kExitRunFailed;
  }
  r.plot = {opt.axis, ys, "scan " + opt.scheme, ""};
  return r;
}

CommandResult run_gaussify(const GaussifyOptions& opt) {
  const ProtocolParams& p = opt.params;
  p.validate();
  if (opt.iters < 0) throw UsageError("iters must be nonnegative");
  const int c = opt.cutoff > 0 ? opt.cutoff : (p.pure() ? 20 : 18);
  const AnyState input = make_lossy_tmsv(p.lambda, p.eta, {c, c});
  const HeraldedResult a = photon_subtract(input, 0, p.T, 1);
  const HeraldedResult b = photon_subtract(a.state, 1, p.T, 1);
  GaussificationOptions go;
  const GaussificationTrace tr = iterate_gaussification(b.state, opt.iters, opt.tol, go);

  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "gaussify");
  add_params(t, p);
  t.add_provenance("cutoff", static_cast<double>(c));
  t.add_provenance("iters", static_cast<double>(opt.iters));
  t.add_provenance("tol", opt.tol);
  t.add_provenance("subtraction_probability", a.probability * b.probability);
  t.add_provenance("converged", tr.converged ? "true" : "false");
  t.add_provenance("diverged", tr.diverged ? "true" : "false");
  if (p.pure()) {
    if (p.convergent_regime()) t.add_provenance("V_inf_analytic", v_inf_pure(p.lambda, p.T));
  } else {
    t.add_provenance("V_inf_analytic", v_inf_mixed(p.lambda, p.eta, p.T));
  }
  t.columns = {"iteration", "probability", "distance", "residual", "norm_deficit", "escaped", "mean_photons", "V", "F_D"};
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const GaussificationRecord& rec = tr.records[i];
    double fd = kNaN;
    if (std::abs(p.lambda_d()) < 1.0 && i < tr.iterates.size()) fd = fidelity_with_tmsv(tr.iterates[i], p.lambda_d());
    t.rows.push_back({static_cast<std::int64_t>(rec.iteration), rec.probability, rec.distance, rec.residual,
                      rec.norm_deficit, rec.escaped, rec.mean_photons, rec.squeezing_variance, fd});
  }
  if (tr.diverged) {
    r.warnings.push_back("iteration diverged (norm escaping the cutoff or herald failed)");
    r.exit_code = kExitRunFailed;
  } else if (!tr.converged && opt.iters > 0) {
    r.warnings.push_back("tolerance not reached within " + std::to_string(opt.iters) + " iterations");
  }
  r.plot = {"iteration", {"V", "F_D"}, "gaussify", ""};
  return r;
}

CommandResult run_multicopy_command(const MulticopyOptions& opt) {
  const ProtocolParams& p = opt.params;
  p.validate();
  const int c = opt.cutoff > 0 ? opt.cutoff : default_cutoff("multicopy", p.M);
  const HeraldedResult h = run_multicopy(p, p.M, c);
  const std::vector<double> closed = normalized(multicopy_amplitudes(p.lambda, p.T, p.M, c));
  const FockState& s = h.pure();
  // Align the circuit's global phase with the positive closed form.
  Complex ref = s.amplitudes()[0];
  const Complex phase = std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : Complex(1.0, 0.0);
  Eigen::VectorXcd cl = Eigen::VectorXcd::Zero(s.amplitudes().size());
  for (int n = 0; n <= c; ++n) cl[n * (c + 1) + n] = closed[static_cast<std::size_t>(n)];

  CommandResult r;
  Table& t = r.table;
  add_common_provenance(t, "multicopy");
  add_params(t, p);
  t.add_provenance("cutoff", static_cast<double>(c));
  t.add_provenance("probability", h.probability);
  t.add_provenance("norm_deficit", h.norm_deficit);
  t.add_provenance("max_deviation", max_deviation_up_to_phase(s.amplitudes(), cl));
  t.add_provenance("V", squeezing_variance(h.state));
  if (std::abs(p.lambda_d()) < 1.0) t.add_provenance("F_D", fidelity_with_tmsv(h.state, p.lambda_d()));
  t.columns = {"n", "amplitude_circuit", "amplitude_closed_form"};
  for (int n = 0; n <= c; ++n) {
    t.rows.push_back({static_cast<std::int64_t>(n), (phase * s.amplitudes()[n * (c + 1) + n]).real(),
                      closed[static_cast<std::size_t>(n)]});
  }
  r.plot = {"n", {"amplitude_circuit", "amplitude_closed_form"}, "multicopy", ""};
  return r;
}

}  // namespace cvdistill::cli
