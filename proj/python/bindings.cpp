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

// Python bindings. States cross the boundary as FockState / DensityOperator
// objects whose amplitudes and matrices convert to numpy arrays.

#include <optional>
#include <span>
#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvdistill/analytics.hpp"
#include "cvdistill/cli/config.hpp"
#include "cvdistill/cli/verify.hpp"
#include "cvdistill/error.hpp"
#include "cvdistill/fock.hpp"
#include "cvdistill/measures.hpp"
#include "cvdistill/optimize.hpp"
#include "cvdistill/schemes.hpp"
#include "cvdistill/state_prep.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace cvdistill;

// AnyState holds no default-constructible alternative, so the stock variant
// caster can't be used. Keep the value in an optional instead.
namespace pybind11::detail {
template <>
struct type_caster<AnyState> {
  std::optional<AnyState> value;

  static constexpr auto name = const_name("FockState | DensityOperator");

  bool load(handle src, bool) {
    if (isinstance<FockState>(src)) {
      value.emplace(src.cast<FockState>());
      return true;
    }
    if (isinstance<DensityOperator>(src)) {
      value.emplace(src.cast<DensityOperator>());
      return true;
    }
    return false;
  }

  static handle cast(const AnyState& s, return_value_policy, handle) {
    return std::visit([](const auto& v) { return pybind11::cast(v).release(); }, s);
  }

  operator AnyState&() { return *value; }
  operator const AnyState&() const { return *value; }
  template <typename T>
  using cast_op_type = movable_cast_op_type<T>;
  operator AnyState&&() && { return std::move(*value); }
};
}  // namespace pybind11::detail

namespace {

Cutoffs two(int cutoff) { return {cutoff, cutoff}; }

ProtocolParams make_params(double lam, double T, double kappa2, double eta, int M) {
  ProtocolParams p;
  p.lambda = lam;
  p.T = T;
  p.kappa2 = kappa2;
  p.eta = eta;
  p.M = M;
  return p;
}

py::dict record_dict(const GaussificationRecord& r) {
  return py::dict("iteration"_a = r.iteration, "probability"_a = r.probability, "distance"_a = r.distance,
                  "residual"_a = r.residual, "norm_deficit"_a = r.norm_deficit, "escaped"_a = r.escaped,
                  "mean_photons"_a = r.mean_photons, "V"_a = r.squeezing_variance);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fock-space simulation of multicopy entanglement distillation";

  py::register_exception<HeraldImpossibleError>(m, "HeraldImpossibleError", PyExc_RuntimeError);
  py::register_exception<CutoffTooSmallError>(m, "CutoffTooSmallError", PyExc_RuntimeError);
  py::register_exception<KindMismatchError>(m, "KindMismatchError", PyExc_ValueError);
  py::register_exception<cli::UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<FockState>(m, "FockState")
      .def(py::init([](Cutoffs cutoffs, Eigen::VectorXcd amplitudes, double deficit) {
             return FockState(std::move(cutoffs), std::move(amplitudes), deficit);
           }),
           "cutoffs"_a, "amplitudes"_a, "norm_deficit"_a = 0.0)
      .def_static("vacuum", &FockState::vacuum, "cutoffs"_a)
      .def_static("basis", [](Cutoffs c, std::vector<int> occ) { return FockState::basis(std::move(c), std::span<const int>(occ)); },
                  "cutoffs"_a, "occupation"_a)
      .def_property_readonly("cutoffs", &FockState::cutoffs)
      .def_property_readonly("num_modes", &FockState::num_modes)
      .def_property_readonly("amplitudes", [](const FockState& s) { return Eigen::VectorXcd(s.amplitudes()); })
      .def_property_readonly("norm_deficit", &FockState::norm_deficit)
      .def("amplitude", [](const FockState& s, std::vector<int> occ) { return s.amplitude(std::span<const int>(occ)); })
      .def("squared_norm", &FockState::squared_norm)
      .def("__repr__", [](const FockState& s) {
        std::ostringstream o;
        o << "FockState(modes=" << s.num_modes() << ", dim=" << s.dim() << ", norm_deficit=" << s.norm_deficit()
          << ")";
        return o.str();
      });

  py::class_<DensityOperator>(m, "DensityOperator")
      .def(py::init([](Cutoffs cutoffs, Eigen::MatrixXcd matrix, double deficit) {
             return DensityOperator(std::move(cutoffs), std::move(matrix), deficit);
           }),
           "cutoffs"_a, "matrix"_a, "trace_deficit"_a = 0.0)
      .def_static("from_pure", &DensityOperator::from_pure, "state"_a)
      .def_property_readonly("cutoffs", &DensityOperator::cutoffs)
      .def_property_readonly("num_modes", &DensityOperator::num_modes)
      .def_property_readonly("matrix", [](const DensityOperator& r) { return Eigen::MatrixXcd(r.matrix()); })
      .def_property_readonly("trace_deficit", &DensityOperator::trace_deficit)
      .def("trace", &DensityOperator::trace)
      .def("__repr__", [](const DensityOperator& r) {
        std::ostringstream o;
        o << "DensityOperator(modes=" << r.num_modes() << ", dim=" << r.dim() << ", trace_deficit=" << r.trace_deficit()
          << ")";
        return o.str();
      });

  py::class_<HeraldedResult>(m, "HeraldedResult")
      .def_property_readonly("state", [](const HeraldedResult& h) { return h.state; })
      .def_readonly("probability", &HeraldedResult::probability)
      .def_readonly("norm_deficit", &HeraldedResult::norm_deficit)
      .def_property_readonly("herald_pattern",
                             [](const HeraldedResult& h) {
                               std::vector<std::pair<std::string, int>> out;
                               for (const auto& o : h.herald_pattern) out.emplace_back(o.mode, o.photons);
                               return out;
                             })
      .def_property_readonly("is_pure", &HeraldedResult::is_pure);

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init(&make_params), "lam"_a = 0.4, "T"_a = 0.8, "kappa2"_a = 1.0, "eta"_a = 1.0, "M"_a = 2)
      .def_readwrite("lam", &ProtocolParams::lambda)
      .def_readwrite("T", &ProtocolParams::T)
      .def_readwrite("kappa2", &ProtocolParams::kappa2)
      .def_readwrite("eta", &ProtocolParams::eta)
      .def_readwrite("M", &ProtocolParams::M)
      .def_property_readonly("mu", &ProtocolParams::mu)
      .def_property_readonly("lambda_d", &ProtocolParams::lambda_d)
      .def("validate", &ProtocolParams::validate)
      .def("warnings", &ProtocolParams::warnings);

  py::enum_<SigmaFamily>(m, "SigmaFamily")
      .value("ATTENUATED", SigmaFamily::kAttenuated)
      .value("REDUCED_NOISE", SigmaFamily::kReducedNoise);

  // fock engine
  m.def("tensor_product", py::overload_cast<const AnyState&, const AnyState&>(&tensor_product), "a"_a, "b"_a);
  m.def("apply_beam_splitter", py::overload_cast<const FockState&, int, int, double>(&apply_beam_splitter), "state"_a,
        "mode_i"_a, "mode_j"_a, "theta"_a);
  m.def("apply_beam_splitter", py::overload_cast<const DensityOperator&, int, int, double>(&apply_beam_splitter),
        "rho"_a, "mode_i"_a, "mode_j"_a, "theta"_a);
  m.def("project_mode", py::overload_cast<const FockState&, int, int, double>(&project_mode), "state"_a, "mode"_a,
        "photons"_a, "floor"_a = kDefaultHeraldFloor);
  m.def("project_mode", py::overload_cast<const DensityOperator&, int, int, double>(&project_mode), "rho"_a, "mode"_a,
        "photons"_a, "floor"_a = kDefaultHeraldFloor);
  m.def("partial_trace", py::overload_cast<const DensityOperator&, std::vector<int>>(&partial_trace), "rho"_a,
        "keep_modes"_a);
  m.def("partial_trace", py::overload_cast<const FockState&, std::vector<int>>(&partial_trace), "state"_a,
        "keep_modes"_a);

  // state preparation
  m.def("make_tmsv", [](double lam, int cutoff) { return make_tmsv(lam, two(cutoff)); }, "lam"_a, "cutoff"_a);
  m.def("make_lossy_tmsv", [](double lam, double eta, int cutoff) { return make_lossy_tmsv(lam, eta, two(cutoff)); },
        "lam"_a, "eta"_a, "cutoff"_a);
  m.def("make_squeezed_thermal",
        [](double s, double nbar, int cutoff) { return make_squeezed_thermal(s, nbar, two(cutoff)); }, "s"_a, "nbar"_a,
        "cutoff"_a);
  m.def("apply_loss_channel", py::overload_cast<const DensityOperator&, int, double>(&apply_loss_channel), "rho"_a,
        "mode"_a, "eta"_a);
  m.def("apply_loss_channel", py::overload_cast<const FockState&, int, double>(&apply_loss_channel), "state"_a,
        "mode"_a, "eta"_a);
  m.def(
      "make_sigma",
      [](const ProtocolParams& p, int cutoff, SigmaFamily family) {
        SigmaState s = make_sigma(p, two(cutoff), family);
        return py::make_tuple(s.state, s.p_sigma);
      },
      "params"_a, "cutoff"_a, "family"_a = SigmaFamily::kAttenuated);
  m.def("p_sigma", &p_sigma, "params"_a);
  m.def(
      "thermal_params",
      [](const ProtocolParams& p) {
        ThermalDecomposition t = thermal_params(p);
        return py::dict("s"_a = t.s, "nbar"_a = t.nbar, "nbar_approx"_a = thermal_nbar_approx(p));
      },
      "params"_a);
  m.def(
      "reduced_noise_params",
      [](const ProtocolParams& p) {
        ReducedNoiseParams r = reduced_noise_params(p);
        return py::dict("nu_prime"_a = r.nu_prime, "nbar_prime"_a = r.nbar_prime);
      },
      "params"_a);

  // schemes
  m.def(
      "photon_subtract",
      [](const AnyState& s, int mode, double T, int m, bool circuit) {
        return photon_subtract(s, mode, T, m, circuit ? SubtractionPath::kCircuit : SubtractionPath::kOperator);
      },
      "state"_a, "mode"_a, "T"_a, "m"_a, "circuit"_a = false);
  m.def("run_original_two_copy", [](const ProtocolParams& p, int c) { return run_original_two_copy(p, c); },
        "params"_a, "cutoff"_a = 14);
  m.def(
      "run_simplified_two_copy",
      [](const ProtocolParams& p, int c, SigmaFamily f) { return run_simplified_two_copy(p, c, f); }, "params"_a,
      "cutoff"_a = 14, "family"_a = SigmaFamily::kAttenuated);
  m.def("rho_dist_formula", &rho_dist_formula, "rho"_a, "sigma"_a, "T"_a);
  m.def("gaussification_step", [](const AnyState& s) { return gaussification_step(s); }, "state"_a);
  m.def(
      "iterate_gaussification",
      [](const AnyState& s, int max_iters, double tol) {
        GaussificationOptions opt;
        opt.keep_iterates = false;
        GaussificationTrace t = iterate_gaussification(s, max_iters, tol, opt);
        py::list records;
        for (const auto& r : t.records) records.append(record_dict(r));
        return py::dict("final_state"_a = t.final_state, "records"_a = records, "converged"_a = t.converged,
                        "diverged"_a = t.diverged);
      },
      "state"_a, "max_iters"_a = 40, "tol"_a = 1e-8);
  m.def(
      "run_generalized_subtraction",
      [](double lam, double nu, double T, int c) { return run_generalized_subtraction(lam, nu, T, c); }, "lam"_a,
      "nu"_a, "T"_a, "cutoff"_a = 14);
  m.def("run_multicopy", [](const ProtocolParams& p, int M, int c) { return run_multicopy(p, M, c); }, "params"_a,
        "M"_a, "cutoff"_a = 10);
  m.def("multicopy_interferometer", &multicopy_interferometer, "M"_a);

  // measures
  m.def("squeezing_variance", &squeezing_variance, "state"_a);
  m.def("entanglement_entropy", &entanglement_entropy, "state"_a);
  m.def("fidelity_with_tmsv", &fidelity_with_tmsv, "state"_a, "omega"_a);
  m.def("gaussianity_residual", &gaussianity_residual, "state"_a);
  m.def("trace_distance", &trace_distance, "a"_a, "b"_a);
  m.def("covariance_matrix", [](const AnyState& s) { return Eigen::Matrix4d(covariance_summary(s).cov); }, "state"_a);

  // analytics
  m.def("v_tmsv", &v_tmsv, "lam"_a);
  m.def("v_sub_pure", &v_sub_pure, "mu"_a);
  m.def("v_dist", &v_dist, "mu"_a, "kappa2"_a);
  m.def("v_inf_pure", &v_inf_pure, "lam"_a, "T"_a);
  m.def("v_in_mixed", &v_in_mixed, "lam"_a, "eta"_a);
  m.def("v_sub_mixed", &v_sub_mixed, "lam"_a, "eta"_a, "T"_a);
  m.def("v_inf_mixed", &v_inf_mixed, "lam"_a, "eta"_a, "T"_a);
  m.def("normalization_kappa", &normalization_kappa, "mu"_a, "kappa2"_a);
  m.def("p_success_original", &p_success_original, "lam"_a, "T"_a);
  m.def("fidelity_tmsv", &fidelity_tmsv, "mu"_a, "kappa2"_a, "omega"_a);
  m.def("omega_star", &omega_star, "mu"_a, "kappa2"_a);
  m.def(
      "kappa_stationary_roots",
      [](double mu) {
        StationaryRoots r = kappa_stationary_roots(mu);
        return py::make_tuple(r.plus, r.minus);
      },
      "mu"_a);
  m.def("multicopy_amplitudes", &multicopy_amplitudes, "lam"_a, "T"_a, "M"_a, "n_max"_a);
  m.def("generalized_subtraction_amplitudes", &generalized_subtraction_amplitudes, "lam"_a, "nu"_a, "T"_a, "n_max"_a);
  m.def(
      "psi_out_prime",
      [](double lam, double T, double kappa2, int n_max) { return psi_out_prime(lam, T, kappa2, n_max).coefficients; },
      "lam"_a, "T"_a, "kappa2"_a, "n_max"_a);

  // optimize
  m.def(
      "optimal_kappa2",
      [](double mu, double T) {
        Kappa2Choice c = optimal_kappa2(mu, T);
        return py::dict("kappa2"_a = c.kappa2, "v_dist"_a = c.v_dist, "degenerate"_a = c.degenerate,
                        "numeric_fallback"_a = c.numeric_fallback, "exceeds_bound"_a = c.exceeds_bound);
      },
      "mu"_a, "T"_a = 0.0);
  m.def("optimal_omega", &optimal_omega, "mu"_a, "kappa2"_a);

  // acceptance checks
  m.def(
      "run_checks",
      [](std::vector<std::string> only) {
        cli::VerifyOptions opt;
        opt.only = std::move(only);
        std::vector<cli::CheckResult> res;
        {
          py::gil_scoped_release release;
          res = cli::run_checks(opt);
        }
        py::list out;
        for (const auto& r : res) {
          out.append(py::dict("criterion"_a = r.criterion, "name"_a = r.name, "passed"_a = r.passed,
                              "detail"_a = r.detail, "seconds"_a = r.seconds));
        }
        return out;
      },
      "only"_a = std::vector<std::string>{});
}
