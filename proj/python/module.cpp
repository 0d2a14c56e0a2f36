#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cofrag/config.hpp"
#include "cofrag/diagnostics.hpp"
#include "cofrag/kernels.hpp"
#include "cofrag/runner.hpp"
#include "cofrag/solver.hpp"
#include "cofrag/weights.hpp"

namespace py = pybind11;
using namespace cofrag;

namespace {

Config config_from_text(const std::string& text) {
  return parse_config_or_throw(text);
}

py::dict series_dict(const MomentSeries& s) {
  py::dict d;
  d["t"] = s.times;
  d["M_m0"] = s.M_m0;
  d["M_0"] = s.M_0;
  d["M_1"] = s.M_1;
  d["M_2"] = s.M_2;
  d["M_2pd"] = s.M_2pd;
  d["W_functional"] = s.W_fn;
  d["P_m0"] = s.P_m0;
  d["P_mid"] = s.P_mid;
  d["subgrid_fraction"] = s.subgrid_frac;
  return d;
}

py::dict verdict_dict(const HypothesisVerdict& v) {
  py::dict d;
  d["holds"] = v.holds;
  d["exact"] = v.exact;
  d["constant"] = v.constant;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cofrag, m) {
  m.doc() = "coagulation-fragmentation solver bindings";

  m.def(
      "daughter_partial_moment",
      [](double nu, double order, double x_lo, double x_hi, double y) {
        return daughter_partial_moment(DaughterDist(nu), order, x_lo, x_hi, y);
      },
      py::arg("nu"), py::arg("order"), py::arg("x_lo"), py::arg("x_hi"),
      py::arg("y"));

  m.def(
      "eval_kernel",
      [](const std::string& text, double x, double y) {
        return eval_K(make_kernel_spec(config_from_text(text)).coag, x, y);
      },
      py::arg("config"), py::arg("x"), py::arg("y"));

  m.def(
      "eval_frag_rate",
      [](const std::string& text, double x) {
        return eval_a(make_kernel_spec(config_from_text(text)).frag, x);
      },
      py::arg("config"), py::arg("x"));

  m.def("weight_value", &LogLogWeight::value, py::arg("x"));
  m.def("weight_deriv", &LogLogWeight::deriv, py::arg("x"));
  m.def("weight_second", &LogLogWeight::second, py::arg("x"));
  m.def("weight_gap", &LogLogWeight::gap, py::arg("x"));

  m.def(
      "run",
      [](const std::string& text) {
        Config cfg = config_from_text(text);
        RunResult res = run(make_scenario(cfg));
        py::dict d;
        d["series"] = series_dict(res.series);
        d["rho"] = res.rho;
        d["mass_drift"] = res.mass_drift;
        d["subgrid_ok"] = res.subgrid_ok;
        d["steps"] = res.steps;
        return d;
      },
      py::arg("config"));

  m.def(
      "two_run",
      [](const std::string& text) {
        Config cfg = config_from_text(text);
        TwoRunResult tr = two_run_distance(make_scenario(cfg), cfg.epsilon);
        py::dict d;
        d["t"] = tr.times;
        d["distance"] = tr.distance;
        d["initial_distance"] = tr.initial_distance;
        return d;
      },
      py::arg("config"));

  m.def(
      "compute_kappa",
      [](const std::string& text) {
        Config cfg = config_from_text(text);
        KappaResult kr = compute_kappa(make_kernel_spec(cfg), cfg.delta);
        py::dict d;
        d["kappa"] = kr.kappa;
        d["Y"] = kr.Y;
        d["attained_by"] = kr.attained_by;
        return d;
      },
      py::arg("config"));

  m.def(
      "verify_hypotheses",
      [](const std::string& text, double R, std::size_t budget) {
        CertificationReport c =
            verify_hypotheses(make_kernel_spec(config_from_text(text)), R,
                              budget);
        py::dict d;
        d["linear_growth"] = verdict_dict(c.linear_growth);
        d["small_size_ratio"] = verdict_dict(c.small_size_ratio);
        d["frag_small_size"] = verdict_dict(c.frag_small_size);
        d["mixed_regime"] = verdict_dict(c.mixed_regime);
        d["R"] = c.R;
        d["all_core"] = c.all_core();
        return d;
      },
      py::arg("config"), py::arg("R") = 1.0, py::arg("sample_budget") = 20000);

  m.def(
      "admissible_m0_interval",
      [](double alpha, double beta, double gamma, double nu) {
        Interval iv = admissible_m0_interval(alpha, beta, gamma, nu);
        py::dict d;
        d["empty"] = iv.empty;
        d["lo"] = iv.lo;
        d["hi"] = iv.hi;
        return d;
      },
      py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("nu"));

  m.def("serialize_config",
        [](const std::string& text) {
          return serialize_config(config_from_text(text));
        },
        py::arg("config"));
}
