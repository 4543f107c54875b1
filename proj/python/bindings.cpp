#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ail/algorithms.hpp"
#include "ail/certificates.hpp"
#include "ail/config.hpp"
#include "ail/error.hpp"
#include "ail/harness.hpp"

namespace py = pybind11;
using namespace ail;

namespace {

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["pass"] = v.pass;
  d["tight"] = v.tight;
  d["index"] = v.index;
  d["lhs"] = v.lhs;
  d["rhs"] = v.rhs;
  d["steps_checked"] = v.steps_checked;
  d["describe"] = v.describe();
  return d;
}

py::dict trace_dict(const Trace& t) {
  py::dict d;
  d["V"] = t.V;
  d["delays"] = t.delays;
  if (!t.W.empty()) d["W"] = t.W;
  if (!t.X.empty()) d["X"] = t.X;
  if (!t.gamma.empty()) d["gamma"] = t.gamma;
  return d;
}

Trace trace_from(const std::vector<double>& V, const std::vector<std::size_t>& delays) {
  Trace t;
  t.V = V;
  t.delays = delays.empty() ? std::vector<std::size_t>(V.size(), 0) : delays;
  t.validate();
  return t;
}

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d;
  d["pass"] = o.pass();
  d["verdict"] = o.verdict_line();
  d["report"] = o.report.entries();
  d["trace"] = trace_dict(o.result.trace);
  d["monitored"] = o.result.monitored;
  d["bound"] = o.result.bound;
  py::dict extra;
  for (const auto& e : o.result.extra) extra[py::str(e.name)] = py::make_tuple(e.monitored, e.bound);
  d["extra"] = extra;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ail, m) {
  m.doc() = "Rate certificates, trace verification and simulated asynchronous runs";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      std::string msg = std::string(errc_name(e.code())) + ": " + e.what();
      for (const auto& s : e.problems()) msg += "\n  " + s;
      py::set_error(error, msg.c_str());
    } catch (const Error& e) {
      py::set_error(error, (std::string(errc_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("lemma1_rate", [](double q, double p, std::size_t tau) {
    auto c = lemma1_rate({q, p, tau});
    if (!c.admissible) throw Error(Errc::inadmissible_parameters, c.reason);
    return c.param("rho");
  }, py::arg("q"), py::arg("p"), py::arg("tau"));

  m.def("corollary1_bound", [](double alpha, double beta, double q, double p, double k) {
    return corollary1_bound({alpha, beta}, q, p, k);
  }, py::arg("alpha"), py::arg("beta"), py::arg("q"), py::arg("p"), py::arg("k"));

  m.def("corollary1_eta", [](double alpha, double beta, double q, double p) {
    return corollary1_eta({alpha, beta}, q, p);
  }, py::arg("alpha"), py::arg("beta"), py::arg("q"), py::arg("p"));

  m.def("worst_case_trace", [](double q, double p, std::size_t tau, double V0, std::size_t K) {
    return worst_case_trace(q, p, tau, V0, K).V;
  }, py::arg("q"), py::arg("p"), py::arg("tau"), py::arg("V0"), py::arg("K"));

  m.def("verify_eq3", [](const std::vector<double>& V, double q, double p, const std::vector<std::size_t>& delays,
                         std::optional<std::size_t> window, double rel, double abs) {
    return verdict_dict(verify_trace(trace_from(V, delays), Eq3Form{q, p, window}, Tolerance{rel, abs}));
  }, py::arg("V"), py::arg("q"), py::arg("p"), py::arg("delays") = std::vector<std::size_t>{},
     py::arg("window") = std::nullopt, py::arg("rel") = 1e-9, py::arg("abs") = 1e-12);

  m.def("piag_gamma_max", &piag_gamma_max, py::arg("L"), py::arg("tau"));
  m.def("piag_theorem2_rate", &piag_theorem2_rate, py::arg("h"), py::arg("Q"), py::arg("tau"));
  m.def("sgd_gamma", [](const std::string& mode, double L, std::size_t tau_th, double eps, double sigma, double mu,
                        double horizon, double dist0) {
    auto kind = parse_sgd_gamma_mode(mode);
    if (!kind) throw Error(Errc::invalid_parameters, "unknown step-size mode '" + mode + "'");
    SgdGammaMode md;
    md.kind = *kind;
    md.eps = eps;
    md.sigma = sigma;
    md.mu = mu;
    md.horizon = horizon;
    md.dist0 = dist0;
    return sgd_gamma(md, L, tau_th);
  }, py::arg("mode"), py::arg("L"), py::arg("tau_th"), py::arg("eps") = 0.0, py::arg("sigma") = 0.0,
     py::arg("mu") = 0.0, py::arg("horizon") = 0.0, py::arg("dist0") = 0.0);
  m.def("arock_gamma", &arock_gamma, py::arg("h"), py::arg("tau"), py::arg("m"));
  m.def("arock_rate", &arock_rate, py::arg("h"), py::arg("c"), py::arg("tau"), py::arg("m"));

  m.def("parse_config", [](const std::string& text) { return render_config(parse_config(text)); },
        py::arg("text"), "Validates a config and returns its canonical rendering.");
  m.def("run_config", [](const std::string& text) { return outcome_dict(run_single(parse_config(text))); },
        py::arg("text"), "Runs a rate, run or verify config in memory.");
  m.def("execute_config", [](const std::string& text, const std::string& out_dir) {
    auto rep = execute(parse_config(text), out_dir);
    py::dict d;
    d["pass"] = rep.pass();
    d["files"] = rep.files;
    d["report"] = rep.kv.entries();
    return d;
  }, py::arg("text"), py::arg("out_dir"), "Runs a config and writes its CSV and report files.");
}
