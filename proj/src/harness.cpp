#include "ail/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <sstream>
#include <thread>

#include "ail/error.hpp"
#include "ail/rng.hpp"
#include "run_common.hpp"

namespace ail {

namespace fs = std::filesystem;

SeedPlan SeedPlan::from_root(std::uint64_t root) {
  CounterRng r(root);
  return {r.child(1).key(), r.child(2).key(), r.child(3).key(), r.child(4).key()};
}

std::optional<Violation> RunOutcome::violation() const {
  std::optional<Violation> best;
  auto consider = [&](const std::string& name, const Verdict& v) {
    if (v.pass) return;
    if (!best || v.index < best->verdict.index) best = Violation{name, v};
  };
  consider("bound", result.verdict);
  if (result.recursion) consider("recursion", *result.recursion);
  for (const auto& e : result.extra) consider(e.name, e.verdict);
  return best;
}

std::string RunOutcome::verdict_line() const {
  auto v = violation();
  return v ? "FAIL k=" + std::to_string(v->verdict.index) : "PASS";
}

bool Report::pass() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.pass(); });
}

std::string default_output_dir(const RunConfig& c) {
  if (auto o = c.output()) return *o;
  if (const char* env = std::getenv("ASYNC_ITER_LAB_OUT"); env && *env) return env;
  return "out";
}

std::string bound_to_csv(const std::vector<double>& bound) { return series_to_csv("bound", bound); }

std::string series_to_csv(const std::string& name, const std::vector<double>& values) {
  std::string s = "k," + name + "\n";
  for (std::size_t k = 0; k < values.size(); ++k) s += std::to_string(k) + "," + fmt_real(values[k]) + "\n";
  return s;
}

namespace {

Tolerance tolerance_of(const RunConfig& c) {
  Tolerance t;
  t.rel = c.real("tolerance", "rel", t.rel);
  t.abs = c.real("tolerance", "abs", t.abs);
  return t;
}

[[noreturn]] void rethrow_with_context(const std::string& id, const Error& e) {
  if (auto* ce = dynamic_cast<const ConfigError*>(&e)) throw *ce;
  throw Error(e.code(), id + ": " + e.what());
}

Vec x0_for(const RunConfig& c, const Vec& x_star) {
  if (auto s = c.real("problem", "x0_shift")) return x_star + Vec::Constant(x_star.size(), *s);
  return Vec::Zero(x_star.size());
}

SmoothSum build_smooth(const RunConfig& c, const SeedPlan& seeds) {
  const std::string fam = c.text("problem", "family", "");
  const std::size_t n = c.count("problem", "n", 1), d = c.count("problem", "d", 1);
  if (fam == "least-squares") return make_least_squares(n, d, seeds.problem, c.count("problem", "rank", 0));
  if (fam == "logistic") return make_logistic(n, d, seeds.problem);
  if (fam == "quadratic") {
    SmoothSum f = make_quadratic(d, c.real("problem", "mu", 1.0), c.real("problem", "L", 1.0), seeds.problem);
    if (c.flag("problem", "centered", false)) return SmoothSum::quadratic(f.A(), Vec::Zero(static_cast<Eigen::Index>(d)));
    return f;
  }
  throw Error(Errc::unsupported_family, "problem family '" + fam + "' is not a smooth finite sum");
}

Regularizer build_regularizer(const RunConfig& c) {
  const std::string kind = c.text("problem", "regularizer", "none");
  if (kind == "l1") return Regularizer::l1(c.real("problem", "lambda", 0.0));
  if (kind == "sq-l2") return Regularizer::sq_l2(c.real("problem", "lambda", 0.0));
  if (kind == "elastic") return Regularizer::elastic(c.real("problem", "lambda", 0.0), c.real("problem", "lambda2", 0.0));
  if (kind == "box")
    return Regularizer::box(Vec::Constant(1, c.real("problem", "lo", 0.0)), Vec::Constant(1, c.real("problem", "hi", 0.0)));
  return Regularizer::none();
}

FixedPointOperator build_operator(const RunConfig& c, const SeedPlan& seeds) {
  const std::string fam = c.text("problem", "family", "");
  const std::size_t d = c.count("problem", "d", 1), m = c.count("problem", "blocks", 1);
  const double mod = c.real("problem", "c", 0.5);
  Partition part = Partition::even(d, m);
  std::optional<FixedPointOperator> op;
  if (fam == "affine-euclidean") op = make_affine_euclidean(d, mod, seeds.problem, part);
  else if (fam == "affine-block-max") op = make_affine_block_max(d, mod, seeds.problem, part);
  else throw Error(Errc::unsupported_family, "problem family '" + fam + "' is not a fixed-point operator");
  // T(x) = C x, fixed point at the origin
  if (c.flag("problem", "centered", false))
    return FixedPointOperator::affine(op->C(), Vec::Zero(static_cast<Eigen::Index>(d)), part, op->norm_kind(), op->modulus());
  return *op;
}

DelaySpec delay_spec(const RunConfig& c, const SeedPlan& seeds) {
  const std::string m = c.text("delay", "model", "");
  const std::size_t tau = c.count("delay", "tau", 0);
  if (m == "constant") return DelaySpec::constant(tau);
  if (m == "uniform") return DelaySpec::uniform_random(tau, seeds.delay);
  if (m == "linear") return DelaySpec::linear_growth(c.real("delay", "alpha", 0.0), c.real("delay", "beta", 0.0));
  if (m == "sqrt-floor") return DelaySpec::sqrt_floor();
  if (m == "two-speed") return DelaySpec::two_speed(c.count("delay", "M", 1), c.real("delay", "ratio", 1.0), seeds.delay);
  throw Error(Errc::unsupported_family, "delay model '" + m + "' does not give a delay sequence");
}

std::optional<WorkerModel> worker_model(const RunConfig& c, const SeedPlan& seeds) {
  const std::string m = c.text("delay", "model", "");
  if (m == "two-speed") return WorkerModel::two_speed(c.count("delay", "M", 1), c.real("delay", "ratio", 1.0), seeds.delay);
  if (m == "workers-deterministic") return WorkerModel::deterministic(c.reals("delay", "times"));
  if (m == "workers-exponential") return WorkerModel::exponential(c.reals("delay", "rates"), seeds.delay);
  return std::nullopt;
}

// Re-evaluates the checks when the config overrides the default tolerances.
void apply_tolerance(const RunConfig& c, RunResult& r, std::size_t every = 0) {
  if (auto m = c.real("tolerance", "margin")) r.margin = *m;
  if (!c.doc.count("tolerance")) return;
  const Tolerance tol = tolerance_of(c);
  r.verdict = detail::check_bound(r.monitored, r.bound, r.margin, tol, every);
  for (auto& e : r.extra) e.verdict = detail::check_bound(e.monitored, e.bound, r.margin, tol, every);
  if (r.form) r.recursion = verify_trace(r.trace, *r.form, tol);
}

RunResult run_method(const RunConfig& c, const SeedPlan& seeds, KvReport& rep) {
  const std::string alg = c.text("algorithm", "name", "");
  const std::size_t K = *c.K();
  const std::string rule = c.text("algorithm", "gamma_rule", "");

  if (alg == "arock" || alg == "totally-async") {
    FixedPointOperator op = build_operator(c, seeds);
    const Vec x0 = x0_for(c, op.fixed_point());
    if (alg == "arock") {
      SharedMemoryModel shm;
      shm.m = op.partition().m();
      shm.tau = c.count("delay", "tau", 0);
      shm.law = c.text("delay", "jlaw", "full-window") == "random-subset" ? SharedMemoryModel::JLaw::random_subset
                                                                          : SharedMemoryModel::JLaw::full_window;
      shm.seed = seeds.delay;
      ArockOptions opt;
      opt.margin = c.real("tolerance", "margin", opt.margin);
      opt.checkpoint_every = c.count("algorithm", "checkpoint_every", 0);
      opt.diagnostics = c.flag("algorithm", "diagnostics", true);
      auto run = arock(op, shm, c.real("algorithm", "h", 1.0), K, derive_seeds(seeds.algorithm, c.seed_count()), x0, opt);
      apply_tolerance(c, run.mean, opt.checkpoint_every);
      return std::move(run.mean);
    }
    const std::size_t m = op.partition().m();
    AgentSchedule sched = c.text("delay", "model", "") == "agents-partial"
                              ? AgentSchedule::partial(m, c.count("delay", "B", 0), c.count("delay", "D", 0), seeds.delay)
                              : AgentSchedule::linear_growth(m, c.real("delay", "alpha", 0.0), c.real("delay", "beta", 0.0), seeds.delay);
    RunResult r = totally_async(op, sched, K, x0);
    apply_tolerance(c, r);
    return r;
  }

  SmoothSum F = build_smooth(c, seeds);
  const Vec x0 = x0_for(c, F.x_star());
  std::optional<double> gamma = c.real("algorithm", "gamma");

  if (alg == "delayed-gd") {
    if (rule == "two-over-mu-plus-L") {
      // the quadratic generator places its extreme eigenvalues exactly at the declared mu and L
      const bool declared = c.text("problem", "family", "") == "quadratic";
      gamma = declared ? 2.0 / (c.real("problem", "mu", 1.0) + c.real("problem", "L", 1.0)) : 2.0 / (F.mu() + F.L_true());
    }
    if (rule == "inverse-L") gamma = 1.0 / F.L_true();
    DelaySchedule s = realize(delay_spec(c, seeds), K);
    auto lyap = c.text("algorithm", "lyapunov", "sq-dist") == "fn-gap" ? GdLyapunov::fn_gap : GdLyapunov::sq_dist;
    RunResult r = delayed_gd(F, *gamma, s.delays, K, lyap, x0);
    apply_tolerance(c, r);
    return r;
  }
  if (alg == "pg") {
    if (rule == "inverse-L") gamma = 1.0 / F.L_true();
    RunResult r = pg(F, build_regularizer(c), *gamma, K, x0);
    apply_tolerance(c, r);
    return r;
  }
  if (alg == "piag") {
    PiagOptions opt;
    opt.mode = c.text("algorithm", "mode", "theorem1") == "theorem2" ? PiagMode::theorem2 : PiagMode::theorem1;
    opt.h = c.real("algorithm", "h", 1.0);
    auto workers = worker_model(c, seeds);
    PiagOrder order = workers ? PiagOrder::server(std::move(*workers)) : PiagOrder::cyclic();
    if (rule == "piag-max") gamma = opt.h * piag_gamma_max(F.L(), F.n() - 1);
    RunResult r = piag(F, build_regularizer(c), *gamma, std::move(order), K, x0, opt);
    apply_tolerance(c, r);
    return r;
  }
  if (alg == "async-sgd") {
    StochasticOracle oracle{F, c.text("problem", "noise", "gaussian") == "sampling" ? StochasticOracle::Noise::finite_sum_sampling
                                                                                     : StochasticOracle::Noise::additive_gaussian,
                            c.real("problem", "sigma", 0.0), seeds.oracle};
    SgdDelaySource src;
    src.workers = worker_model(c, seeds);
    std::size_t tau_th = 0;
    if (auto t = c.count("algorithm", "tau_th")) {
      tau_th = static_cast<std::size_t>(*t);
    } else if (src.workers) {
      tau_th = sgd_tau_threshold(src.workers->M());
    } else {
      auto cap = delay_spec(c, seeds).cap();
      if (!cap) throw Error(Errc::invalid_parameters, "algorithm.tau_th is needed for a delay model without a cap");
      tau_th = *cap;
    }
    if (!src.workers) src.schedule = realize(delay_spec(c, seeds), K);
    SgdOptions opt;
    opt.regime = c.text("algorithm", "regime", "strongly-convex") == "convex" ? SgdRegime::convex : SgdRegime::strongly_convex;
    opt.margin = c.real("tolerance", "margin", opt.margin);
    opt.tau_th = tau_th;
    if (!rule.empty()) {
      SgdGammaMode mode;
      mode.kind = *parse_sgd_gamma_mode(rule);
      mode.eps = c.real("algorithm", "eps", 0.0);
      mode.sigma = oracle.sigma;
      mode.mu = F.mu();
      mode.horizon = c.real("algorithm", "horizon", 0.0);
      mode.dist0 = (x0 - F.x_star()).norm();
      gamma = sgd_gamma(mode, F.L_true(), tau_th);
    }
    StepSizePolicy policy = c.text("algorithm", "policy", "constant") == "delay-adaptive"
                                ? StepSizePolicy::delay_adaptive(*gamma, tau_th)
                                : StepSizePolicy::constant(*gamma);
    auto run = async_sgd(oracle, src, policy, K, derive_seeds(seeds.algorithm, c.seed_count()), x0, opt);
    apply_tolerance(c, run.mean);
    double mean_final = 0.0;
    for (double v : run.final_sq_dist) mean_final += v / static_cast<double>(run.final_sq_dist.size());
    rep.set("result.final_sq_dist_mean", mean_final);
    return std::move(run.mean);
  }
  throw Error(Errc::semantic_error, "unknown algorithm '" + alg + "'");
}

// No certificate exists: report the failed admissibility condition lhs < rhs at k = 0.
Verdict inadmissible(double lhs, double rhs) {
  Verdict v;
  v.pass = false;
  v.tight = false;
  v.kind = ViolationKind::bound;
  v.lhs = lhs;
  v.rhs = rhs;
  return v;
}

RunResult run_rate(const RunConfig& c, KvReport& rep) {
  const std::string lemma = c.text("rate", "lemma", "1");
  const double q = c.real("rate", "q", 0.0), p = c.real("rate", "p", 0.0), V0 = c.real("rate", "V0", 1.0);
  const std::size_t tau = c.count("rate", "tau", 0);
  const Tolerance tol = tolerance_of(c);
  RunResult r;
  auto put_cert = [&](const RateCertificate& cert) {
    rep.set("cert.kind", certificate_kind_name(cert.kind));
    rep.set("cert.admissible", cert.admissible);
    if (!cert.reason.empty()) rep.set("cert.reason", cert.reason);
    for (const auto& [k, v] : cert.params) rep.set("cert." + k, v);
  };

  if (lemma == "lemma4") {
    CoupledRecursion rec;
    rec.flavor = c.text("rate", "flavor", "unit-q") == "contractive" ? CoupledFlavor::contractive : CoupledFlavor::unit_q;
    rec.q = CoeffSeq::constant(rec.flavor == CoupledFlavor::unit_q ? 1.0 : q);
    rec.q_floor = rec.flavor == CoupledFlavor::unit_q ? 0.0 : q;
    rec.p = CoeffSeq::constant(p);
    rec.r = CoeffSeq::constant(c.real("rate", "r", 0.0));
    rec.e = CoeffSeq::constant(c.real("rate", "e", 0.0));
    rec.tau = tau;
    const std::size_t K = *c.K();
    auto adm = lemma4_admissible(rec, K);
    rep.set("cert.kind", "summation_bound");
    rep.set("cert.admissible", adm.ok);
    if (!adm.ok) {
      rep.set("cert.reason", adm.reason);
      r.verdict = inadmissible(HUGE_VAL, 0.0);
      return r;
    }
    auto b = lemma4_bounds(rec, V0, K);
    r.bound = b.v_next;
    r.monitored.assign(b.v_next.size(), 0.0);
    r.verdict = detail::check_bound(r.monitored, r.bound, 1.0, tol);
    rep.set("cert.v_bound", b.v_next.back());
    rep.set("cert.x_sum_bound", b.x_sum.back());
    return r;
  }

  std::optional<std::size_t> K = c.K();
  if (lemma == "1") {
    auto cert = lemma1_rate({q, p, tau});
    put_cert(cert);
    if (!cert.admissible) r.verdict = inadmissible(q + p, 1.0);
    if (!K) return r;
    r.trace = worst_case_trace(q, p, tau, V0, *K);
    r.bound.assign(*K + 1, HUGE_VAL);
    if (cert.admissible) {
      const double rho = cert.param("rho");
      for (std::size_t k = 0; k <= *K; ++k) r.bound[k] = std::pow(rho, static_cast<double>(k)) * V0;
    }
    r.form = Eq3Form{q, p, std::nullopt};
  } else {
    GrowthDelaySpec g{c.real("rate", "alpha", 0.0), c.real("rate", "beta", 0.0)};
    auto cert = corollary1_certificate(g, q, p);
    put_cert(cert);
    if (!cert.admissible) r.verdict = inadmissible(q + p, 1.0);
    if (!K) return r;
    std::vector<std::size_t> delays(*K + 1);
    for (std::size_t k = 0; k <= *K; ++k)
      delays[k] = std::min(k, static_cast<std::size_t>(std::floor(g.alpha * static_cast<double>(k) + g.beta)));
    r.trace = worst_case_trace(q, p, delays, V0);
    r.bound.assign(*K + 1, HUGE_VAL);
    if (cert.admissible)
      for (std::size_t k = 0; k <= *K; ++k) r.bound[k] = corollary1_bound(g, q, p, static_cast<double>(k)) * V0;
    r.form = Eq3Form{q, p, std::nullopt};
  }
  r.monitored = r.trace.V;
  if (r.verdict.pass) r.verdict = detail::check_bound(r.monitored, r.bound, 1.0, tol);
  r.recursion = verify_trace(r.trace, *r.form, tol);
  return r;
}

RunResult run_verify(const RunConfig& c, KvReport& rep) {
  const Tolerance tol = tolerance_of(c);
  RunResult r;
  r.trace = trace_from_csv(read_file(c.text("verify", "trace", "")));
  std::optional<std::size_t> window;
  if (auto w = c.count("verify", "window")) window = static_cast<std::size_t>(*w);
  if (c.text("verify", "form", "eq3") == "eq3") {
    r.form = Eq3Form{c.real("verify", "q", 0.0), c.real("verify", "p", 0.0), window};
  } else {
    CoupledRecursion rec;
    const bool contractive = c.text("verify", "flavor", "unit-q") == "contractive";
    rec.flavor = contractive ? CoupledFlavor::contractive : CoupledFlavor::unit_q;
    rec.q = CoeffSeq::constant(contractive ? c.real("verify", "q", 1.0) : 1.0);
    rec.q_floor = contractive ? c.real("verify", "q_floor", 0.0) : 0.0;
    rec.p = CoeffSeq::constant(c.real("verify", "p", 0.0));
    rec.r = CoeffSeq::constant(c.real("verify", "r", 0.0));
    rec.e = CoeffSeq::constant(c.real("verify", "e", 0.0));
    rec.tau = c.count("verify", "tau", 0);
    r.form = Eq4Form{rec, window};
  }
  r.recursion = verify_trace(r.trace, *r.form, tol);
  r.monitored = r.trace.V;
  r.bound.assign(r.trace.size(), HUGE_VAL);
  if (auto rho = c.real("verify", "rho"); rho && !r.trace.V.empty())
    for (std::size_t k = 0; k < r.trace.size(); ++k) r.bound[k] = std::pow(*rho, static_cast<double>(k)) * r.trace.V[0];
  r.verdict = detail::check_bound(r.monitored, r.bound, 1.0, tol);
  rep.set("verify.equality", r.recursion->pass && r.recursion->tight);
  return r;
}

void fill_report(RunOutcome& o, const RunConfig& c) {
  const RunResult& r = o.result;
  KvReport& rep = o.report;
  rep.set("config.kind", experiment_kind_name(c.kind()));
  rep.set("config.seed", c.seed());
  if (auto K = c.K()) rep.set("config.K", static_cast<std::uint64_t>(*K));
  rep.set("verdict", o.pass() ? "PASS" : "FAIL");
  if (auto v = o.violation()) {
    rep.set("violation.series", v->series);
    rep.set("violation.k", static_cast<std::uint64_t>(v->verdict.index));
    rep.set("violation.lhs", v->verdict.lhs);
    rep.set("violation.rhs", v->verdict.rhs);
    rep.set("violation.kind", v->verdict.kind == ViolationKind::recursion    ? "recursion"
                              : v->verdict.kind == ViolationKind::non_finite ? "non-finite"
                                                                             : "bound");
  }
  rep.set("bound.pass", r.verdict.pass);
  rep.set("bound.steps_checked", static_cast<std::uint64_t>(r.verdict.steps_checked));
  rep.set("bound.margin", r.margin);
  if (r.recursion) {
    rep.set("recursion.pass", r.recursion->pass);
    rep.set("recursion.tight", r.recursion->pass && r.recursion->tight);
    rep.set("recursion.steps_checked", static_cast<std::uint64_t>(r.recursion->steps_checked));
  }
  for (const auto& e : r.extra) {
    rep.set("extra." + e.name + ".pass", e.verdict.pass);
    rep.set("extra." + e.name + ".steps_checked", static_cast<std::uint64_t>(e.verdict.steps_checked));
  }
  if (!r.trace.delays.empty()) {
    auto st = schedule_stats(r.trace.delays);
    rep.set("schedule.tau_max", static_cast<std::uint64_t>(st.tau_max));
    rep.set("schedule.tau_ave", st.tau_ave);
  }
  if (!r.monitored.empty()) rep.set("result.monitored_final", r.monitored.back());
  rep.merge(r.metadata, "meta.");
}

}  // namespace

RunOutcome run_single(const RunConfig& c, const std::string& id) {
  RunOutcome o;
  o.id = id;
  try {
    switch (c.kind()) {
      case ExperimentKind::rate: o.result = run_rate(c, o.report); break;
      case ExperimentKind::verify: o.result = run_verify(c, o.report); break;
      case ExperimentKind::run: o.result = run_method(c, SeedPlan::from_root(c.seed()), o.report); break;
      case ExperimentKind::sweep: throw Error(Errc::semantic_error, "a sweep is not a single run");
    }
  } catch (const Error& e) {
    rethrow_with_context(id, e);
  }
  fill_report(o, c);
  return o;
}

namespace {

void write_run(RunOutcome& o, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
  const RunResult& r = o.result;
  auto put = [&](const std::string& name, const std::string& body) {
    write_file((dir / name).string(), body);
    o.files.push_back(name);
  };
  if (!r.trace.V.empty()) put("trace.csv", trace_to_csv(r.trace));
  if (!r.bound.empty()) put("bound.csv", bound_to_csv(r.bound));
  if (!r.monitored.empty()) put("monitored.csv", series_to_csv("monitored", r.monitored));
  o.files.push_back("report.kv");
  for (const auto& f : o.files) o.report.set("files." + f.substr(0, f.find('.')), f);
  write_file((dir / "report.kv").string(), o.report.render());
}

std::string pad3(std::size_t i) {
  std::string s = std::to_string(i);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

Report execute(const RunConfig& c, const std::string& out_dir) {
  Report rep;
  const fs::path out(out_dir);
  if (c.kind() != ExperimentKind::sweep) {
    RunOutcome o = run_single(c);
    write_run(o, out);
    rep.kv = o.report;
    rep.files = o.files;
    rep.runs.push_back(std::move(o));
    return rep;
  }

  const std::string param = c.text("sweep", "param", "");
  const auto dot = param.find('.');
  const std::string sec = param.substr(0, dot), key = param.substr(dot + 1);
  std::vector<std::string> values;
  const std::string raw_values = c.text("sweep", "values", "");
  for (auto v : split(raw_values, ',')) values.emplace_back(trim(v));

  std::vector<RunConfig> points;
  for (const auto& v : values) {
    RunConfig p = c;
    p.doc.erase("sweep");
    p.doc["experiment"]["kind"] = c.text("sweep", "base", "run");
    p.set(sec, key, v);
    validate_config(p);
    points.push_back(std::move(p));
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + out.string() + ": " + ec.message());
  std::vector<std::optional<RunOutcome>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        RunOutcome o = run_single(points[i], "run-" + pad3(i));
        write_run(o, out / o.id);
        results[i] = std::move(o);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(c.count("sweep", "parallel", 1), points.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // assembled in run order regardless of completion order
  const bool with_rho = std::all_of(results.begin(), results.end(), [](const auto& o) { return o->report.get("cert.rho").has_value(); });
  std::string csv = std::string("index,value,verdict,first_violation") + (with_rho ? ",rho" : "") + "\n";
  rep.kv.set("config.kind", "sweep");
  rep.kv.set("sweep.param", param);
  rep.kv.set("sweep.points", static_cast<std::uint64_t>(points.size()));
  for (std::size_t i = 0; i < results.size(); ++i) {
    RunOutcome& o = *results[i];
    rep.kv.set("run." + pad3(i) + ".value", values[i]);
    rep.kv.merge(o.report, "run." + pad3(i) + ".");
    auto v = o.violation();
    csv += std::to_string(i) + "," + values[i] + "," + (v ? "FAIL" : "PASS") + "," + (v ? std::to_string(v->verdict.index) : "") +
           (with_rho ? "," + *o.report.get("cert.rho") : "") + "\n";
    rep.runs.push_back(std::move(o));
  }
  rep.kv.set("verdict", rep.pass() ? "PASS" : "FAIL");
  write_file((out / "sweep.csv").string(), csv);
  rep.files = {"sweep.csv", "report.kv"};
  rep.kv.set("files.sweep", "sweep.csv");
  rep.kv.set("files.report", "report.kv");
  write_file((out / "report.kv").string(), rep.kv.render());
  return rep;
}

}  // namespace ail
