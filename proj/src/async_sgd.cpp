#include <algorithm>
#include <cmath>
#include <deque>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"
#include "run_common.hpp"

namespace ail {

namespace {

struct SeedOutcome {
  Trace trace;
  std::vector<double> avg_gap;  // F(xbar_k) - F*
  Vec x_final;
  std::vector<std::size_t> iterate_index;
  std::vector<Vec> iterates;
};

SeedOutcome run_seed(const StochasticOracle& oracle, const SgdDelaySource& src, const StepSizePolicy& policy,
                     std::size_t K, const Vec& x0, bool track_average) {
  const SmoothSum& F = oracle.base;
  const Vec& xs = F.x_star();
  const double fstar = F.F_star();
  SeedOutcome out;
  Trace& t = out.trace;
  t.V.resize(K + 1);
  t.W.resize(K + 1);
  t.X.resize(K + 1);
  t.delays.resize(K + 1);
  t.gamma.resize(K + 1);
  if (track_average) out.avg_gap.resize(K + 1);

  std::optional<WorkerModel> workers = src.workers;
  std::vector<Vec> held;
  if (workers) held.assign(workers->M(), x0);
  std::deque<Vec> history;
  std::size_t cap = 0;
  if (!workers) cap = detail::max_of(std::vector<std::size_t>(src.schedule->delays.begin(),
                                                              src.schedule->delays.begin() + static_cast<std::ptrdiff_t>(K + 1)));

  const std::size_t stride = thinning_stride(K);
  Vec x = x0;
  Vec weighted = Vec::Zero(x0.size());
  double gsum = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k % stride == 0 || k == K) {
      out.iterate_index.push_back(k);
      out.iterates.push_back(x);
    }
    std::size_t delay = 0, w = 0;
    if (workers) {
      auto a = workers->next_arrival();
      delay = a.delay;
      w = a.worker;
    } else {
      history.push_front(x);
      if (history.size() > cap + 1) history.pop_back();
      delay = src.schedule->delays[k];
    }
    const Vec& stale = workers ? held[w] : history[delay];
    double gk = policy.at(delay);
    t.delays[k] = delay;
    t.gamma[k] = gk;
    t.V[k] = (x - xs).squaredNorm();
    t.X[k] = 2.0 * gk * (F.value(x) - fstar);
    t.W[k] = gk * gk * F.gradient(stale).squaredNorm();
    if (track_average) {
      weighted += gk * x;
      gsum += gk;
      out.avg_gap[k] = gsum > 0.0 ? F.value(weighted / gsum) - fstar : HUGE_VAL;
    }
    Vec g = stochastic_gradient(oracle, stale, k);
    Vec next = x - gk * g;
    if (workers) held[w] = next;
    if (k < K) x = std::move(next);
  }
  double total = 0.0;
  for (double g : t.gamma) total += g;
  if (total == 0.0) throw Error(Errc::degenerate_run, "every gradient was dropped (sum of step sizes is zero)");
  out.x_final = x;
  return out;
}

}  // namespace

SgdRun async_sgd(const StochasticOracle& oracle, const SgdDelaySource& src, const StepSizePolicy& policy,
                 std::size_t K, const std::vector<std::uint64_t>& seeds, const Vec& x0, const SgdOptions& opt) {
  policy.validate();
  if (seeds.empty()) throw Error(Errc::invalid_parameters, "async SGD needs at least one seed");
  if (!src.workers && !src.schedule) throw Error(Errc::invalid_parameters, "async SGD needs a worker model or a schedule");
  if (src.schedule && src.schedule->delays.size() < K + 1)
    throw Error(Errc::invalid_parameters, "delay schedule shorter than the horizon");
  if (!(oracle.sigma >= 0.0)) throw Error(Errc::invalid_parameters, "sigma must be non-negative");
  const SmoothSum& F = oracle.base;
  if (static_cast<std::size_t>(x0.size()) != F.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");
  const bool convex = opt.regime == SgdRegime::convex;
  if (!convex && !(F.mu() > 0.0)) throw Error(Errc::unsupported_problem, "strongly convex regime needs mu > 0");

  SgdRun run;
  RunResult& r = run.mean;
  r.margin = opt.margin;
  Trace& mean = r.trace;
  mean.V.assign(K + 1, 0.0);
  mean.W.assign(K + 1, 0.0);
  mean.X.assign(K + 1, 0.0);
  std::vector<double> avg_gap(K + 1, 0.0);
  const double inv = 1.0 / static_cast<double>(seeds.size());
  std::size_t tau_max = 0;
  double tau_ave_max = 0.0;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    StochasticOracle o = oracle;
    o.seed = CounterRng(oracle.seed).child(seeds[si]).key();
    auto s = run_seed(o, src, policy, K, x0, convex);
    for (std::size_t k = 0; k <= K; ++k) {
      mean.V[k] += s.trace.V[k] * inv;
      mean.W[k] += s.trace.W[k] * inv;
      mean.X[k] += s.trace.X[k] * inv;
      if (convex) avg_gap[k] += s.avg_gap[k] * inv;
    }
    auto st = schedule_stats(s.trace.delays);
    tau_max = std::max(tau_max, st.tau_max);
    tau_ave_max = std::max(tau_ave_max, st.tau_ave);
    run.tau_ave.push_back(st.tau_ave);
    run.final_sq_dist.push_back(s.trace.V[K]);
    if (si == 0) {
      // the delay source is shared by all seeds, so delays and step sizes are too
      mean.delays = s.trace.delays;
      mean.gamma = s.trace.gamma;
      r.iterate_index = s.iterate_index;
      r.iterates = s.iterates;
      r.x_final = s.x_final;
    }
    run.per_seed.push_back(std::move(s.trace));
  }

  const double L = F.L_true(), mu = F.mu(), sigma = oracle.sigma;
  const double gamma = policy.gamma;
  const std::size_t tau_th = opt.tau_th ? *opt.tau_th
                             : policy.kind == StepSizePolicy::Kind::delay_adaptive ? policy.tau_th
                                                                                   : tau_max;
  const double td = static_cast<double>(tau_th);
  // every realized delay above the threshold is dropped, and the threshold covers the
  // realized delays in the sense min{2 tau_ave, tau_max} <= tau_th
  bool thr_ok = static_cast<double>(tau_th) >= std::min(2.0 * tau_ave_max, static_cast<double>(tau_max));
  if (policy.kind == StepSizePolicy::Kind::constant) thr_ok = thr_ok && tau_th >= tau_max;
  else thr_ok = thr_ok && policy.tau_th <= tau_th;
  SgdGammaMode cap_mode;
  cap_mode.kind = convex ? SgdGammaMode::Kind::convex_max : SgdGammaMode::Kind::sconvex_max;
  const double gcap = sgd_gamma(cap_mode, L, tau_th);
  const bool step_ok = gamma <= gcap * (1.0 + 1e-12);
  const double d0 = (x0 - F.x_star()).squaredNorm();

  r.bound.assign(K + 1, HUGE_VAL);
  if (convex) {
    r.monitored = avg_gap;
    if (step_ok && thr_ok)
      for (std::size_t k = 0; k <= K; ++k)
        r.bound[k] = d0 / (gamma * static_cast<double>(k + 1)) + (1.0 + std::sqrt(2.0)) * gamma * sigma * sigma;
  } else {
    r.monitored = mean.V;
    if (step_ok && thr_ok)
      for (std::size_t k = 0; k <= K; ++k)
        r.bound[k] = std::exp(-gamma * mu * static_cast<double>(k) / 2.0) * d0 + 2.0 * gamma * sigma * sigma / mu;
  }

  // In the strongly convex form the function gap is spent on the contraction factor,
  // so X does not appear in that recursion.
  if (!convex) mean.X.clear();

  // The recursion holds pathwise only without gradient noise.
  const bool noiseless = sigma == 0.0 && oracle.noise == StochasticOracle::Noise::additive_gaussian;
  if (noiseless) {
    CoupledRecursion cr;
    const double p = 2.0 * gamma * td * L;
    cr.p = CoeffSeq::constant(p);
    cr.r = CoeffSeq::constant(1.0 / (gamma * L) + p - 1.0);
    cr.e = CoeffSeq::constant(0.0);
    cr.tau = tau_th;
    if (convex) {
      cr.flavor = CoupledFlavor::unit_q;
    } else {
      cr.flavor = CoupledFlavor::contractive;
      std::vector<double> q(K + 1);
      for (std::size_t k = 0; k <= K; ++k) q[k] = 1.0 - mean.gamma[k] * mu;
      cr.q = CoeffSeq::sequence(std::move(q));
      cr.q_floor = 1.0 - gamma * mu;
    }
    r.form = Eq4Form{cr, std::nullopt};
  }

  auto st = schedule_stats(mean.delays);
  r.metadata.set("algorithm", "async-sgd");
  r.metadata.set("regime", convex ? "convex" : "strongly-convex");
  r.metadata.set("gamma", gamma);
  r.metadata.set("gamma_cap", gcap);
  r.metadata.set("tau_th", static_cast<std::uint64_t>(tau_th));
  r.metadata.set("policy", policy.kind == StepSizePolicy::Kind::constant ? "constant" : "delay-adaptive");
  r.metadata.set("step_precondition", step_ok);
  r.metadata.set("threshold_precondition", thr_ok);
  r.metadata.set("tau_max", static_cast<std::uint64_t>(st.tau_max));
  r.metadata.set("tau_ave", st.tau_ave);
  r.metadata.set("seeds", static_cast<std::uint64_t>(seeds.size()));
  r.metadata.set("sigma", sigma);
  r.metadata.set("L", L);
  r.metadata.set("mu", mu);
  r.metadata.set("dist0", d0);
  r.metadata.set("margin", opt.margin);
  detail::finish_checks(r);
  return run;
}

}  // namespace ail
