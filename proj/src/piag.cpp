#include <algorithm>
#include <cmath>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"
#include "run_common.hpp"

namespace ail {

RunResult piag(const SmoothSum& F, const Regularizer& R, double gamma, PiagOrder order, std::size_t K,
               const Vec& x0, const PiagOptions& opt, PiagTableLog* log) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::invalid_gamma, "gamma must be positive");
  if (static_cast<std::size_t>(x0.size()) != F.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");
  R.validate();
  const std::size_t n = F.n();
  if (order.kind == PiagOrder::Kind::server) {
    if (!order.workers) throw Error(Errc::invalid_parameters, "server order needs a worker model");
    if (order.workers->M() != n)
      throw Error(Errc::invalid_parameters, "server order needs one worker per component (M = n)");
  }
  if (opt.mode == PiagMode::theorem2) {
    if (R.kind != Regularizer::Kind::none)
      throw Error(Errc::unsupported_problem, "growth-constant runs need an unregularized problem");
    if (!F.growth() || !(*F.growth() > 0.0))
      throw Error(Errc::unsupported_problem, "problem has no positive quadratic growth constant");
  }

  const auto ref = reference_solution(F, R);
  const double L = F.L();

  // stored gradient table, initialized at x0
  std::vector<Vec> table(n);
  std::vector<std::size_t> stale(n, 0);
  Vec sum = Vec::Zero(x0.size());
  for (std::size_t i = 0; i < n; ++i) {
    table[i] = F.component_gradient(i, x0);
    sum += table[i];
  }
  std::vector<Vec> held;
  if (order.kind == PiagOrder::Kind::server) held.assign(n, x0);

  RunResult r;
  detail::IterateRecorder rec(K);
  std::vector<double> gap(K + 1), dist(K + 1);
  Trace& t = r.trace;
  t.W.resize(K + 1);
  t.delays.resize(K + 1);
  t.gamma.assign(K + 1, gamma);
  if (log) {
    log->stale.clear();
    log->g.clear();
  }

  Vec x = x0;
  for (std::size_t k = 0; k <= K; ++k) {
    rec.offer(r, k, x);
    gap[k] = std::max(0.0, objective(F, R, x) - ref.P);
    if (opt.mode == PiagMode::theorem2) dist[k] = (x - F.project_solution_set(x)).squaredNorm();
    else dist[k] = (x - ref.x).squaredNorm();

    std::size_t j = 0, at = k;
    Vec fresh;
    if (order.kind == PiagOrder::Kind::cyclic) {
      j = k % n;
      fresh = F.component_gradient(j, x);
    } else {
      auto a = order.workers->next_arrival();
      j = a.worker;
      at = a.dispatched;
      fresh = F.component_gradient(j, held[j]);
    }
    sum = (sum - table[j]) + fresh;
    table[j] = std::move(fresh);
    stale[j] = at;
    if ((k + 1) % n == 0) {
      // refresh the running sum to keep rounding from accumulating
      sum.setZero();
      for (std::size_t i = 0; i < n; ++i) sum += table[i];
    }
    Vec g = sum / static_cast<double>(n);
    if (log && opt.record_table) {
      log->stale.push_back(stale);
      log->g.push_back(g);
    }
    Vec next = prox(R, gamma, x - gamma * g);
    t.W[k] = (next - x).squaredNorm();
    t.delays[k] = k - *std::min_element(stale.begin(), stale.end());
    x = std::move(next);
    if (order.kind == PiagOrder::Kind::server) held[j] = x;
  }
  r.x_final = r.iterates.back();

  const std::size_t tau = order.kind == PiagOrder::Kind::cyclic ? n - 1 : detail::max_of(t.delays);
  const double td = static_cast<double>(tau);
  const double gmax = piag_gamma_max(L, tau);
  const bool step_ok = gamma <= gmax * (1.0 + 1e-12);
  r.monitored = gap;
  r.bound.assign(K + 1, HUGE_VAL);
  t.V.resize(K + 1);

  if (opt.mode == PiagMode::theorem1) {
    for (std::size_t k = 0; k <= K; ++k) t.V[k] = 2.0 * gamma * (static_cast<double>(k) + td) * gap[k] + dist[k];
    CoupledRecursion cr;
    cr.flavor = CoupledFlavor::unit_q;
    std::vector<double> p(K + tau + 2), rr(K + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = gamma * L * (static_cast<double>(k) + 2.0 * td + 1.0);
    for (std::size_t k = 0; k <= K; ++k) {
      double a = static_cast<double>(k) + td;
      rr[k] = 2.0 * a + 1.0 - gamma * L * td * a;
    }
    cr.p = CoeffSeq::sequence(std::move(p));
    cr.r = CoeffSeq::sequence(std::move(rr));
    cr.e = CoeffSeq::constant(0.0);
    cr.tau = tau;
    r.form = Eq4Form{cr, std::nullopt};
    if (step_ok)
      for (std::size_t k = 0; k <= K; ++k) r.bound[k] = piag_theorem1_bound(k, gamma, tau, gap[0], dist[0]);
    r.metadata.set("alpha0", td);
  } else {
    const double mu = *F.growth();
    const double Q = L / mu;
    const double theta = Q / (Q + 1.0);
    const double shrink = 1.0 + gamma * mu * theta;
    for (std::size_t k = 0; k <= K; ++k) t.V[k] = 2.0 / L * gap[k] + dist[k];
    CoupledRecursion cr;
    cr.flavor = CoupledFlavor::contractive;
    cr.q = CoeffSeq::constant(1.0 / shrink);
    cr.q_floor = 1.0 / shrink;
    cr.p = CoeffSeq::constant((1.0 + gamma * L * (td + 1.0)) / shrink);
    cr.r = CoeffSeq::constant((2.0 / (gamma * L) + 1.0 - td) / shrink);
    cr.e = CoeffSeq::constant(0.0);
    cr.tau = tau;
    r.form = Eq4Form{cr, std::nullopt};
    const double h = gamma * L * (2.0 * td + 1.0);
    BoundSeries dseries;
    dseries.name = "dist";
    dseries.monitored = dist;
    dseries.bound.assign(K + 1, HUGE_VAL);
    if (step_ok) {
      double rate = piag_theorem2_rate(std::min(h, 1.0), std::max(Q, 1.0), tau);
      double v0 = t.V[0];
      double g0 = gap[0] + 0.5 * L * dist[0];
      double pw = 1.0;
      for (std::size_t k = 0; k <= K; ++k) {
        r.bound[k] = pw * g0;
        dseries.bound[k] = pw * v0;
        pw *= rate;
      }
      r.metadata.set("rate", rate);
    }
    r.extra.push_back(std::move(dseries));
    r.metadata.set("growth", mu);
    r.metadata.set("Q", Q);
    r.metadata.set("h", h);
  }
  auto st = schedule_stats(t.delays);
  r.metadata.set("algorithm", "piag");
  r.metadata.set("order", order.kind == PiagOrder::Kind::cyclic ? "cyclic" : "server");
  r.metadata.set("mode", opt.mode == PiagMode::theorem1 ? "theorem1" : "theorem2");
  r.metadata.set("gamma", gamma);
  r.metadata.set("gamma_max", gmax);
  r.metadata.set("step_precondition", step_ok);
  r.metadata.set("tau", static_cast<std::uint64_t>(tau));
  r.metadata.set("tau_max", static_cast<std::uint64_t>(st.tau_max));
  r.metadata.set("tau_ave", st.tau_ave);
  r.metadata.set("L", L);
  r.metadata.set("P_star", ref.P);
  r.metadata.set("dist0", dist[0]);
  r.metadata.set("gap0", gap[0]);
  detail::finish_checks(r, Tolerance{});
  return r;
}

}  // namespace ail
