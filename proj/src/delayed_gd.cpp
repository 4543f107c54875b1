#include <algorithm>
#include <cmath>
#include <deque>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"
#include "run_common.hpp"

namespace ail {

RunResult delayed_gd(const SmoothSum& f, double gamma, const std::vector<std::size_t>& delays, std::size_t K,
                     GdLyapunov lyap, const Vec& x0) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::invalid_gamma, "gamma must be positive");
  if (delays.size() < K + 1) throw Error(Errc::invalid_parameters, "delay schedule shorter than the horizon");
  if (f.x_star().size() != static_cast<Eigen::Index>(f.dim())) throw Error(Errc::missing_solution, "problem has no reference minimizer");
  if (static_cast<std::size_t>(x0.size()) != f.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");
  for (std::size_t k = 0; k <= K; ++k)
    if (delays[k] > k) throw Error(Errc::invalid_parameters, "delay exceeds index at " + std::to_string(k));

  std::vector<std::size_t> used(delays.begin(), delays.begin() + static_cast<std::ptrdiff_t>(K + 1));
  const std::size_t tau = detail::max_of(used);
  const Vec& xs = f.x_star();
  const double fstar = f.F_star();

  RunResult r;
  detail::IterateRecorder rec(K);
  Trace& t = r.trace;
  t.delays = used;
  t.gamma.assign(K + 1, gamma);
  t.V.resize(K + 1);
  if (lyap == GdLyapunov::fn_gap) {
    t.W.resize(K + 1);
    t.X.resize(K + 1);
  }

  std::deque<Vec> history;  // history[j] = x_{k-j}
  Vec x = x0;
  for (std::size_t k = 0; k <= K; ++k) {
    history.push_front(x);
    if (history.size() > tau + 1) history.pop_back();
    rec.offer(r, k, x);
    t.V[k] = (x - xs).squaredNorm();
    Vec g = f.gradient(history[used[k]]);
    if (lyap == GdLyapunov::fn_gap) {
      t.W[k] = g.squaredNorm();
      t.X[k] = 2.0 * gamma * (f.value(x) - fstar);
    }
    if (k < K) x = x - gamma * g;
  }
  r.x_final = x;

  const double L = f.L_true(), mu = f.mu();
  const double td = static_cast<double>(tau);
  r.monitored.resize(K + 1);
  r.bound.assign(K + 1, HUGE_VAL);
  if (lyap == GdLyapunov::sq_dist) {
    double q = 1.0 - 2.0 * gamma * mu * L / (mu + L);
    double p = std::pow(gamma * L, 4) * td * td + 2.0 * gamma * gamma * L * L * td;
    r.form = Eq3Form{q, p, 2 * tau};
    r.monitored = t.V;
    BoundedDelayRecursion b{std::max(q, 0.0), p, 2 * tau};
    if (q >= 0.0 && b.admissible()) {
      double rho = lemma1_rate(b).param("rho");
      for (std::size_t k = 0; k <= K; ++k) r.bound[k] = std::pow(rho, static_cast<double>(k)) * t.V[0];
    }
    r.metadata.set("recursion.q", q);
    r.metadata.set("recursion.p", p);
    r.metadata.set("recursion.window", static_cast<std::uint64_t>(2 * tau));
  } else {
    CoupledRecursion cr;
    cr.flavor = CoupledFlavor::unit_q;
    double p = gamma * gamma * gamma * L * td;
    cr.p = CoeffSeq::constant(p);
    cr.r = CoeffSeq::constant(gamma * (1.0 / L - gamma) + p);
    cr.e = CoeffSeq::constant(0.0);
    cr.tau = tau;
    r.form = Eq4Form{cr, std::nullopt};
    double run = 0.0;
    for (std::size_t k = 0; k <= K; ++k) r.monitored[k] = (run += t.X[k]);
    if (cr.r.at(0) >= 0.0 && lemma4_admissible(cr, K).ok) r.bound = lemma4_bounds(cr, t.V[0], K).x_sum;
    r.metadata.set("recursion.p", p);
    r.metadata.set("recursion.r", cr.r.at(0));
  }
  auto st = schedule_stats(used);
  r.metadata.set("algorithm", "delayed-gd");
  r.metadata.set("gamma", gamma);
  r.metadata.set("tau_max", static_cast<std::uint64_t>(st.tau_max));
  r.metadata.set("tau_ave", st.tau_ave);
  r.metadata.set("L", L);
  r.metadata.set("mu", mu);
  detail::finish_checks(r);
  return r;
}

RunResult pg(const SmoothSum& F, const Regularizer& R, double gamma, std::size_t K, const Vec& x0) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::invalid_gamma, "gamma must be positive");
  if (static_cast<std::size_t>(x0.size()) != F.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");
  R.validate();
  auto ref = reference_solution(F, R);
  const std::size_t n = F.n();

  RunResult r;
  detail::IterateRecorder rec(K);
  Trace& t = r.trace;
  t.V.resize(K + 1);
  t.delays.assign(K + 1, 0);
  t.gamma.assign(K + 1, gamma);
  Vec x = x0;
  for (std::size_t k = 0; k <= K; ++k) {
    rec.offer(r, k, x);
    t.V[k] = std::max(0.0, objective(F, R, x) - ref.P);
    if (k == K) break;
    // same aggregation order as the incremental method so n = 1 runs agree bit for bit
    Vec sum = Vec::Zero(x.size());
    for (std::size_t i = 0; i < n; ++i) sum += F.component_gradient(i, x);
    Vec g = sum / static_cast<double>(n);
    x = prox(R, gamma, x - gamma * g);
  }
  r.x_final = x;
  r.monitored = t.V;
  r.bound.assign(K + 1, HUGE_VAL);
  const double d0 = (x0 - ref.x).squaredNorm();
  if (gamma <= 1.0 / F.L_true() * (1.0 + 1e-12))
    for (std::size_t k = 1; k <= K; ++k) r.bound[k] = d0 / (2.0 * gamma * static_cast<double>(k));
  r.metadata.set("algorithm", "pg");
  r.metadata.set("gamma", gamma);
  r.metadata.set("P_star", ref.P);
  r.metadata.set("dist0", d0);
  detail::finish_checks(r);
  return r;
}

}  // namespace ail
