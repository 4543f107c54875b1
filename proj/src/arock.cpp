#include <algorithm>
#include <cmath>
#include <deque>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"
#include "run_common.hpp"

namespace ail {

namespace {

Eigen::Index off(const Partition& p, std::size_t i) { return static_cast<Eigen::Index>(p.offset(i)); }
Eigen::Index len(const Partition& p, std::size_t i) { return static_cast<Eigen::Index>(p.sizes[i]); }

}  // namespace

std::vector<Vec> serial_stochastic_km(const FixedPointOperator& op, std::uint64_t block_seed, double gamma,
                                      std::size_t K, const Vec& x0) {
  const Partition& part = op.partition();
  SharedMemoryModel sampler;
  sampler.m = part.m();
  sampler.seed = block_seed;
  std::vector<Vec> xs;
  xs.reserve(K + 1);
  Vec x = x0;
  xs.push_back(x);
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t i = sampler.block(k);
    Vec s = op.residual_block(x, i);
    x.segment(off(part, i), len(part, i)) -= gamma * s;
    xs.push_back(x);
  }
  return xs;
}

ArockRun arock(const FixedPointOperator& op, const SharedMemoryModel& shm_in, double h, std::size_t K,
               const std::vector<std::uint64_t>& seeds, const Vec& x0, const ArockOptions& opt) {
  if (!(h > 0.0 && h <= 1.0)) throw Error(Errc::invalid_h, "h must lie in (0, 1]");
  if (seeds.empty()) throw Error(Errc::invalid_parameters, "ARock needs at least one seed");
  shm_in.validate();
  const Partition& part = op.partition();
  if (shm_in.m != part.m()) throw Error(Errc::partition_mismatch, "shared-memory model and operator disagree on the block count");
  if (static_cast<std::size_t>(x0.size()) != op.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");
  if (op.norm_kind() != NormKind::euclidean)
    throw Error(Errc::unsupported_problem, "ARock needs an operator that is pseudo-contractive in the Euclidean norm");

  const std::size_t m = part.m(), tau = shm_in.tau;
  const double gamma = arock_gamma(h, tau, m);
  const Vec& xs = op.fixed_point();
  const double inv = 1.0 / static_cast<double>(seeds.size());

  ArockRun run;
  RunResult& r = run.mean;
  r.margin = opt.margin;
  Trace& mean = r.trace;
  mean.V.assign(K + 1, 0.0);
  mean.delays.assign(K + 1, 0);
  mean.gamma.assign(K + 1, gamma);
  run.read_gap.assign(K + 1, 0.0);
  run.residual_sq.assign(K + 1, 0.0);
  std::vector<std::size_t> jk(K + 1, 0);

  for (std::size_t si = 0; si < seeds.size(); ++si) {
    SharedMemoryModel shm = shm_in;
    shm.seed = seeds[si];
    std::deque<BlockUpdate> recent;
    std::vector<double> V(K + 1);
    detail::IterateRecorder rec(K);
    Vec x = x0;
    for (std::size_t k = 0; k <= K; ++k) {
      V[k] = (x - xs).squaredNorm();
      if (si == 0) rec.offer(r, k, x);
      if (k == K && !opt.diagnostics) break;
      std::size_t i = shm.block(k);
      auto read = shm_compose_read(shm, part, recent, x, k);
      if (opt.diagnostics) {
        run.read_gap[k] += (x - read.x_hat).squaredNorm() * inv;
        run.residual_sq[k] += op.residual(read.x_hat).squaredNorm() * inv;
      }
      if (k == K) break;
      if (si == 0) {
        jk[k] = read.J.size();
        mean.delays[k] = read.J.empty() ? 0 : k - read.J.front();
      }
      Vec s = op.residual_block(read.x_hat, i);
      BlockUpdate u;
      u.block = i;
      u.before = x.segment(off(part, i), len(part, i));
      x.segment(off(part, i), len(part, i)) -= gamma * s;
      if (tau > 0) {
        u.delta = x.segment(off(part, i), len(part, i)) - u.before;
        recent.push_back(std::move(u));
        if (recent.size() > tau) recent.pop_front();
      }
    }
    if (si == 0) r.x_final = x;
    for (std::size_t k = 0; k <= K; ++k) mean.V[k] += V[k] * inv;
    run.per_seed_V.push_back(std::move(V));
  }

  const double c = op.modulus();
  const double rate = arock_rate(h, c, tau, m);
  r.monitored = mean.V;
  r.bound.resize(K + 1);
  double pw = 1.0;
  for (std::size_t k = 0; k <= K; ++k) {
    r.bound[k] = pw * mean.V[0];
    pw *= rate;
  }

  if (opt.diagnostics) {
    const double sm = std::sqrt(static_cast<double>(m)), st = std::sqrt(static_cast<double>(tau));
    const double coef = gamma * gamma * (sm + st) * (sm + st) / (static_cast<double>(m) * static_cast<double>(m));
    run.read_gap_bound.assign(K + 1, 0.0);
    // summed afresh each step: a running sum cancels badly once the residuals have decayed
    for (std::size_t k = 1; k <= K; ++k) {
      double window = 0.0;
      for (std::size_t l = k > tau ? k - tau : 0; l < k; ++l) window += run.residual_sq[l];
      run.read_gap_bound[k] = coef * window;
    }
    BoundSeries diag;
    diag.name = "read_gap";
    diag.monitored = run.read_gap;
    diag.bound = run.read_gap_bound;
    r.extra.push_back(std::move(diag));
  }

  r.metadata.set("algorithm", "arock");
  r.metadata.set("gamma", gamma);
  r.metadata.set("h", h);
  r.metadata.set("c", c);
  r.metadata.set("m", static_cast<std::uint64_t>(m));
  r.metadata.set("tau", static_cast<std::uint64_t>(tau));
  r.metadata.set("Gamma", arock_gamma_factor(tau, m));
  r.metadata.set("rate", rate);
  r.metadata.set("jlaw", jlaw_name(shm_in.law));
  r.metadata.set("seeds", static_cast<std::uint64_t>(seeds.size()));
  r.metadata.set("margin", opt.margin);
  auto stats = schedule_stats(mean.delays);
  r.metadata.set("tau_max", static_cast<std::uint64_t>(stats.tau_max));
  r.metadata.set("tau_ave", stats.tau_ave);
  run.jk_sizes = std::move(jk);
  detail::finish_checks(r, Tolerance{}, opt.checkpoint_every);
  if (opt.diagnostics) run.read_gap_verdict = r.extra.back().verdict;
  return run;
}

}  // namespace ail
