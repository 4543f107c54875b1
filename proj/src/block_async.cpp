#include <algorithm>
#include <cmath>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"
#include "run_common.hpp"

namespace ail {

RunResult totally_async(const FixedPointOperator& op, const AgentSchedule& sched, std::size_t K, const Vec& x0) {
  sched.validate();
  const Partition& part = op.partition();
  if (sched.m != part.m()) throw Error(Errc::partition_mismatch, "agent schedule and operator disagree on the block count");
  if (op.norm_kind() != NormKind::block_max)
    throw Error(Errc::unsupported_problem, "block iteration needs an operator that is pseudo-contractive in the block-max norm");
  if (static_cast<std::size_t>(x0.size()) != op.dim()) throw Error(Errc::dimension_mismatch, "x0 has wrong dimension");

  const std::size_t m = part.m();
  auto seg = [&](Vec& v, std::size_t j) {
    return v.segment(static_cast<Eigen::Index>(part.offset(j)), static_cast<Eigen::Index>(part.sizes[j]));
  };
  const Vec& xs = op.fixed_point();

  RunResult r;
  detail::IterateRecorder rec(K);
  Trace& t = r.trace;
  t.V.resize(K + 1);
  t.delays.resize(K + 1);

  std::vector<Vec> hist;
  hist.reserve(K + 1);
  hist.push_back(x0);
  // min_j s_{ij, t_i(k)} for each agent
  std::vector<std::size_t> oldest(m, 0);
  Vec y(x0.size());
  for (std::size_t k = 0; k <= K; ++k) {
    const Vec& x = hist[k];
    rec.offer(r, k, x);
    t.V[k] = op.norm(x - xs);
    Vec next = x;
    for (std::size_t i = 0; i < m; ++i) {
      if (!sched.updates(i, k)) continue;
      std::size_t lo = k;
      for (std::size_t j = 0; j < m; ++j) {
        std::size_t s = sched.lag(i, j, k);
        if (s > k) throw Error(Errc::invalid_parameters, "lag exceeds the current time");
        lo = std::min(lo, s);
        seg(y, j) = hist[s].segment(static_cast<Eigen::Index>(part.offset(j)), static_cast<Eigen::Index>(part.sizes[j]));
      }
      oldest[i] = lo;
      if (k < K) seg(next, i) = op.apply_block(y, i);
    }
    t.delays[k] = k - *std::min_element(oldest.begin(), oldest.end());
    if (k < K) hist.push_back(std::move(next));
  }
  r.x_final = hist.back();

  const double c = op.modulus();
  r.form = Eq3Form{0.0, c, std::nullopt};
  r.monitored = t.V;
  r.bound.assign(K + 1, HUGE_VAL);
  const double V0 = t.V[0];
  if (sched.partial_mode()) {
    std::size_t B = sched.sets == AgentSchedule::UpdateSets::periodic ? sched.B : 0;
    std::size_t D = sched.lags == AgentSchedule::Lags::bounded ? sched.D : 0;
    double span = static_cast<double>(B + D + 1);
    for (std::size_t k = 0; k <= K; ++k) r.bound[k] = std::pow(c, static_cast<double>(k) / span) * V0;
    r.metadata.set("mode", "partial");
    r.metadata.set("B", static_cast<std::uint64_t>(B));
    r.metadata.set("D", static_cast<std::uint64_t>(D));
  } else {
    GrowthDelaySpec g{sched.alpha, sched.beta};
    for (std::size_t k = 0; k <= K; ++k) r.bound[k] = corollary1_bound(g, 0.0, c, static_cast<double>(k)) * V0;
    r.metadata.set("mode", "linear-growth");
    r.metadata.set("alpha", sched.alpha);
    r.metadata.set("beta", sched.beta);
    r.metadata.set("eta", corollary1_eta(g, 0.0, c));
  }
  auto st = schedule_stats(t.delays);
  r.metadata.set("algorithm", "totally-async");
  r.metadata.set("c", c);
  r.metadata.set("m", static_cast<std::uint64_t>(m));
  r.metadata.set("tau_max", static_cast<std::uint64_t>(st.tau_max));
  r.metadata.set("tau_ave", st.tau_ave);
  detail::finish_checks(r);
  return r;
}

}  // namespace ail
