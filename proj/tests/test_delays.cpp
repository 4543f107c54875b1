#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ail/delays.hpp"
#include "ail/error.hpp"
#include "ail/rng.hpp"
#include "oracles.hpp"

using namespace ail;

namespace {

// Reference SplitMix64 stream (state advanced before mixing).
std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Event-by-event simulation of a parameter server with deterministic service times,
// ties to the lowest worker id. Returns the delay sequence.
std::vector<std::size_t> reference_server(const std::vector<double>& service, std::size_t K) {
  const std::size_t M = service.size();
  std::vector<double> ready(service);
  std::vector<std::size_t> held(M, 0);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k <= K; ++k) {
    std::size_t w = 0;
    for (std::size_t i = 1; i < M; ++i)
      if (ready[i] < ready[w]) w = i;
    out.push_back(k - held[w]);
    held[w] = k + 1;
    ready[w] += service[w];
  }
  return out;
}

}  // namespace

TEST_CASE("rng matches the reference SplitMix64 vectors") {
  const std::uint64_t published[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                     4593380528125082431ULL, 16408922859458223821ULL};
  CounterRng r(1234567);
  std::uint64_t state = 1234567;
  for (std::uint64_t i = 0; i < 5; ++i) {
    CHECK(r.bits(i) == published[i]);
    CHECK(splitmix_next(state) == published[i]);
  }
  for (std::uint64_t i = 5; i < 1000; ++i) CHECK(r.bits(i) == splitmix_next(state));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    double u = r.uniform(i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7, i) < 7);
  }
  CHECK(r.child(1).key() != r.child(2).key());
  CHECK(r.child(1).key() == CounterRng(1234567).child(1).key());
}

TEST_CASE("realize examples") {
  auto c = realize(DelaySpec::constant(3), 5);
  CHECK(c.delays == std::vector<std::size_t>{0, 1, 2, 3, 3, 3});
  auto lin = realize(DelaySpec::linear_growth(0.2, 0.0), 200);
  for (std::size_t k = 0; k <= 200; ++k) CHECK(lin.delays[k] == static_cast<std::size_t>(std::floor(0.2 * k)));
  auto sq = realize(DelaySpec::sqrt_floor(), 200);
  for (std::size_t k = 0; k <= 200; ++k) CHECK(sq.delays[k] == static_cast<std::size_t>(std::floor(std::sqrt(double(k)))));
  CHECK_THROWS_AS(realize(DelaySpec::linear_growth(1.5, 0.0), 3), Error);
}

TEST_CASE("two-speed workers: small average delay, large maximum") {
  auto s = realize(DelaySpec::two_speed(2, 1000.0, 1), 100000);
  auto st = schedule_stats(s);
  MESSAGE("two-speed tau_ave = " << st.tau_ave << ", tau_max = " << st.tau_max);
  CHECK(st.tau_ave <= 1.0);
  CHECK(st.tau_ave > 0.99);
  CHECK(st.tau_max >= 999);
  CHECK(st.tau_max <= 1001);
}

TEST_CASE("schedule stats") {
  auto st = schedule_stats(realize(DelaySpec::constant(3), 100000));
  CHECK(st.tau_max == 3);
  CHECK(st.tau_ave == doctest::Approx(3.0).epsilon(1e-4));
  auto z = schedule_stats(realize(DelaySpec::constant(3), 0));
  CHECK(z.tau_max == 0);
  CHECK(z.tau_ave == 0.0);
}

TEST_CASE("realized schedules respect their declared bounds and are deterministic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto u = realize(DelaySpec::uniform_random(6, seed), 500);
    CHECK(u.delays == realize(DelaySpec::uniform_random(6, seed), 500).delays);
    for (std::size_t k = 0; k <= 500; ++k) CHECK(u.delays[k] <= std::min<std::size_t>(k, 6));
    auto lin = realize(DelaySpec::linear_growth(0.3, 2.5), 300);
    for (std::size_t k = 0; k <= 300; ++k) CHECK(lin.delays[k] <= static_cast<std::size_t>(std::floor(0.3 * k + 2.5)));
  }
}

TEST_CASE("worker model delays") {
  auto one = WorkerModel::deterministic({2.5});
  for (int k = 0; k < 50; ++k) CHECK(worker_next_arrival(one).delay == 0);

  auto two = WorkerModel::deterministic({1.0, 1.0});
  std::vector<std::size_t> d;
  for (int k = 0; k < 40; ++k) d.push_back(worker_next_arrival(two).delay);
  CHECK(d[0] == 0);
  for (int k = 1; k < 40; ++k) CHECK(d[static_cast<std::size_t>(k)] == 1);

  std::vector<double> svc{1.0, 2.3, 3.7, 0.9};
  auto w = WorkerModel::deterministic(svc);
  auto ref = reference_server(svc, 2000);
  for (std::size_t k = 0; k <= 2000; ++k) {
    auto a = worker_next_arrival(w);
    CHECK(a.k == k);
    CHECK(a.delay == ref[k]);
    CHECK(a.k - a.dispatched == a.delay);
  }
}

TEST_CASE("average delay never exceeds M - 1") {
  for (std::size_t M : {1u, 2u, 3u, 5u, 8u})
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::vector<double> rates(M);
      for (std::size_t i = 0; i < M; ++i) rates[i] = 0.2 + 0.7 * double(i) + double(seed);
      auto e = WorkerModel::exponential(rates, seed);
      auto t = WorkerModel::two_speed(M, 10.0 + double(seed), seed);
      for (std::size_t K : {0u, 1u, 10u, 999u, 5000u}) {
        auto e2 = e, t2 = t;
        std::vector<std::size_t> de, dt;
        for (std::size_t k = 0; k <= K; ++k) {
          de.push_back(worker_next_arrival(e2).delay);
          dt.push_back(worker_next_arrival(t2).delay);
        }
        CHECK(schedule_stats(de).tau_ave <= double(M - 1));
        CHECK(schedule_stats(dt).tau_ave <= double(M - 1));
      }
    }
}

TEST_CASE("shared-memory reads") {
  const std::size_t m = 5, d = 10, tau = 4;
  Partition part = Partition::even(d, m);
  std::mt19937_64 g(17);
  for (auto law : {SharedMemoryModel::JLaw::full_window, SharedMemoryModel::JLaw::random_subset}) {
    SharedMemoryModel model{m, tau, law, 33};
    std::vector<Vec> hist{oracle::random_vec(g, d)};
    std::vector<std::size_t> written;
    std::deque<BlockUpdate> recent;
    for (std::size_t k = 0; k < 300; ++k) {
      const Vec& xk = hist.back();
      auto r = shm_compose_read(model, part, recent, xk, k);
      // J lies in the staleness window
      for (std::size_t j : r.J) {
        CHECK(j < k);
        CHECK(j + tau >= k);
      }
      if (law == SharedMemoryModel::JLaw::full_window) CHECK(r.J.size() == std::min(k, tau));
      // replay: each block of the read equals the value that block held at some index in the window
      for (std::size_t b = 0; b < m; ++b) {
        auto off = static_cast<Eigen::Index>(part.offset(b)), len = static_cast<Eigen::Index>(part.sizes[b]);
        std::size_t oldest = k;
        for (std::size_t j : r.J)
          if (written[j] == b) oldest = std::min(oldest, j);
        CHECK(r.x_hat.segment(off, len) == hist[oldest].segment(off, len));
        CHECK(k - oldest <= tau);
      }
      std::size_t b = model.block(k);
      auto off = static_cast<Eigen::Index>(part.offset(b)), len = static_cast<Eigen::Index>(part.sizes[b]);
      Vec next = xk;
      Vec delta = oracle::random_vec(g, part.sizes[b]);
      next.segment(off, len) += delta;
      recent.push_back({b, xk.segment(off, len), delta});
      if (recent.size() > tau) recent.pop_front();
      written.push_back(b);
      hist.push_back(next);
    }
  }
  SharedMemoryModel none{m, 0, SharedMemoryModel::JLaw::full_window, 1};
  Vec x = Vec::LinSpaced(10, 0, 1);
  auto r = shm_compose_read(none, part, {}, x, 7);
  CHECK(r.x_hat == x);
  CHECK(r.J.empty());
}

TEST_CASE("agent schedules") {
  const std::size_t B = 2, D = 3, m = 8;
  auto s = AgentSchedule::partial(m, B, D, 5);
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(s.updates(i, 0));
    std::size_t last = 0;
    for (std::size_t k = 1; k < 400; ++k) {
      if (s.updates(i, k)) {
        CHECK(k - last <= B + 1);
        last = k;
      }
      for (std::size_t j = 0; j < m; ++j) {
        auto lag = s.lag(i, j, k);
        CHECK(lag <= k);
        CHECK(lag + D >= k);
      }
      if (s.updates(i, k)) CHECK(s.lag(i, i, k) == k);
    }
  }
  auto lin = AgentSchedule::linear_growth(m, 0.25, 2.0, 5);
  for (std::size_t k = 0; k < 2000; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        auto lag = lin.lag(i, j, k);
        CHECK(lag <= k);
        CHECK(double(lag) >= 0.75 * double(k) - 2.0);
      }
}

TEST_CASE("schedule CSV round trip") {
  auto s = realize(DelaySpec::two_speed(3, 4.0, 2), 50);
  auto text = schedule_to_csv(s);
  CHECK(text.rfind("k,tau", 0) == 0);
  auto back = schedule_from_csv(text);
  CHECK(back.delays == s.delays);
  CHECK(back.workers == s.workers);
  CHECK(schedule_to_csv(back) == text);
  CHECK_THROWS_AS(schedule_from_csv("k,tau\n0,1\n"), Error);
}

TEST_CASE("delay spec parsing") {
  CHECK(DelaySpec::parse("constant:3").tau == 3);
  CHECK(DelaySpec::parse("two-speed:2,1000").ratio == 1000.0);
  CHECK(DelaySpec::parse("linear:0.2,0").alpha == 0.2);
  CHECK(DelaySpec::parse("sqrt-floor").kind == DelaySpec::Kind::sqrt_floor);
  CHECK_THROWS_AS(DelaySpec::parse("poisson:3"), Error);
}
