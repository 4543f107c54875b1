#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ail/certificates.hpp"
#include "ail/error.hpp"

using namespace ail;

namespace {

// Independent unroll of V_{k+1} = q V_k + p max window, possibly shrunk by a factor in [0,1].
std::vector<double> unroll(double q, double p, std::size_t tau, double V0, std::size_t K, std::mt19937_64* shrink) {
  std::vector<double> V(K + 1);
  V[0] = V0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    double m = 0.0;
    for (std::size_t l = k > tau ? k - tau : 0; l <= k; ++l) m = std::max(m, V[l]);
    V[k + 1] = (q * V[k] + p * m) * (shrink ? u(*shrink) : 1.0);
  }
  return V;
}

CoupledRecursion contractive(double q, double p, double r, std::size_t tau, double e = 0.0) {
  CoupledRecursion rec;
  rec.flavor = CoupledFlavor::contractive;
  rec.q = CoeffSeq::constant(q);
  rec.q_floor = q;
  rec.p = CoeffSeq::constant(p);
  rec.r = CoeffSeq::constant(r);
  rec.e = CoeffSeq::constant(e);
  rec.tau = tau;
  return rec;
}

}  // namespace

TEST_CASE("bounded-delay rate examples") {
  auto c0 = lemma1_rate({0.5, 0.3, 0});
  CHECK(c0.admissible);
  CHECK(c0.param("rho") == doctest::Approx(0.8).epsilon(1e-15));
  auto c3 = lemma1_rate({0.5, 0.3, 3});
  CHECK(c3.param("rho") == doctest::Approx(std::pow(0.8, 0.25)).epsilon(1e-15));
  CHECK(c3.param("rho") == doctest::Approx(0.945742).epsilon(1e-6));
  auto bad = lemma1_rate({0.7, 0.3, 2});
  CHECK_FALSE(bad.admissible);
  CHECK_FALSE(bad.reason.empty());
}

TEST_CASE("delay family admissibility") {
  CHECK(delay_family_admissible(DelayFamily::bounded(7)));
  CHECK(delay_family_admissible(DelayFamily::linear(0.2, 0)));
  CHECK_FALSE(delay_family_admissible(DelayFamily::linear(1.0, 0)));
  CHECK(delay_family_admissible(DelayFamily::sqrt_floor()));
  CHECK(delay_family_admissible(DelayFamily::parse("linear:0.2,0")));
  try {
    DelayFamily::parse("harmonic:3");
    FAIL("expected unsupported family");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_family);
  }
}

TEST_CASE("lambda certificates") {
  const double q = 0.5, p = 0.3;
  const std::size_t tau = 4, K = 300;
  std::vector<std::size_t> constant(K + 1);
  for (std::size_t k = 0; k <= K; ++k) constant[k] = std::min(k, tau);
  double rho = std::pow(q + p, 1.0 / (1.0 + tau));
  CHECK(lemma3_validate(LambdaFunction::geometric(rho), q, p, constant, K).ok);

  const double alpha = 0.2, beta = 1.0;
  std::vector<std::size_t> growing(K + 1);
  for (std::size_t k = 0; k <= K; ++k) growing[k] = std::min<std::size_t>(k, static_cast<std::size_t>(std::floor(alpha * k + beta)));
  double eta = std::log(q + p) / std::log(1.0 - alpha);
  CHECK(lemma3_validate(LambdaFunction::polynomial(alpha, beta, eta), q, p, growing, K).ok);

  auto scaled = lemma3_validate(LambdaFunction::geometric(rho, 2.0), q, p, constant, K);
  CHECK_FALSE(scaled.ok);
  REQUIRE(scaled.first_violation.has_value());
  CHECK(*scaled.first_violation == 0);

  // a rate faster than the certified one must be rejected
  auto fast = lemma3_validate(LambdaFunction::geometric(rho * 0.99), q, p, constant, K);
  CHECK_FALSE(fast.ok);
}

TEST_CASE("Lambda validation accepts the bounded-delay rate on a random grid") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double s = 0.05 + 0.9 * u(g);
    double q = s * u(g);
    double p = s - q;
    std::size_t tau = g() % 12;
    std::vector<std::size_t> d(101);
    for (std::size_t k = 0; k <= 100; ++k) d[k] = std::min(k, tau);
    double rho = lemma1_rate({q, p, tau}).param("rho");
    CHECK(lemma3_validate(LambdaFunction::geometric(rho), q, p, d, 100).ok);
  }
}

TEST_CASE("growing-delay bound examples") {
  GrowthDelaySpec s{0.5, 0.0};
  CHECK(corollary1_bound(s, 0.0, 0.8, 0) == 1.0);
  double eta = std::log(0.8) / std::log(0.5);
  CHECK(corollary1_eta(s, 0.0, 0.8) == doctest::Approx(0.321928).epsilon(1e-6));
  CHECK(corollary1_bound(s, 0.0, 0.8, 2) == doctest::Approx(std::pow(3.0, -eta)).epsilon(1e-14));
  CHECK(corollary1_bound(s, 0.0, 0.8, 2) == doctest::Approx(0.70211).epsilon(1e-5));
  CHECK(corollary1_bound({0.5, 0.5}, 0.0, 0.8, 1e12) < 1e-3);
  try {
    corollary1_bound(s, 0.5, 0.5, 1);
    FAIL("expected inadmissible parameters");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::inadmissible_parameters);
  }
}

TEST_CASE("growing-delay bound starts at one and never increases") {
  for (double alpha : {0.05, 0.2, 0.5, 0.9})
    for (double beta : {0.0, 0.5, 3.0})
      for (double s : {0.1, 0.5, 0.99}) {
        GrowthDelaySpec spec{alpha, beta};
        CHECK(corollary1_bound(spec, s / 2, s / 2, 0) == 1.0);
        double prev = 1.0;
        for (int k = 1; k <= 500; ++k) {
          double b = corollary1_bound(spec, s / 2, s / 2, k);
          CHECK(b <= prev);
          prev = b;
        }
      }
}

TEST_CASE("growing-delay bound dominates the equality recursion") {
  GrowthDelaySpec spec{0.5, 0.0};
  std::vector<std::size_t> d(2001);
  for (std::size_t k = 0; k <= 2000; ++k) d[k] = static_cast<std::size_t>(std::floor(0.5 * k));
  auto t = worst_case_trace(0.0, 0.8, d, 1.0);
  for (std::size_t k = 0; k <= 2000; ++k) CHECK(t.V[k] <= corollary1_bound(spec, 0.0, 0.8, k) * (1 + 1e-12));
}

TEST_CASE("coupled recursion admissibility examples") {
  CHECK_FALSE(lemma4_admissible(contractive(0.9, 0.1, 1.1, 5), 10).ok);
  CHECK(lemma4_admissible(contractive(0.95, 0.1, 1.1, 4), 10).ok);
  CoupledRecursion unit;
  unit.p = CoeffSeq::constant(0.0);
  unit.r = CoeffSeq::constant(0.0);
  unit.tau = 17;
  CHECK(lemma4_admissible(unit, 50).ok);
  unit.p = CoeffSeq::constant(0.1);
  unit.r = CoeffSeq::constant(0.1 * 18);
  CHECK(lemma4_admissible(unit, 50).ok);
  unit.r = CoeffSeq::constant(0.1 * 18 - 1e-3);
  CHECK_FALSE(lemma4_admissible(unit, 50).ok);
}

TEST_CASE("coupled recursion bound examples") {
  CoupledRecursion unit;
  unit.p = CoeffSeq::constant(0.0);
  unit.r = CoeffSeq::constant(1.0);
  unit.e = CoeffSeq::constant(0.0);
  for (std::size_t K : {0u, 5u, 40u}) {
    auto b = lemma4_bounds(unit, 3.0, K);
    for (std::size_t j = 0; j <= K; ++j) {
      CHECK(b.v_next[j] == 3.0);
      CHECK(b.x_sum[j] == 3.0);
    }
  }
  auto rec = contractive(0.9, 0.01, 1.0, 3);
  auto b = lemma4_bounds(rec, 2.0, 30);
  double qk = 1.0;
  for (std::size_t k = 0; k <= 30; ++k) {
    qk *= 0.9;
    CHECK(b.v_next[k] == qk * 2.0);
    CHECK(b.Q[k + 1] == qk);
  }
  auto half = lemma4_bounds(contractive(0.5, 0.01, 1.0, 0, 0.5), 1.0, 0);
  CHECK(half.v_next[0] == doctest::Approx(1.0).epsilon(1e-15));
  try {
    lemma4_bounds(contractive(0.9, 0.1, 1.1, 5), 1.0, 3);
    FAIL("expected inadmissible recursion");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::inadmissible_recursion);
  }
}

TEST_CASE("worst case trace examples") {
  auto g = worst_case_trace(0.8, 0.0, 0, 1.0, 20);
  for (std::size_t k = 0; k <= 20; ++k) CHECK(g.V[k] == doctest::Approx(std::pow(0.8, k)).epsilon(1e-14));
  auto h = worst_case_trace(0.0, 0.5, 1, 1.0, 6);
  std::vector<double> want{1, 0.5, 0.5, 0.25, 0.25, 0.125, 0.125};
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(h.V[k] == want[k]);
}

TEST_CASE("verify accepts the worst case trace with equality and flags an inflated index") {
  auto t = worst_case_trace(0.5, 0.3, 3, 1.0, 200);
  auto v = verify_trace(t, Eq3Form{0.5, 0.3, std::nullopt});
  CHECK(v.pass);
  CHECK(v.tight);
  CHECK(v.bound_checked);
  CHECK(v.steps_checked == 200);
  t.V[57] *= 1.01;
  auto bad = verify_trace(t, Eq3Form{0.5, 0.3, std::nullopt});
  CHECK_FALSE(bad.pass);
  CHECK(bad.kind == ViolationKind::recursion);
  CHECK(bad.index == 57);
  CHECK(bad.lhs > bad.rhs);
}

TEST_CASE("coupled verification needs the W series") {
  auto t = worst_case_trace(0.5, 0.3, 3, 1.0, 10);
  Eq4Form f;
  f.rec = contractive(0.95, 0.1, 1.1, 4);
  try {
    verify_trace(t, f);
    FAIL("expected missing series");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_series);
  }
}

TEST_CASE("geometric bound holds for random traces obeying the recursion") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    double s = 0.02 + 0.97 * u(g);
    double q = s * u(g);
    double p = s - q;
    std::size_t tau = g() % 10;
    bool equality = trial % 3 == 0;
    auto V = unroll(q, p, tau, 1.0 + 9.0 * u(g), 400, equality ? nullptr : &g);
    double rho = lemma1_rate({q, p, tau}).param("rho");
    for (std::size_t k = 0; k < V.size(); ++k) {
      double b = std::pow(rho, static_cast<double>(k)) * V[0];
      if (b < 1e-290) break;  // subnormal values carry no relative precision
      CHECK(V[k] <= b * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("rate is monotone in the delay bound") {
  for (double q : {0.0, 0.3, 0.6})
    for (double p : {0.05, 0.3}) {
      double prev = 0.0;
      for (std::size_t tau = 0; tau <= 64; ++tau) {
        double rho = lemma1_rate({q, p, tau}).param("rho");
        CHECK(rho >= prev);
        prev = rho;
      }
    }
}

TEST_CASE("trace CSV round trip") {
  Trace t;
  t.V = {1.0, 0.5, 1.0 / 3.0};
  t.W = {0.1, 0.2, 0.30000000000000004};
  t.delays = {0, 1, 1};
  t.gamma = {0.01, 0.01, 0.005};
  auto text = trace_to_csv(t);
  CHECK(text.rfind("k,V,W,X,e,tau,gamma\n", 0) == 0);
  auto back = trace_from_csv(text);
  CHECK(back.V == t.V);
  CHECK(back.W == t.W);
  CHECK(back.X.empty());
  CHECK(back.e.empty());
  CHECK(back.delays == t.delays);
  CHECK(back.gamma == t.gamma);
  CHECK(trace_to_csv(back) == text);
}

TEST_CASE("trace validation rejects impossible delays") {
  Trace t;
  t.V = {1.0, 0.5};
  t.delays = {1, 0};
  CHECK_THROWS_AS(t.validate(), Error);
}
