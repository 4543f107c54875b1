#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ail/error.hpp"
#include "ail/problems.hpp"
#include "oracles.hpp"

using namespace ail;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (double x : xs) v[j++] = x;
  return v;
}

}  // namespace

TEST_CASE("component gradient examples") {
  Mat A = Mat::Zero(2, 3);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  auto ls = SmoothSum::least_squares(A, vec({0.0, 1.0}));
  Vec g = component_gradient(ls, 0, vec({2.0, 0.0, 0.0}));
  CHECK(g == vec({2.0, 0.0, 0.0}));
  CHECK(ls.component_L(0) == 1.0);

  Mat B(2, 2);
  B << 1.0, 2.0, -3.0, 0.5;
  auto lg = SmoothSum::logistic(B, vec({1.0, -1.0}));
  for (std::size_t i = 0; i < 2; ++i) {
    Vec want = -lg.b()[static_cast<Eigen::Index>(i)] * B.row(static_cast<Eigen::Index>(i)).transpose() / 2.0;
    CHECK((component_gradient(lg, i, Vec::Zero(2)) - want).norm() < 1e-15);
  }
  try {
    component_gradient(ls, 2, Vec::Zero(3));
    FAIL("expected index error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::index_out_of_range);
  }
}

TEST_CASE("gradients match finite differences") {
  for (const char* fam : {"least-squares", "logistic", "quadratic"}) {
    auto r = oracle::gradient_suite(fam, 11);
    INFO(fam << " worst relative error " << r.worst);
    CHECK(r.instances == 100);
    CHECK(r.worst <= 1e-6);
  }
}

TEST_CASE("objective examples") {
  auto q = make_quadratic(5, 1.0, 10.0, 3);
  CHECK(full_gradient(q, q.x_star()).norm() < 1e-12);
  auto zero = SmoothSum::least_squares(Mat::Zero(1, 2), Vec::Zero(1));
  CHECK(objective(zero, Regularizer::l1(1.0), vec({1.0, -2.0})) == 3.0);
  auto box = Regularizer::box(vec({0.0}), vec({1.0}));
  CHECK(std::isinf(objective(zero, box, vec({2.0, 0.5}))));

  auto ls = make_least_squares(30, 6, 5);
  // independent normal-equation minimizer
  Mat AtA = ls.A().transpose() * ls.A();
  Vec xs = AtA.ldlt().solve(ls.A().transpose() * ls.b());
  double Pstar = ls.value(xs);
  CHECK((xs - ls.x_star()).norm() < 1e-9);
  std::mt19937_64 g(1);
  for (int t = 0; t < 50; ++t) CHECK(objective(ls, Regularizer::none(), oracle::random_vec(g, 6)) >= Pstar);
}

TEST_CASE("least-squares smoothness constant dominates the Hessian") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto ls = make_least_squares(15, 5, s);
    Mat H = ls.A().transpose() * ls.A() / 15.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    CHECK(ls.L() >= es.eigenvalues().maxCoeff() * (1 - 1e-12));
    for (std::size_t i = 0; i < 15; ++i)
      CHECK(ls.component_L(i) == doctest::Approx(ls.A().row(static_cast<Eigen::Index>(i)).squaredNorm()).epsilon(1e-14));
  }
}

TEST_CASE("prox examples") {
  CHECK(prox(Regularizer::none(), 0.3, vec({1.0, -2.0})) == vec({1.0, -2.0}));
  CHECK(prox(Regularizer::l1(1.0), 0.5, vec({2.0}))[0] == 1.5);
  CHECK(prox(Regularizer::box(vec({0.0}), vec({1.0})), 0.5, vec({1.7}))[0] == 1.0);
  CHECK_THROWS_AS(prox(Regularizer::l1(1.0), 0.0, vec({2.0})), Error);
}

TEST_CASE("prox satisfies the optimality inclusion") {
  CHECK(oracle::prox_suite(99) <= 1e-9);
}

TEST_CASE("prox is nonexpansive") {
  std::mt19937_64 g(5);
  for (const auto& r : oracle::regularizer_zoo(4))
    for (int t = 0; t < 200; ++t) {
      double gamma = 0.1 + t * 0.01;
      Vec x = oracle::random_vec(g, 4, 2.0), y = oracle::random_vec(g, 4, 2.0);
      CHECK((prox(r, gamma, x) - prox(r, gamma, y)).norm() <= (x - y).norm() * (1 + 1e-15));
    }
}

TEST_CASE("projection onto the least-squares solution set") {
  Mat A(1, 2);
  A << 1.0, 0.0;
  auto ls = SmoothSum::least_squares(A, vec({1.0}));
  Vec p = projection_solution_set(ls, vec({0.0, 0.0}));
  CHECK((p - vec({1.0, 0.0})).norm() < 1e-12);
  Vec on = vec({1.0, 5.0});
  CHECK((projection_solution_set(ls, on) - on).norm() < 1e-12);

  auto rd = make_least_squares(20, 10, 4, 6);
  std::mt19937_64 g(3);
  for (int t = 0; t < 20; ++t) {
    Vec x = oracle::random_vec(g, 10, 3.0);
    Vec px = projection_solution_set(rd, x);
    CHECK((rd.A().transpose() * (rd.A() * px - rd.b())).norm() < 1e-8);
    CHECK((projection_solution_set(rd, px) - px).norm() < 1e-8);
    // x - P(x) is orthogonal to the null space direction set, so P(x) is the closest solution
    Vec other = px + (Mat::Identity(10, 10) - rd.A().completeOrthogonalDecomposition().pseudoInverse() * rd.A()) * oracle::random_vec(g, 10);
    CHECK((x - px).norm() <= (x - other).norm() + 1e-9);
  }
  auto lg = make_logistic(8, 2, 1);
  try {
    projection_solution_set(lg, Vec::Zero(2));
    FAIL("expected unsupported problem");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_problem);
  }
}

TEST_CASE("stochastic oracle is unbiased with the declared variance") {
  auto q = make_quadratic(4, 1.0, 5.0, 2);
  Vec x = vec({0.3, -1.0, 2.0, 0.5});
  Vec g = full_gradient(q, x);
  StochasticOracle exact{q, StochasticOracle::Noise::additive_gaussian, 0.0, 9};
  CHECK(stochastic_gradient(exact, x, 17) == g);

  StochasticOracle noisy{q, StochasticOracle::Noise::additive_gaussian, 1.5, 9};
  const int N = 100000;
  Vec sum = Vec::Zero(4);
  double sq = 0.0;
  for (int k = 0; k < N; ++k) {
    Vec s = stochastic_gradient(noisy, x, static_cast<std::uint64_t>(k));
    sum += s;
    sq += (s - g).squaredNorm();
  }
  Vec mean = sum / N;
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(mean[j] - g[j]) <= 4.0 * 1.5 / std::sqrt(static_cast<double>(N)));
  CHECK(sq / N <= 1.5 * 1.5 * 1.05);
  CHECK(stochastic_gradient(noisy, x, 123) == stochastic_gradient(noisy, x, 123));

  auto ls = make_least_squares(12, 3, 8);
  StochasticOracle sampling{ls, StochasticOracle::Noise::finite_sum_sampling, 0.0, 4};
  Vec x3 = vec({1.0, 2.0, -1.0});
  Vec acc = Vec::Zero(3);
  for (int k = 0; k < N; ++k) acc += stochastic_gradient(sampling, x3, static_cast<std::uint64_t>(k));
  CHECK(((acc / N) - full_gradient(ls, x3)).norm() < 0.05 * (1.0 + full_gradient(ls, x3).norm()));
}

TEST_CASE("operator examples") {
  auto T = FixedPointOperator::affine(0.5 * Mat::Identity(3, 3), Vec::Zero(3), Partition::scalar(3), NormKind::euclidean);
  CHECK(T.modulus() == 0.5);
  CHECK(operator_apply(T, vec({2.0, 4.0, -6.0})) == vec({1.0, 2.0, -3.0}));
  auto E = make_affine_euclidean(8, 0.6, 4, Partition::even(8, 4));
  CHECK((operator_apply(E, E.fixed_point()) - E.fixed_point()).norm() < 1e-12);
  CHECK(residual_apply(E, E.fixed_point()).norm() < 1e-12);
  Vec x = Vec::LinSpaced(8, -1.0, 1.0);
  Vec full = residual_apply(E, x);
  CHECK((residual_apply(E, x, 1) - full.segment(2, 2)).norm() < 1e-15);
  CHECK_THROWS_AS(operator_apply(E, Vec::Zero(5)), Error);
  CHECK_THROWS_AS(FixedPointOperator::affine(0.5 * Mat::Identity(3, 3), Vec::Zero(3), Partition::scalar(3), NormKind::euclidean, 0.4),
                  Error);
}

TEST_CASE("prox-gradient operator contracts at the declared modulus") {
  auto F = make_quadratic(6, 1.0, 9.0, 12);
  auto T = FixedPointOperator::prox_grad(F, Regularizer::none(), Partition::scalar(6));
  CHECK(T.modulus() == doctest::Approx(0.8).epsilon(1e-14));
  std::mt19937_64 g(8);
  for (int t = 0; t < 1000; ++t) {
    Vec x = T.fixed_point() + oracle::random_vec(g, 6);
    CHECK((T.apply(x) - T.fixed_point()).norm() <= (0.8 + 1e-9) * (x - T.fixed_point()).norm());
  }
}

TEST_CASE("modulus estimates stay below the declared modulus") {
  for (const auto& m : oracle::modulus_suite(21)) {
    INFO(m.name << " estimate " << m.estimate << " declared " << m.declared);
    CHECK(m.estimate <= m.declared + 1e-9);
    CHECK(m.estimate > 0.0);
  }
  auto I = FixedPointOperator::affine(0.5 * Mat::Identity(4, 4), Vec::Zero(4), Partition::scalar(4), NormKind::euclidean);
  CHECK(contraction_modulus_estimate(I, Vec::Zero(4), 50, 1) == doctest::Approx(0.5).epsilon(1e-15));
  Partition p = Partition::even(12, 4);
  auto B = make_affine_block_max(12, 0.9, 3, p);
  CHECK(block_row_sum_bound(B.C(), p) <= 0.9 + 1e-12);
}

TEST_CASE("block max norm") {
  std::mt19937_64 g(4);
  Vec x = oracle::random_vec(g, 7);
  CHECK(block_max_norm(x, Partition::scalar(7)) == x.cwiseAbs().maxCoeff());
  CHECK(block_max_norm(Vec::Zero(4), Partition::even(4, 2)) == 0.0);
  Partition two{{2, 2}, {1.0, 2.0}};
  CHECK(block_max_norm(vec({1, 2, 3, 4}), two) == 10.0);
  for (int t = 0; t < 500; ++t) {
    Vec a = oracle::random_vec(g, 4), b = oracle::random_vec(g, 4);
    double s = std::uniform_real_distribution<double>(-5, 5)(g);
    CHECK(block_max_norm(a + b, two) <= block_max_norm(a, two) + block_max_norm(b, two) + 1e-14);
    CHECK(block_max_norm(s * a, two) == doctest::Approx(std::abs(s) * block_max_norm(a, two)).epsilon(1e-14));
    CHECK(block_max_norm(a, two) > 0.0);
  }
  CHECK_THROWS_AS(block_max_norm(Vec::Zero(3), two), Error);
}

TEST_CASE("instance serialization round trip") {
  for (const char* fam : {"least-squares", "logistic", "quadratic"}) {
    auto p = generate_problem(fam, 10, 4, 77);
    auto text = serialize_problem(p);
    auto back = parse_problem(text);
    CHECK(back.family() == p.family());
    CHECK(back.A() == p.A());
    CHECK(back.b() == p.b());
    CHECK(serialize_problem(back) == text);
  }
  CHECK_THROWS_AS(parse_problem("family = nonsense\n"), Error);
}

TEST_CASE("generators are deterministic in their address") {
  auto a = make_least_squares(10, 3, 5), b = make_least_squares(10, 3, 5), c = make_least_squares(10, 3, 6);
  CHECK(a.A() == b.A());
  CHECK(a.A() != c.A());
  auto rd = make_least_squares(20, 10, 4, 6);
  REQUIRE(rd.growth().has_value());
  CHECK(*rd.growth() > 0.0);
}
