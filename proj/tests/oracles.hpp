#pragma once

// Reference checks written independently of the library internals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ail/problems.hpp"

namespace oracle {

using ail::Vec;

inline Vec random_vec(std::mt19937_64& g, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vec v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = n(g);
  return v;
}

// Central differences with step 1e-5 (1 + |x|).
template <class F>
Vec fd_gradient(F&& f, const Vec& x) {
  const double h = 1e-5 * (1.0 + x.norm());
  Vec g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(const Vec& got, const Vec& want) {
  double den = want.norm();
  return den == 0.0 ? got.norm() : (got - want).norm() / den;
}

struct GradientCheck {
  double worst = 0.0;
  std::size_t instances = 0;
};

// 100 random (instance, x) pairs of one family; full gradient and one component each.
inline GradientCheck gradient_suite(const std::string& family, std::uint64_t seed0) {
  GradientCheck out;
  std::mt19937_64 g(seed0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t d = 2 + g() % 7;
    const std::size_t n = 2 * d + g() % 10;
    auto P = ail::generate_problem(family, n, d, seed0 * 1000 + s);
    Vec x = random_vec(g, d);
    auto F = [&](const Vec& y) { return P.value(y); };
    out.worst = std::max(out.worst, rel_err(ail::full_gradient(P, x), fd_gradient(F, x)));
    const std::size_t i = g() % P.n();
    auto fi = [&](const Vec& y) { return P.component_value(i, y); };
    out.worst = std::max(out.worst, rel_err(ail::component_gradient(P, i, x), fd_gradient(fi, x)));
    ++out.instances;
  }
  return out;
}

// Chooses g in the subdifferential of R at u closest to (x - u) / gamma and returns
// |u - x + gamma g|; returns +inf when u is outside dom R.
inline double prox_subgradient_residual(const ail::Regularizer& r, double gamma, const Vec& x, const Vec& u) {
  using K = ail::Regularizer::Kind;
  Vec g(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double want = (x[j] - u[j]) / gamma;
    auto l1_part = [&](double lam, double smooth) {
      // subdifferential of lam |t| + smooth at u_j
      if (u[j] > 0) return lam + smooth;
      if (u[j] < 0) return -lam + smooth;
      return std::clamp(want - smooth, -lam, lam) + smooth;
    };
    switch (r.kind) {
      case K::none: g[j] = 0.0; break;
      case K::l1: g[j] = l1_part(r.lambda, 0.0); break;
      case K::sq_l2: g[j] = 2.0 * r.lambda * u[j]; break;
      case K::elastic: g[j] = l1_part(r.lambda2, 2.0 * r.lambda1 * u[j]); break;
      case K::box: {
        const auto k = static_cast<std::size_t>(j);
        const double lo = r.lo_at(k), hi = r.hi_at(k);
        if (u[j] < lo || u[j] > hi) return HUGE_VAL;
        // normal cone of [lo, hi] at u_j
        double gl = u[j] == lo ? -HUGE_VAL : 0.0;
        double gh = u[j] == hi ? HUGE_VAL : 0.0;
        g[j] = std::clamp(want, gl, gh);
        break;
      }
    }
  }
  return (u - x + gamma * g).norm();
}

inline std::vector<ail::Regularizer> regularizer_zoo(std::size_t d) {
  return {ail::Regularizer::none(),
          ail::Regularizer::l1(0.7),
          ail::Regularizer::sq_l2(0.3),
          ail::Regularizer::box(Vec::Constant(static_cast<Eigen::Index>(d), -0.5), Vec::Constant(static_cast<Eigen::Index>(d), 0.8)),
          ail::Regularizer::elastic(0.4, 0.6)};
}

// Worst prox residual over 200 random (gamma, x) per regularizer kind.
inline double prox_suite(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  double worst = 0.0;
  for (const auto& r : regularizer_zoo(6))
    for (int t = 0; t < 200; ++t) {
      double gamma = std::exp(std::uniform_real_distribution<double>(-4.0, 2.0)(g));
      Vec x = random_vec(g, 6, 2.0);
      worst = std::max(worst, prox_subgradient_residual(r, gamma, x, ail::prox(r, gamma, x)));
    }
  return worst;
}

struct ModulusCheck {
  std::string name;
  double estimate = 0.0;
  double declared = 0.0;
};

// One instance per operator family, including the prox-gradient map with each regularizer.
inline std::vector<ModulusCheck> modulus_suite(std::uint64_t seed) {
  std::vector<ModulusCheck> out;
  auto add = [&](const std::string& name, const ail::FixedPointOperator& T) {
    out.push_back({name, ail::contraction_modulus_estimate(T, T.fixed_point(), 1000, seed), T.modulus()});
  };
  const std::size_t d = 12;
  add("affine-euclidean", ail::make_affine_euclidean(d, 0.5, seed, ail::Partition::even(d, 4)));
  add("affine-block-max", ail::make_affine_block_max(d, 0.9, seed, ail::Partition::even(d, 4)));
  add("scaled-identity", ail::FixedPointOperator::affine(0.5 * ail::Mat::Identity(d, d), Vec::Zero(d), ail::Partition::scalar(d),
                                                        ail::NormKind::euclidean, 0.5));
  auto F = ail::make_quadratic(d, 1.0, 10.0, seed);
  for (const auto& r : regularizer_zoo(d))
    add(std::string("prox-grad/") + ail::regularizer_kind_name(r.kind), ail::FixedPointOperator::prox_grad(F, r, ail::Partition::even(d, 4)));
  return out;
}

}  // namespace oracle
