#include <algorithm>
#include <cmath>

#include "ail/algorithms.hpp"
#include "ail/error.hpp"

namespace ail {

namespace {

void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

double as_real(std::size_t v) { return static_cast<double>(v); }

}  // namespace

double piag_gamma_max(double L, std::size_t tau) {
  require(L > 0.0 && std::isfinite(L), Errc::invalid_parameters, "L must be positive");
  return 1.0 / (L * (2.0 * as_real(tau) + 1.0));
}

double piag_theorem1_bound(std::size_t k, double gamma, std::size_t tau, double p0_gap, double dist0) {
  require(gamma > 0.0, Errc::invalid_gamma, "gamma must be positive");
  require(p0_gap >= 0.0 && dist0 >= 0.0, Errc::invalid_parameters, "initial gap and distance must be non-negative");
  double denom = as_real(k) + as_real(tau);
  if (denom == 0.0) return HUGE_VAL;
  return (dist0 / (2.0 * gamma) + as_real(tau) * p0_gap) / denom;
}

double piag_theorem1_k_eps(double L, std::size_t tau, double p0_gap, double dist0, double eps) {
  require(L > 0.0, Errc::invalid_parameters, "L must be positive");
  require(eps > 0.0, Errc::invalid_parameters, "eps must be positive");
  double t = as_real(tau);
  return (L * dist0 + 2.0 * t * (L * dist0 + p0_gap)) / (2.0 * eps) - t;
}

double piag_theorem2_rate(double h, double Q, std::size_t tau) {
  require(h > 0.0 && h <= 1.0, Errc::invalid_h, "h must lie in (0, 1]");
  require(Q >= 1.0 && std::isfinite(Q), Errc::invalid_parameters, "Q must be at least 1");
  return 1.0 - 1.0 / (1.0 + (Q + 1.0) * (2.0 * as_real(tau) + 1.0) / h);
}

const char* sgd_gamma_mode_name(SgdGammaMode::Kind k) {
  switch (k) {
    case SgdGammaMode::Kind::convex_max: return "convex-max";
    case SgdGammaMode::Kind::sconvex_max: return "sconvex-max";
    case SgdGammaMode::Kind::convex_eps: return "convex-eps";
    case SgdGammaMode::Kind::sconvex_eps: return "sconvex-eps";
    case SgdGammaMode::Kind::convex_horizon: return "convex-horizon";
    case SgdGammaMode::Kind::sconvex_horizon: return "sconvex-horizon";
  }
  return "?";
}

std::optional<SgdGammaMode::Kind> parse_sgd_gamma_mode(std::string_view s) {
  for (auto k : {SgdGammaMode::Kind::convex_max, SgdGammaMode::Kind::sconvex_max, SgdGammaMode::Kind::convex_eps,
                 SgdGammaMode::Kind::sconvex_eps, SgdGammaMode::Kind::convex_horizon,
                 SgdGammaMode::Kind::sconvex_horizon})
    if (s == sgd_gamma_mode_name(k)) return k;
  return std::nullopt;
}

double sgd_gamma(const SgdGammaMode& mode, double L, std::size_t tau_th) {
  require(L > 0.0 && std::isfinite(L), Errc::invalid_parameters, "L must be positive");
  const double t = as_real(tau_th);
  const double convex_cap = 1.0 / (L * (t * std::sqrt(2.0) + 1.0));
  const double sconvex_cap = 1.0 / (L * (2.0 * t + 1.0));
  auto need_sigma = [&] { require(mode.sigma > 0.0, Errc::invalid_parameters, "sigma must be positive"); };
  switch (mode.kind) {
    case SgdGammaMode::Kind::convex_max:
      return convex_cap;
    case SgdGammaMode::Kind::sconvex_max:
      return sconvex_cap;
    case SgdGammaMode::Kind::convex_eps:
      need_sigma();
      require(mode.eps > 0.0, Errc::invalid_parameters, "eps must be positive");
      return std::min(convex_cap, mode.eps / (2.0 * (std::sqrt(2.0) + 1.0) * mode.sigma * mode.sigma));
    case SgdGammaMode::Kind::sconvex_eps:
      need_sigma();
      require(mode.eps > 0.0 && mode.mu > 0.0, Errc::invalid_parameters, "eps and mu must be positive");
      return std::min(sconvex_cap, mode.eps * mode.mu / (4.0 * mode.sigma * mode.sigma));
    case SgdGammaMode::Kind::convex_horizon:
      need_sigma();
      require(mode.horizon >= 1.0 && mode.dist0 > 0.0, Errc::invalid_parameters, "horizon and distance must be positive");
      return std::min(convex_cap, mode.dist0 / (mode.sigma * std::sqrt(std::sqrt(2.0) + 1.0) * std::sqrt(mode.horizon + 1.0)));
    case SgdGammaMode::Kind::sconvex_horizon: {
      need_sigma();
      require(mode.horizon >= 1.0 && mode.dist0 > 0.0 && mode.mu > 0.0, Errc::invalid_parameters,
              "horizon, distance and mu must be positive");
      double kk = mode.horizon;
      double tuned = 2.0 / (mode.mu * kk) *
                     std::log1p(mode.mu * mode.mu * kk * mode.dist0 * mode.dist0 / (4.0 * mode.sigma * mode.sigma));
      return std::min(sconvex_cap, tuned);
    }
  }
  return convex_cap;
}

std::size_t sgd_tau_threshold(std::size_t M) {
  require(M >= 1, Errc::invalid_parameters, "M must be at least 1");
  return 2 * (M - 1);
}

double arock_gamma_factor(std::size_t tau, std::size_t m) {
  require(m >= 1, Errc::invalid_parameters, "m must be at least 1");
  double r = as_real(tau) / as_real(m);
  return r + std::sqrt(r);
}

double arock_gamma(double h, std::size_t tau, std::size_t m) {
  require(h > 0.0 && h <= 1.0, Errc::invalid_h, "h must lie in (0, 1]");
  return h / (1.0 + 5.0 * arock_gamma_factor(tau, m));
}

double arock_rate(double h, double c, std::size_t tau, std::size_t m) {
  require(h > 0.0 && h <= 1.0, Errc::invalid_h, "h must lie in (0, 1]");
  require(c >= 0.0 && c < 1.0, Errc::invalid_parameters, "c must lie in [0, 1)");
  return 1.0 - h * (1.0 - c * c) / (as_real(m) * (1.0 + 6.0 * arock_gamma_factor(tau, m)));
}

double arock_k_eps(double h, double c, std::size_t tau, std::size_t m, double dist0_sq, double eps) {
  require(h > 0.0 && h <= 1.0, Errc::invalid_h, "h must lie in (0, 1]");
  require(c >= 0.0 && c < 1.0, Errc::invalid_parameters, "c must lie in [0, 1)");
  require(dist0_sq > 0.0 && eps > 0.0, Errc::invalid_parameters, "distance and eps must be positive");
  return as_real(m) * (1.0 + 6.0 * arock_gamma_factor(tau, m)) / (h * (1.0 - c * c)) * std::log(dist0_sq / eps);
}

StepSizePolicy StepSizePolicy::constant(double gamma) {
  StepSizePolicy p;
  p.gamma = gamma;
  p.validate();
  return p;
}

StepSizePolicy StepSizePolicy::delay_adaptive(double gamma, std::size_t tau_th) {
  StepSizePolicy p;
  p.kind = Kind::delay_adaptive;
  p.gamma = gamma;
  p.tau_th = tau_th;
  p.validate();
  return p;
}

void StepSizePolicy::validate() const {
  require(gamma > 0.0 && std::isfinite(gamma), Errc::invalid_gamma, "gamma must be positive");
}

double StepSizePolicy::at(std::size_t delay) const {
  if (kind == Kind::delay_adaptive && delay > tau_th) return 0.0;
  return gamma;
}

bool RunResult::pass() const {
  if (!verdict.pass || (recursion && !recursion->pass)) return false;
  for (const auto& e : extra)
    if (!e.verdict.pass) return false;
  return true;
}

std::size_t thinning_stride(std::size_t K) { return std::max<std::size_t>(1, (K + 999) / 1000); }

std::vector<std::uint64_t> derive_seeds(std::uint64_t root, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  auto rng = CounterRng(root).child(0x5eed);
  for (std::size_t i = 0; i < count; ++i) out[i] = rng.bits(i);
  return out;
}

}  // namespace ail
