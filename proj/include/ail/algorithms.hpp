#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ail/certificates.hpp"
#include "ail/delays.hpp"
#include "ail/format.hpp"
#include "ail/problems.hpp"

namespace ail {

// ---- closed-form step sizes and rates ----

double piag_gamma_max(double L, std::size_t tau);
// P(x_k) - P* bound for PIAG with alpha_0 = tau; dist0 is |x_0 - x*|^2.
double piag_theorem1_bound(std::size_t k, double gamma, std::size_t tau, double p0_gap, double dist0);
// Iterations after which the theorem-1 bound at gamma_max drops below eps.
double piag_theorem1_k_eps(double L, std::size_t tau, double p0_gap, double dist0, double eps);
double piag_theorem2_rate(double h, double Q, std::size_t tau);

struct SgdGammaMode {
  enum class Kind { convex_max, sconvex_max, convex_eps, sconvex_eps, convex_horizon, sconvex_horizon };
  Kind kind = Kind::convex_max;
  double eps = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  double horizon = 0.0;  // the tuning horizon
  double dist0 = 0.0;    // |x_0 - x*| (not squared)
};

const char* sgd_gamma_mode_name(SgdGammaMode::Kind k);
std::optional<SgdGammaMode::Kind> parse_sgd_gamma_mode(std::string_view s);
double sgd_gamma(const SgdGammaMode& mode, double L, std::size_t tau_th);
std::size_t sgd_tau_threshold(std::size_t M);

double arock_gamma_factor(std::size_t tau, std::size_t m);  // tau/m + sqrt(tau/m)
double arock_gamma(double h, std::size_t tau, std::size_t m);
double arock_rate(double h, double c, std::size_t tau, std::size_t m);
double arock_k_eps(double h, double c, std::size_t tau, std::size_t m, double dist0_sq, double eps);

// ---- runs ----

struct StepSizePolicy {
  enum class Kind { constant, delay_adaptive };
  Kind kind = Kind::constant;
  double gamma = 0.0;
  std::size_t tau_th = 0;

  static StepSizePolicy constant(double gamma);
  static StepSizePolicy delay_adaptive(double gamma, std::size_t tau_th);
  void validate() const;
  double at(std::size_t delay) const;
};

// A further monitored quantity with its own bound (same pass rule as the primary one).
struct BoundSeries {
  std::string name;
  std::vector<double> monitored;
  std::vector<double> bound;
  Verdict verdict;
};

struct RunResult {
  Trace trace;
  std::vector<std::size_t> iterate_index;
  std::vector<Vec> iterates;  // every ceil(K/1000)-th iterate plus the last
  // Quantity compared against `bound`, one entry per k. For seeded methods this
  // is the seed mean.
  std::vector<double> monitored;
  std::vector<double> bound;  // +inf where the theorem says nothing
  double margin = 1.0;        // monitored_k <= margin * bound_k is the pass condition
  Verdict verdict;
  std::optional<RecursionForm> form;  // recursion the trace should satisfy
  std::optional<Verdict> recursion;   // result of checking it
  std::vector<BoundSeries> extra;
  Vec x_final;
  KvReport metadata;
  bool pass() const;
};

std::size_t thinning_stride(std::size_t K);

enum class GdLyapunov { sq_dist, fn_gap };

// x_{k+1} = x_k - gamma grad f(x_{k - tau_k})
RunResult delayed_gd(const SmoothSum& f, double gamma, const std::vector<std::size_t>& delays, std::size_t K,
                     GdLyapunov lyap, const Vec& x0);

// Full-gradient proximal gradient.
RunResult pg(const SmoothSum& F, const Regularizer& R, double gamma, std::size_t K, const Vec& x0);

enum class PiagMode { theorem1, theorem2 };

struct PiagOrder {
  enum class Kind { cyclic, server };
  Kind kind = Kind::cyclic;
  std::optional<WorkerModel> workers;  // server: worker w owns component w
  static PiagOrder cyclic() { return {}; }
  static PiagOrder server(WorkerModel w) { return {Kind::server, std::move(w)}; }
};

struct PiagOptions {
  PiagMode mode = PiagMode::theorem1;
  // theorem 2: h defining the bound; the growth constant comes from the problem
  double h = 1.0;
  // record the stale index of every stored gradient for replay checks
  bool record_table = false;
};

struct PiagTableLog {
  // stale[k][i] = index of the iterate at which stored gradient i was evaluated after step k
  std::vector<std::vector<std::size_t>> stale;
  // aggregated gradient g_k actually used at step k
  std::vector<Vec> g;
};

RunResult piag(const SmoothSum& F, const Regularizer& R, double gamma, PiagOrder order, std::size_t K,
               const Vec& x0, const PiagOptions& opt = {}, PiagTableLog* log = nullptr);

enum class SgdRegime { convex, strongly_convex };

struct SgdDelaySource {
  std::optional<WorkerModel> workers;
  std::optional<DelaySchedule> schedule;
};

struct SgdOptions {
  SgdRegime regime = SgdRegime::strongly_convex;
  double margin = 1.1;
  // threshold used in the recursion check (defaults to the policy threshold, or tau_max)
  std::optional<std::size_t> tau_th;
};

// Per-seed traces are averaged; trace.V holds the seed mean of |x_k - x*|^2.
struct SgdRun {
  RunResult mean;
  std::vector<Trace> per_seed;
  std::vector<double> final_sq_dist;  // per seed
  std::vector<double> tau_ave;        // per seed
};

SgdRun async_sgd(const StochasticOracle& oracle, const SgdDelaySource& delays, const StepSizePolicy& policy,
                 std::size_t K, const std::vector<std::uint64_t>& seeds, const Vec& x0, const SgdOptions& opt = {});

struct ArockOptions {
  double margin = 1.1;
  // pass condition checked at multiples of this (0 = every k)
  std::size_t checkpoint_every = 0;
  bool diagnostics = true;
};

struct ArockRun {
  RunResult mean;
  std::vector<std::vector<double>> per_seed_V;
  std::vector<double> read_gap;       // seed mean of |x_k - xhat_k|^2
  std::vector<double> residual_sq;    // seed mean of |S(xhat_k)|^2
  std::vector<double> read_gap_bound; // gamma^2 (sqrt m + sqrt tau)^2 / m^2 * window sum of residual_sq
  Verdict read_gap_verdict;
  std::vector<std::size_t> jk_sizes;  // |J_k| of the first seed
};

ArockRun arock(const FixedPointOperator& op, const SharedMemoryModel& shm, double h, std::size_t K,
               const std::vector<std::uint64_t>& seeds, const Vec& x0, const ArockOptions& opt = {});

// x_{k+1} = x_k - gamma U_i S_i(x_k) with i drawn from the block sampler of the given seed.
std::vector<Vec> serial_stochastic_km(const FixedPointOperator& op, std::uint64_t block_seed, double gamma,
                                      std::size_t K, const Vec& x0);

RunResult totally_async(const FixedPointOperator& op, const AgentSchedule& sched, std::size_t K, const Vec& x0);

// Seed i of a run rooted at `root`.
std::vector<std::uint64_t> derive_seeds(std::uint64_t root, std::size_t count);

}  // namespace ail
