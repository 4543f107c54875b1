#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ail/problems.hpp"
#include "ail/rng.hpp"

namespace ail {

// Delay generator description. realize() turns it into a concrete sequence.
struct DelaySpec {
  enum class Kind { constant, uniform_random, two_speed, linear_growth, sqrt_floor };
  Kind kind = Kind::constant;
  std::size_t tau = 0;    // constant value or uniform cap
  std::size_t M = 1;      // two-speed worker count
  double ratio = 1.0;     // two-speed slow/fast service-time ratio
  double alpha = 0.0;     // linear growth
  double beta = 0.0;
  std::uint64_t seed = 0;

  static DelaySpec constant(std::size_t tau);
  static DelaySpec uniform_random(std::size_t tau_max, std::uint64_t seed);
  static DelaySpec two_speed(std::size_t M, double ratio, std::uint64_t seed);
  static DelaySpec linear_growth(double alpha, double beta);
  static DelaySpec sqrt_floor();
  // "constant:3", "uniform:5", "two-speed:2,1000", "linear:0.2,0", "sqrt-floor"
  static DelaySpec parse(std::string_view text, std::uint64_t seed = 0);

  void validate() const;
  // Declared upper bound on tau_k, if the family has a constant one.
  std::optional<std::size_t> cap() const;
  std::string describe() const;
};

const char* delay_kind_name(DelaySpec::Kind k);

struct DelaySchedule {
  DelaySpec spec;
  std::vector<std::size_t> delays;        // tau_0 .. tau_K
  std::vector<std::size_t> workers;       // arriving worker per step (worker-driven kinds)
  std::vector<std::size_t> jk_sizes;      // |J_k| per step (shared-memory runs)

  std::size_t horizon() const { return delays.empty() ? 0 : delays.size() - 1; }
};

DelaySchedule realize(const DelaySpec& spec, std::size_t K);

struct ScheduleStats {
  std::size_t tau_max = 0;
  double tau_ave = 0.0;
};

ScheduleStats schedule_stats(const std::vector<std::size_t>& delays);
inline ScheduleStats schedule_stats(const DelaySchedule& s) { return schedule_stats(s.delays); }

// k,tau[,worker][,Jk-size]
std::string schedule_to_csv(const DelaySchedule& s);
DelaySchedule schedule_from_csv(std::string_view text);

// Parameter-server style workers. All workers start on x_0; whenever a gradient
// arrives the master performs update k and hands x_{k+1} back to that worker.
class WorkerModel {
 public:
  enum class Law { deterministic, exponential };

  static WorkerModel deterministic(std::vector<double> service_times);
  static WorkerModel exponential(std::vector<double> rates, std::uint64_t seed);
  // One fast worker with service time 1 and M-1 workers with service time ratio;
  // the seed picks which worker is fast.
  static WorkerModel two_speed(std::size_t M, double ratio, std::uint64_t seed);

  struct Arrival {
    std::size_t worker = 0;
    std::size_t delay = 0;
    std::size_t k = 0;           // master update index served by this arrival
    std::size_t dispatched = 0;  // index of the iterate the gradient was computed at
    double time = 0.0;
  };

  Arrival next_arrival();

  std::size_t M() const { return params_.size(); }
  Law law() const { return law_; }
  std::size_t updates() const { return k_; }
  // Index of the iterate currently held by worker w.
  std::size_t dispatched(std::size_t w) const { return dispatch_[w]; }

 private:
  double draw_service(std::size_t w);

  Law law_ = Law::deterministic;
  std::vector<double> params_;
  CounterRng rng_;
  std::vector<std::uint64_t> draws_;
  std::vector<double> next_time_;
  std::vector<std::size_t> dispatch_;
  std::size_t k_ = 0;
};

WorkerModel::Arrival worker_next_arrival(WorkerModel& w);

// Shared-memory read model for block-coordinate updates.
struct SharedMemoryModel {
  enum class JLaw { full_window, random_subset };
  std::size_t m = 1;
  std::size_t tau = 0;
  JLaw law = JLaw::full_window;
  std::uint64_t seed = 0;

  void validate() const;
  // Block updated at step k, uniform on [m].
  std::size_t block(std::size_t k) const;
};

const char* jlaw_name(SharedMemoryModel::JLaw law);

// A single-block write: x_{j+1} - x_j is zero outside `block`, and the block held
// `before` prior to the write.
struct BlockUpdate {
  std::size_t block = 0;
  Vec before;
  Vec delta;
};

struct ShmRead {
  Vec x_hat;
  std::vector<std::size_t> J;  // ascending
};

// recent holds the updates j = k - recent.size() .. k-1 (at least min(k, tau) of them).
// Random subsets are closed per block under later writes so every block of the
// read equals a value that block actually held. The sum of undone writes on a block
// telescopes to the value before its earliest undone write, which is what is used.
ShmRead shm_compose_read(const SharedMemoryModel& model, const Partition& part,
                         const std::deque<BlockUpdate>& recent, const Vec& x_k, std::size_t k);

// Update sets K_i and information lags s_{ij,k} for m agents.
struct AgentSchedule {
  enum class UpdateSets { all, periodic };
  enum class Lags { none, bounded, linear_growth };
  std::size_t m = 1;
  UpdateSets sets = UpdateSets::all;
  std::size_t B = 0;
  Lags lags = Lags::none;
  std::size_t D = 0;
  double alpha = 0.0, beta = 0.0;
  std::uint64_t seed = 0;

  static AgentSchedule partial(std::size_t m, std::size_t B, std::size_t D, std::uint64_t seed);
  static AgentSchedule linear_growth(std::size_t m, double alpha, double beta, std::uint64_t seed);

  void validate() const;
  // k in K_i; K_i = {0} and every k with (k + i) divisible by B+1 in periodic mode.
  bool updates(std::size_t i, std::size_t k) const;
  // s_{ij,k}; s_{ii,k} = k.
  std::size_t lag(std::size_t i, std::size_t j, std::size_t k) const;
  bool partial_mode() const { return lags != Lags::linear_growth; }
};

}  // namespace ail
