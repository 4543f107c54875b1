#include "ail/delays.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ail/error.hpp"
#include "ail/format.hpp"

namespace ail {

namespace {

constexpr std::uint64_t kBlockStream = 1;
constexpr std::uint64_t kSubsetStream = 2;
constexpr std::uint64_t kLagStream = 3;

std::size_t isqrt(std::size_t k) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(k)));
  while (r * r > k) --r;
  while ((r + 1) * (r + 1) <= k) ++r;
  return r;
}

std::size_t to_size(std::string_view s, const char* what) {
  auto v = parse_int(s);
  if (!v || *v < 0) throw Error(Errc::invalid_parameters, std::string("bad ") + what + " '" + std::string(s) + "'");
  return static_cast<std::size_t>(*v);
}

double to_real(std::string_view s, const char* what) {
  auto v = parse_real(s);
  if (!v) throw Error(Errc::invalid_parameters, std::string("bad ") + what + " '" + std::string(s) + "'");
  return *v;
}

}  // namespace

DelaySpec DelaySpec::constant(std::size_t tau) {
  DelaySpec s;
  s.kind = Kind::constant;
  s.tau = tau;
  return s;
}

DelaySpec DelaySpec::uniform_random(std::size_t tau_max, std::uint64_t seed) {
  DelaySpec s;
  s.kind = Kind::uniform_random;
  s.tau = tau_max;
  s.seed = seed;
  return s;
}

DelaySpec DelaySpec::two_speed(std::size_t M, double ratio, std::uint64_t seed) {
  DelaySpec s;
  s.kind = Kind::two_speed;
  s.M = M;
  s.ratio = ratio;
  s.seed = seed;
  return s;
}

DelaySpec DelaySpec::linear_growth(double alpha, double beta) {
  DelaySpec s;
  s.kind = Kind::linear_growth;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

DelaySpec DelaySpec::sqrt_floor() {
  DelaySpec s;
  s.kind = Kind::sqrt_floor;
  return s;
}

DelaySpec DelaySpec::parse(std::string_view text, std::uint64_t seed) {
  text = trim(text);
  auto colon = text.find(':');
  auto name = trim(text.substr(0, colon));
  std::vector<std::string_view> args;
  if (colon != std::string_view::npos) args = split(text.substr(colon + 1), ',');
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw Error(Errc::invalid_parameters, "delay '" + std::string(name) + "' takes " + std::to_string(n) + " argument(s)");
  };
  DelaySpec s;
  if (name == "constant") {
    need(1);
    s = constant(to_size(args[0], "tau"));
  } else if (name == "uniform") {
    need(1);
    s = uniform_random(to_size(args[0], "tau"), seed);
  } else if (name == "two-speed") {
    need(2);
    s = two_speed(to_size(args[0], "M"), to_real(args[1], "ratio"), seed);
  } else if (name == "linear") {
    need(2);
    s = linear_growth(to_real(args[0], "alpha"), to_real(args[1], "beta"));
  } else if (name == "sqrt-floor") {
    need(0);
    s = sqrt_floor();
  } else {
    throw Error(Errc::unsupported_family, "unknown delay kind '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

void DelaySpec::validate() const {
  switch (kind) {
    case Kind::two_speed:
      if (M < 1) throw Error(Errc::invalid_parameters, "two-speed needs M >= 1");
      if (!(ratio >= 1.0) || !std::isfinite(ratio)) throw Error(Errc::invalid_parameters, "two-speed ratio must be >= 1");
      break;
    case Kind::linear_growth:
      if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_parameters, "linear growth needs 0 < alpha < 1");
      if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_parameters, "linear growth needs beta >= 0");
      break;
    default:
      break;
  }
}

std::optional<std::size_t> DelaySpec::cap() const {
  switch (kind) {
    case Kind::constant:
    case Kind::uniform_random:
      return tau;
    default:
      return std::nullopt;
  }
}

std::string DelaySpec::describe() const {
  switch (kind) {
    case Kind::constant: return "constant:" + std::to_string(tau);
    case Kind::uniform_random: return "uniform:" + std::to_string(tau);
    case Kind::two_speed: return "two-speed:" + std::to_string(M) + "," + fmt_real(ratio);
    case Kind::linear_growth: return "linear:" + fmt_real(alpha) + "," + fmt_real(beta);
    case Kind::sqrt_floor: return "sqrt-floor";
  }
  return "";
}

const char* delay_kind_name(DelaySpec::Kind k) {
  switch (k) {
    case DelaySpec::Kind::constant: return "constant";
    case DelaySpec::Kind::uniform_random: return "uniform";
    case DelaySpec::Kind::two_speed: return "two-speed";
    case DelaySpec::Kind::linear_growth: return "linear";
    case DelaySpec::Kind::sqrt_floor: return "sqrt-floor";
  }
  return "?";
}

DelaySchedule realize(const DelaySpec& spec, std::size_t K) {
  spec.validate();
  DelaySchedule s;
  s.spec = spec;
  s.delays.resize(K + 1);
  CounterRng rng(spec.seed);
  switch (spec.kind) {
    case DelaySpec::Kind::constant:
      for (std::size_t k = 0; k <= K; ++k) s.delays[k] = std::min(k, spec.tau);
      break;
    case DelaySpec::Kind::uniform_random:
      for (std::size_t k = 0; k <= K; ++k) s.delays[k] = static_cast<std::size_t>(rng.below(std::min(k, spec.tau) + 1, k));
      break;
    case DelaySpec::Kind::two_speed: {
      auto w = WorkerModel::two_speed(spec.M, spec.ratio, spec.seed);
      s.workers.resize(K + 1);
      for (std::size_t k = 0; k <= K; ++k) {
        auto a = w.next_arrival();
        s.delays[k] = a.delay;
        s.workers[k] = a.worker;
      }
      break;
    }
    case DelaySpec::Kind::linear_growth:
      for (std::size_t k = 0; k <= K; ++k) {
        double v = std::floor(spec.alpha * static_cast<double>(k) + spec.beta);
        s.delays[k] = std::min(k, static_cast<std::size_t>(v));
      }
      break;
    case DelaySpec::Kind::sqrt_floor:
      for (std::size_t k = 0; k <= K; ++k) s.delays[k] = isqrt(k);
      break;
  }
  return s;
}

ScheduleStats schedule_stats(const std::vector<std::size_t>& delays) {
  ScheduleStats st;
  if (delays.empty()) return st;
  long double sum = 0;
  for (auto d : delays) {
    st.tau_max = std::max(st.tau_max, d);
    sum += static_cast<long double>(d);
  }
  st.tau_ave = static_cast<double>(sum / static_cast<long double>(delays.size()));
  return st;
}

std::string schedule_to_csv(const DelaySchedule& s) {
  bool with_w = !s.workers.empty();
  bool with_j = !s.jk_sizes.empty();
  std::string out = "k,tau";
  if (with_w) out += ",worker";
  if (with_j) out += ",Jk-size";
  out += '\n';
  for (std::size_t k = 0; k < s.delays.size(); ++k) {
    out += std::to_string(k) + "," + std::to_string(s.delays[k]);
    if (with_w) out += "," + std::to_string(s.workers[k]);
    if (with_j) out += "," + std::to_string(s.jk_sizes[k]);
    out += '\n';
  }
  return out;
}

DelaySchedule schedule_from_csv(std::string_view text) {
  DelaySchedule s;
  auto lines = split(text, '\n');
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw Error(Errc::parse_error, "empty schedule file");
  auto header = split(trim(lines[i]), ',');
  if (header.size() < 2 || trim(header[0]) != "k" || trim(header[1]) != "tau")
    throw Error(Errc::parse_error, "schedule header must start with k,tau");
  int wcol = -1, jcol = -1;
  for (std::size_t c = 2; c < header.size(); ++c) {
    auto h = trim(header[c]);
    if (h == "worker") wcol = static_cast<int>(c);
    else if (h == "Jk-size") jcol = static_cast<int>(c);
    else throw Error(Errc::parse_error, "unknown schedule column '" + std::string(h) + "'");
  }
  for (++i; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != header.size()) throw Error(Errc::parse_error, "schedule row " + std::to_string(i) + " has wrong width");
    auto k = parse_int(trim(cells[0]));
    auto tau = parse_int(trim(cells[1]));
    if (!k || !tau || *tau < 0 || static_cast<std::size_t>(*k) != s.delays.size())
      throw Error(Errc::parse_error, "schedule row " + std::to_string(i) + " is malformed");
    if (*tau > *k) throw Error(Errc::parse_error, "schedule row " + std::to_string(i) + " has tau > k");
    s.delays.push_back(static_cast<std::size_t>(*tau));
    auto cell_size = [&](int c) {
      auto v = parse_int(trim(cells[static_cast<std::size_t>(c)]));
      if (!v || *v < 0) throw Error(Errc::parse_error, "schedule row " + std::to_string(i) + " is malformed");
      return static_cast<std::size_t>(*v);
    };
    if (wcol >= 0) s.workers.push_back(cell_size(wcol));
    if (jcol >= 0) s.jk_sizes.push_back(cell_size(jcol));
  }
  if (s.delays.empty()) throw Error(Errc::parse_error, "schedule has no rows");
  return s;
}

WorkerModel WorkerModel::deterministic(std::vector<double> service_times) {
  if (service_times.empty()) throw Error(Errc::invalid_parameters, "worker model needs M >= 1");
  for (double t : service_times)
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::invalid_parameters, "service times must be positive");
  WorkerModel w;
  w.law_ = Law::deterministic;
  w.params_ = std::move(service_times);
  w.draws_.assign(w.M(), 0);
  w.dispatch_.assign(w.M(), 0);
  w.next_time_.resize(w.M());
  for (std::size_t i = 0; i < w.M(); ++i) w.next_time_[i] = w.draw_service(i);
  return w;
}

WorkerModel WorkerModel::exponential(std::vector<double> rates, std::uint64_t seed) {
  if (rates.empty()) throw Error(Errc::invalid_parameters, "worker model needs M >= 1");
  for (double r : rates)
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(Errc::invalid_parameters, "service rates must be positive");
  WorkerModel w;
  w.law_ = Law::exponential;
  w.params_ = std::move(rates);
  w.rng_ = CounterRng(seed);
  w.draws_.assign(w.M(), 0);
  w.dispatch_.assign(w.M(), 0);
  w.next_time_.resize(w.M());
  for (std::size_t i = 0; i < w.M(); ++i) w.next_time_[i] = w.draw_service(i);
  return w;
}

WorkerModel WorkerModel::two_speed(std::size_t M, double ratio, std::uint64_t seed) {
  if (M < 1) throw Error(Errc::invalid_parameters, "two-speed needs M >= 1");
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) throw Error(Errc::invalid_parameters, "two-speed ratio must be >= 1");
  std::vector<double> t(M, ratio);
  t[static_cast<std::size_t>(CounterRng(seed).below(M, 0))] = 1.0;
  return deterministic(std::move(t));
}

double WorkerModel::draw_service(std::size_t w) {
  if (law_ == Law::deterministic) return params_[w];
  double u = rng_.child(w).uniform(draws_[w]++);
  return -std::log1p(-u) / params_[w];
}

WorkerModel::Arrival WorkerModel::next_arrival() {
  std::size_t w = 0;
  for (std::size_t i = 1; i < M(); ++i)
    if (next_time_[i] < next_time_[w]) w = i;
  Arrival a;
  a.worker = w;
  a.k = k_;
  a.dispatched = dispatch_[w];
  a.delay = k_ - dispatch_[w];
  a.time = next_time_[w];
  dispatch_[w] = k_ + 1;
  next_time_[w] += draw_service(w);
  ++k_;
  return a;
}

WorkerModel::Arrival worker_next_arrival(WorkerModel& w) { return w.next_arrival(); }

void SharedMemoryModel::validate() const {
  if (m < 1) throw Error(Errc::invalid_parameters, "shared-memory model needs m >= 1");
}

std::size_t SharedMemoryModel::block(std::size_t k) const {
  return static_cast<std::size_t>(CounterRng(seed).child(kBlockStream).below(m, k));
}

const char* jlaw_name(SharedMemoryModel::JLaw law) {
  return law == SharedMemoryModel::JLaw::full_window ? "full-window" : "random-subset";
}

ShmRead shm_compose_read(const SharedMemoryModel& model, const Partition& part,
                         const std::deque<BlockUpdate>& recent, const Vec& x_k, std::size_t k) {
  ShmRead out;
  out.x_hat = x_k;
  std::size_t start = k > model.tau ? k - model.tau : 0;
  std::size_t first = k - std::min(k, recent.size());
  if (first > start) throw Error(Errc::index_out_of_range, "update history does not cover the read window");
  auto rec = [&](std::size_t j) -> const BlockUpdate& { return recent[j - first]; };

  if (model.law == SharedMemoryModel::JLaw::full_window) {
    for (std::size_t j = start; j < k; ++j) out.J.push_back(j);
  } else {
    auto rng = CounterRng(model.seed).child(kSubsetStream);
    std::vector<bool> open(part.m(), false);
    for (std::size_t j = start; j < k; ++j) {
      std::size_t b = rec(j).block;
      bool pick = (rng.bits(static_cast<std::uint64_t>(k) * model.tau + (k - 1 - j)) >> 63) != 0;
      if (pick) open[b] = true;
      if (open[b]) out.J.push_back(j);
    }
  }
  std::vector<bool> done(part.m(), false);
  for (std::size_t j : out.J) {
    const auto& u = rec(j);
    if (done[u.block]) continue;
    done[u.block] = true;
    out.x_hat.segment(static_cast<Eigen::Index>(part.offset(u.block)), static_cast<Eigen::Index>(part.sizes[u.block])) = u.before;
  }
  return out;
}

AgentSchedule AgentSchedule::partial(std::size_t m, std::size_t B, std::size_t D, std::uint64_t seed) {
  AgentSchedule s;
  s.m = m;
  s.sets = B > 0 ? UpdateSets::periodic : UpdateSets::all;
  s.B = B;
  s.lags = D > 0 ? Lags::bounded : Lags::none;
  s.D = D;
  s.seed = seed;
  s.validate();
  return s;
}

AgentSchedule AgentSchedule::linear_growth(std::size_t m, double alpha, double beta, std::uint64_t seed) {
  AgentSchedule s;
  s.m = m;
  s.lags = Lags::linear_growth;
  s.alpha = alpha;
  s.beta = beta;
  s.seed = seed;
  s.validate();
  return s;
}

void AgentSchedule::validate() const {
  if (m < 1) throw Error(Errc::invalid_parameters, "agent schedule needs m >= 1");
  if (lags == Lags::linear_growth) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_parameters, "linear growth needs 0 < alpha < 1");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_parameters, "linear growth needs beta >= 0");
  }
}

bool AgentSchedule::updates(std::size_t i, std::size_t k) const {
  if (sets == UpdateSets::all || k == 0) return true;
  return (k + i) % (B + 1) == 0;
}

std::size_t AgentSchedule::lag(std::size_t i, std::size_t j, std::size_t k) const {
  if (i == j) return k;
  auto rng = CounterRng(seed).child(kLagStream);
  std::uint64_t counter = (static_cast<std::uint64_t>(k) * m + i) * m + j;
  switch (lags) {
    case Lags::none:
      return k;
    case Lags::bounded:
      return k - static_cast<std::size_t>(rng.below(std::min(k, D) + 1, counter));
    case Lags::linear_growth: {
      double lo_real = std::ceil((1.0 - alpha) * static_cast<double>(k) - beta);
      std::size_t lo = lo_real > 0.0 ? std::min(k, static_cast<std::size_t>(lo_real)) : 0;
      return lo + static_cast<std::size_t>(rng.below(k - lo + 1, counter));
    }
  }
  return k;
}

}  // namespace ail
