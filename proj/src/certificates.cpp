#include "ail/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ail/error.hpp"
#include "ail/format.hpp"

namespace ail {

namespace {

// Admissibility comparisons are exact in real arithmetic; this only absorbs
// rounding in the coefficient formulas.
constexpr double kAdmitRel = 1e-10;

bool admit_leq(double lhs, double rhs) { return lhs <= rhs + kAdmitRel * std::abs(rhs); }

std::size_t clipped(std::size_t k, std::size_t w) { return std::min(k, w); }

}  // namespace

bool Tolerance::holds(double lhs, double rhs, double scale) const {
  return lhs <= rhs + rel * std::abs(scale) + abs;
}

void GrowthDelaySpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_parameters, "growth delay alpha must lie in (0,1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_parameters, "growth delay beta must be >= 0");
}

CoeffSeq CoeffSeq::constant(double v) {
  CoeffSeq c;
  c.constant_ = true;
  c.values_ = {v};
  return c;
}

CoeffSeq CoeffSeq::sequence(std::vector<double> values) {
  CoeffSeq c;
  c.constant_ = false;
  c.values_ = std::move(values);
  return c;
}

double CoeffSeq::at(std::size_t k) const {
  if (constant_) return values_.front();
  if (k >= values_.size()) throw Error(Errc::index_out_of_range, "coefficient sequence has no entry " + std::to_string(k));
  return values_[k];
}

std::size_t CoeffSeq::length() const { return constant_ ? static_cast<std::size_t>(-1) : values_.size(); }

const char* certificate_kind_name(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::geometric: return "geometric";
    case CertificateKind::lambda_table: return "lambda-table";
    case CertificateKind::polynomial: return "polynomial";
    case CertificateKind::asymptotic_only: return "asymptotic-only";
    case CertificateKind::summation_bound: return "summation-bound";
  }
  return "unknown";
}

double RateCertificate::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw Error(Errc::invalid_parameters, "certificate has no parameter " + name);
  return it->second;
}

std::string RateCertificate::render() const {
  KvReport r;
  r.set("kind", certificate_kind_name(kind));
  r.set("admissible", admissible);
  if (!reason.empty()) r.set("reason", reason);
  for (const auto& [k, v] : params) r.set(k, v);
  return r.render();
}

void Trace::validate() const {
  const std::size_t n = V.size();
  auto check_len = [n](const auto& s, const char* name) {
    if (!s.empty() && s.size() != n)
      throw Error(Errc::dimension_mismatch, std::string("trace series ") + name + " has length " +
                                                std::to_string(s.size()) + ", expected " + std::to_string(n));
  };
  check_len(W, "W");
  check_len(X, "X");
  check_len(e, "e");
  check_len(gamma, "gamma");
  if (delays.size() != n) throw Error(Errc::dimension_mismatch, "trace delays must have the same length as V");
  for (std::size_t k = 0; k < n; ++k) {
    if (V[k] < 0.0) throw Error(Errc::invalid_parameters, "negative V at " + std::to_string(k));
    if (!W.empty() && W[k] < 0.0) throw Error(Errc::invalid_parameters, "negative W at " + std::to_string(k));
    if (delays[k] > k) throw Error(Errc::invalid_parameters, "delay exceeds index at " + std::to_string(k));
  }
}

RateCertificate lemma1_rate(const BoundedDelayRecursion& rec) {
  RateCertificate c;
  c.kind = CertificateKind::geometric;
  c.params["q"] = rec.q;
  c.params["p"] = rec.p;
  c.params["tau"] = static_cast<double>(rec.tau);
  if (!(rec.q >= 0.0 && rec.p >= 0.0)) {
    c.reason = "q and p must be non-negative";
    return c;
  }
  if (!rec.admissible()) {
    c.reason = "q + p >= 1";
    return c;
  }
  c.admissible = true;
  c.params["rho"] = std::pow(rec.q + rec.p, 1.0 / (1.0 + static_cast<double>(rec.tau)));
  return c;
}

DelayFamily DelayFamily::bounded(double tau) {
  DelayFamily f;
  f.kind = Kind::bounded;
  f.tau = tau;
  return f;
}

DelayFamily DelayFamily::linear(double alpha, double beta) {
  DelayFamily f;
  f.kind = Kind::linear;
  f.alpha = alpha;
  f.beta = beta;
  return f;
}

DelayFamily DelayFamily::sqrt_floor() {
  DelayFamily f;
  f.kind = Kind::sqrt_floor;
  return f;
}

DelayFamily DelayFamily::parse(std::string_view text) {
  text = trim(text);
  auto colon = text.find(':');
  std::string_view name = trim(text.substr(0, colon));
  std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto bad = [&]() { return Error(Errc::unsupported_family, "unsupported delay family '" + std::string(text) + "'"); };
  if (name == "sqrt-floor" && args.empty()) return sqrt_floor();
  if (name == "bounded") {
    auto t = parse_real(args);
    if (!t) throw bad();
    return bounded(*t);
  }
  if (name == "linear") {
    auto parts = split(args, ',');
    if (parts.size() != 2) throw bad();
    auto a = parse_real(parts[0]);
    auto b = parse_real(parts[1]);
    if (!a || !b) throw bad();
    return linear(*a, *b);
  }
  throw bad();
}

bool delay_family_admissible(const DelayFamily& family) {
  switch (family.kind) {
    case DelayFamily::Kind::bounded:
      if (!(family.tau >= 0.0) || !std::isfinite(family.tau))
        throw Error(Errc::invalid_parameters, "bounded delay needs a finite tau >= 0");
      return true;
    case DelayFamily::Kind::linear:
      if (!(family.alpha >= 0.0) || !(family.beta >= 0.0) || !std::isfinite(family.beta))
        throw Error(Errc::invalid_parameters, "linear delay needs alpha >= 0 and finite beta >= 0");
      // k - tau_k >= (1 - alpha) k - beta diverges iff alpha < 1
      return family.alpha < 1.0;
    case DelayFamily::Kind::sqrt_floor:
      return true;
  }
  throw Error(Errc::unsupported_family, "unknown delay family");
}

LambdaFunction LambdaFunction::geometric(double rho, double scale) {
  LambdaFunction f;
  f.kind = Kind::geometric;
  f.rho = rho;
  f.scale = scale;
  return f;
}

LambdaFunction LambdaFunction::polynomial(double alpha, double beta, double eta) {
  LambdaFunction f;
  f.kind = Kind::polynomial;
  f.alpha = alpha;
  f.beta = beta;
  f.eta = eta;
  return f;
}

LambdaFunction LambdaFunction::tabulated(std::vector<double> values) {
  LambdaFunction f;
  f.kind = Kind::table;
  f.table = std::move(values);
  return f;
}

double LambdaFunction::operator()(double t) const {
  switch (kind) {
    case Kind::geometric:
      return scale * std::pow(rho, t);
    case Kind::polynomial: {
      double base = alpha * t / (1.0 - alpha + beta) + 1.0;
      if (base <= 0.0) return HUGE_VAL;
      return scale * std::pow(base, -eta);
    }
    case Kind::table: {
      if (t < 0.0 || t != std::floor(t) || t >= static_cast<double>(table.size()))
        throw Error(Errc::index_out_of_range, "lambda table has no entry at t=" + fmt_real(t));
      return scale * table[static_cast<std::size_t>(t)];
    }
  }
  return HUGE_VAL;
}

Lemma3Result lemma3_validate(const LambdaFunction& lambda, double q, double p,
                             const std::vector<std::size_t>& delays, std::size_t K, const Tolerance& tol) {
  Lemma3Result res;
  if (!(q >= 0.0 && p >= 0.0 && q + p < 1.0)) {
    res.reason = "q + p must lie in [0, 1)";
    return res;
  }
  if (delays.size() < K + 1) throw Error(Errc::invalid_parameters, "delay sequence shorter than horizon");
  if (std::abs(lambda(0.0) - 1.0) > 1e-12) {
    res.first_violation = 0;
    res.reason = "lambda(0) != 1";
    return res;
  }
  for (std::size_t t = 0; t <= K; ++t) {
    double a = lambda(static_cast<double>(t));
    double b = lambda(static_cast<double>(t + 1));
    if (!tol.holds(b, a, a)) {
      res.first_violation = t + 1;
      res.reason = "lambda increases";
      return res;
    }
  }
  if (lambda.kind == LambdaFunction::Kind::geometric && !(lambda.rho < 1.0)) {
    res.reason = "geometric lambda does not vanish (rho >= 1)";
    return res;
  }
  if (lambda.kind == LambdaFunction::Kind::polynomial && !(lambda.eta > 0.0 && lambda.alpha > 0.0)) {
    res.reason = "polynomial lambda does not vanish";
    return res;
  }
  const double s = q + p;
  for (std::size_t k = 0; k <= K; ++k) {
    std::size_t tk = std::min(delays[k], k);
    double lhs = s * lambda(static_cast<double>(k - tk));
    double rhs = lambda(static_cast<double>(k + 1));
    if (!tol.holds(lhs, rhs, rhs)) {
      res.first_violation = k;
      res.reason = "(q+p) lambda(k - tau_k) > lambda(k+1)";
      return res;
    }
  }
  res.ok = true;
  if (lambda.kind == LambdaFunction::Kind::table) res.reason = "limit of a tabulated lambda is not certified";
  return res;
}

double corollary1_eta(const GrowthDelaySpec& spec, double q, double p) {
  spec.validate();
  if (!(q >= 0.0 && p >= 0.0)) throw Error(Errc::invalid_parameters, "q and p must be non-negative");
  if (!(q + p < 1.0)) throw Error(Errc::inadmissible_parameters, "q + p >= 1");
  if (q + p == 0.0) return HUGE_VAL;
  return std::log(q + p) / std::log(1.0 - spec.alpha);
}

double corollary1_bound(const GrowthDelaySpec& spec, double q, double p, double k) {
  double eta = corollary1_eta(spec, q, p);
  double base = spec.alpha * k / (1.0 - spec.alpha + spec.beta) + 1.0;
  if (std::isinf(eta)) return k == 0.0 ? 1.0 : 0.0;
  return std::pow(base, -eta);
}

RateCertificate corollary1_certificate(const GrowthDelaySpec& spec, double q, double p) {
  RateCertificate c;
  c.kind = CertificateKind::polynomial;
  c.params["alpha"] = spec.alpha;
  c.params["beta"] = spec.beta;
  c.params["q"] = q;
  c.params["p"] = p;
  try {
    c.params["eta"] = corollary1_eta(spec, q, p);
    c.admissible = true;
  } catch (const Error& e) {
    c.reason = e.what();
  }
  return c;
}

Admissibility lemma4_admissible(const CoupledRecursion& rec, std::size_t K) {
  Admissibility a;
  const std::size_t tau = rec.tau;
  auto too_short = [&](const CoeffSeq& s, std::size_t need) { return !s.is_constant() && s.length() < need; };
  if (too_short(rec.q, K + 1) || too_short(rec.r, K + 1) || too_short(rec.e, K + 1)) {
    a.reason = "coefficient sequences shorter than the horizon";
    return a;
  }
  if (rec.flavor == CoupledFlavor::unit_q) {
    if (too_short(rec.p, K + tau + 1)) {
      a.reason = "p sequence must extend tau steps past the horizon";
      return a;
    }
    for (std::size_t k = 0; k <= K; ++k) {
      if (rec.q.at(k) != 1.0) {
        a.reason = "unit-q flavor requires q_k = 1 (k=" + std::to_string(k) + ")";
        return a;
      }
      double sum = 0.0;
      for (std::size_t l = 0; l <= tau; ++l) {
        double pk = rec.p.at(k + l);
        if (pk < 0.0) {
          a.reason = "negative p";
          return a;
        }
        sum += pk;
      }
      double rk = rec.r.at(k);
      if (rk < 0.0) {
        a.reason = "negative r";
        return a;
      }
      if (!admit_leq(sum, rk)) {
        a.reason = "sum_{l<=tau} p_{k+l} > r_k at k=" + std::to_string(k);
        return a;
      }
    }
    a.ok = true;
    return a;
  }
  if (!rec.p.is_constant() || !rec.r.is_constant()) {
    a.reason = "contractive flavor requires constant p and r";
    return a;
  }
  double p = rec.p.at(0), r = rec.r.at(0), qf = rec.q_floor;
  if (!(p > 0.0 && r > 0.0)) {
    a.reason = "contractive flavor requires p > 0 and r > 0";
    return a;
  }
  if (!(qf > 0.0 && qf < 1.0)) {
    a.reason = "contractive flavor requires a lower bound q in (0,1)";
    return a;
  }
  for (std::size_t k = 0; k <= K; ++k) {
    double qk = rec.q.at(k);
    if (qk < qf || qk > 1.0) {
      a.reason = "q_k outside [q, 1] at k=" + std::to_string(k);
      return a;
    }
  }
  double lhs = 2.0 * static_cast<double>(tau) + 1.0;
  double rhs = std::min(1.0 / (1.0 - qf), r / p);
  if (!admit_leq(lhs, rhs)) {
    a.reason = "2 tau + 1 > min{1/(1-q), r/p}";
    return a;
  }
  a.ok = true;
  return a;
}

Lemma4Bounds lemma4_bounds(const CoupledRecursion& rec, double V0, std::size_t K) {
  auto adm = lemma4_admissible(rec, K);
  if (!adm.ok) throw Error(Errc::inadmissible_recursion, adm.reason);
  Lemma4Bounds b;
  b.v_next.resize(K + 1);
  b.x_sum.resize(K + 1);
  b.Q.resize(K + 2);
  b.Q[0] = 1.0;
  double weighted = 0.0;  // sum e_k / Q_{k+1}
  double v = V0;
  for (std::size_t k = 0; k <= K; ++k) {
    double qk = rec.flavor == CoupledFlavor::unit_q ? 1.0 : rec.q.at(k);
    b.Q[k + 1] = b.Q[k] * qk;
    double ek = rec.e.at(k);
    weighted += ek / b.Q[k + 1];
    // Q_{k+1}(V0 + sum e_l/Q_{l+1}) unrolled as a recursion to avoid dividing by tiny Q
    v = qk * v + ek;
    b.v_next[k] = v;
    b.x_sum[k] = V0 + weighted;
  }
  return b;
}

std::string Verdict::describe() const {
  std::ostringstream os;
  if (pass) {
    os << "PASS";
    if (tight) os << " tight";
    return os.str();
  }
  os << "FAIL k=" << index << " lhs=" << fmt_real(lhs) << " rhs=" << fmt_real(rhs);
  switch (kind) {
    case ViolationKind::recursion: os << " (recursion)"; break;
    case ViolationKind::bound: os << " (bound)"; break;
    case ViolationKind::non_finite: os << " (non-finite)"; break;
    case ViolationKind::none: break;
  }
  return os.str();
}

namespace {

void fail(Verdict& v, ViolationKind kind, std::size_t index, double lhs, double rhs) {
  v.pass = false;
  v.kind = kind;
  v.index = index;
  v.lhs = lhs;
  v.rhs = rhs;
}

bool is_tight(double lhs, double rhs, double scale, const Tolerance& tol) {
  return std::abs(lhs - rhs) <= tol.rel * std::abs(scale) + tol.abs;
}

Verdict verify_eq3(const Trace& t, const Eq3Form& f, const Tolerance& tol) {
  Verdict v;
  const std::size_t n = t.size();
  std::size_t max_window = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t w = f.window ? clipped(k, *f.window) : t.delays[k];
    max_window = std::max(max_window, w);
    double m = *std::max_element(t.V.begin() + static_cast<std::ptrdiff_t>(k - w), t.V.begin() + static_cast<std::ptrdiff_t>(k + 1));
    double rhs = f.q * t.V[k] + f.p * m;
    double lhs = t.V[k + 1];
    double scale = std::abs(f.q * t.V[k]) + std::abs(f.p * m);
    ++v.steps_checked;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      fail(v, ViolationKind::non_finite, k + 1, lhs, rhs);
      v.tight = false;
      return v;
    }
    if (!tol.holds(lhs, rhs, scale)) {
      fail(v, ViolationKind::recursion, k + 1, lhs, rhs);
      v.tight = false;
      return v;
    }
    if (!is_tight(lhs, rhs, scale, tol)) v.tight = false;
  }
  BoundedDelayRecursion rec{f.q, f.p, max_window};
  if (n > 0 && rec.admissible()) {
    v.bound_checked = true;
    double rho = lemma1_rate(rec).param("rho");
    for (std::size_t k = 0; k < n; ++k) {
      double b = std::pow(rho, static_cast<double>(k)) * t.V[0];
      if (!tol.holds(t.V[k], b, b)) {
        fail(v, ViolationKind::bound, k, t.V[k], b);
        return v;
      }
    }
  }
  return v;
}

Verdict verify_eq4(const Trace& t, const Eq4Form& f, const Tolerance& tol) {
  Verdict v;
  const std::size_t n = t.size();
  if (t.W.size() != n) throw Error(Errc::missing_series, "eq4 verification needs the W series");
  const auto& rec = f.rec;
  const std::size_t wcap = f.window ? *f.window : rec.tau;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t w = clipped(k, wcap);
    double sumW = 0.0;
    for (std::size_t l = k - w; l <= k; ++l) sumW += t.W[l];
    double qk = rec.flavor == CoupledFlavor::unit_q ? 1.0 : rec.q.at(k);
    double pk = rec.p.at(k), rk = rec.r.at(k), ek = rec.e.at(k);
    double rhs = qk * t.V[k] + pk * sumW - rk * t.W[k] + ek;
    double xk = t.X.empty() ? 0.0 : t.X[k];
    double lhs = xk + t.V[k + 1];
    double scale = std::abs(qk * t.V[k]) + std::abs(pk * sumW) + std::abs(rk * t.W[k]) + std::abs(ek) + std::abs(xk);
    ++v.steps_checked;
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      fail(v, ViolationKind::non_finite, k + 1, lhs, rhs);
      v.tight = false;
      return v;
    }
    if (!tol.holds(lhs, rhs, scale)) {
      fail(v, ViolationKind::recursion, k + 1, lhs, rhs);
      v.tight = false;
      return v;
    }
    if (!is_tight(lhs, rhs, scale, tol)) v.tight = false;
  }
  if (n >= 2 && lemma4_admissible(rec, n - 2).ok) {
    v.bound_checked = true;
    auto b = lemma4_bounds(rec, t.V[0], n - 2);
    double xsum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (!tol.holds(t.V[k + 1], b.v_next[k], b.v_next[k])) {
        fail(v, ViolationKind::bound, k + 1, t.V[k + 1], b.v_next[k]);
        return v;
      }
      if (!t.X.empty()) {
        xsum += t.X[k] / b.Q[k + 1];
        if (!tol.holds(xsum, b.x_sum[k], b.x_sum[k])) {
          fail(v, ViolationKind::bound, k, xsum, b.x_sum[k]);
          return v;
        }
      }
    }
  }
  return v;
}

}  // namespace

Verdict verify_trace(const Trace& trace, const RecursionForm& form, const Tolerance& tol) {
  trace.validate();
  if (trace.size() == 0) throw Error(Errc::invalid_parameters, "empty trace");
  if (const auto* f3 = std::get_if<Eq3Form>(&form)) return verify_eq3(trace, *f3, tol);
  return verify_eq4(trace, std::get<Eq4Form>(form), tol);
}

Verdict compare_to_bound(const std::vector<double>& monitored, const std::vector<double>& bound, const Tolerance& tol) {
  if (monitored.size() != bound.size()) throw Error(Errc::dimension_mismatch, "monitored and bound lengths differ");
  Verdict v;
  v.bound_checked = true;
  for (std::size_t k = 0; k < monitored.size(); ++k) {
    double b = bound[k];
    if (std::isnan(b) || b == HUGE_VAL) continue;
    ++v.steps_checked;
    if (!std::isfinite(monitored[k])) {
      fail(v, ViolationKind::non_finite, k, monitored[k], b);
      return v;
    }
    if (!tol.holds(monitored[k], b, b)) {
      fail(v, ViolationKind::bound, k, monitored[k], b);
      return v;
    }
    if (!is_tight(monitored[k], b, b, tol)) v.tight = false;
  }
  return v;
}

Trace worst_case_trace(double q, double p, std::size_t tau, double V0, std::size_t K) {
  Trace t;
  t.V.resize(K + 1);
  t.delays.resize(K + 1);
  t.V[0] = V0;
  for (std::size_t k = 0; k <= K; ++k) {
    std::size_t w = clipped(k, tau);
    t.delays[k] = w;
    if (k == K) break;
    double m = *std::max_element(t.V.begin() + static_cast<std::ptrdiff_t>(k - w), t.V.begin() + static_cast<std::ptrdiff_t>(k + 1));
    t.V[k + 1] = q * t.V[k] + p * m;
  }
  return t;
}

Trace worst_case_trace(double q, double p, const std::vector<std::size_t>& delays, double V0) {
  if (delays.empty()) throw Error(Errc::invalid_parameters, "delay sequence is empty");
  Trace t;
  const std::size_t K = delays.size() - 1;
  t.V.resize(K + 1);
  t.delays = delays;
  t.V[0] = V0;
  for (std::size_t k = 0; k < K; ++k) {
    if (delays[k] > k) throw Error(Errc::invalid_parameters, "delay exceeds its index");
    double m = *std::max_element(t.V.begin() + static_cast<std::ptrdiff_t>(k - delays[k]), t.V.begin() + static_cast<std::ptrdiff_t>(k + 1));
    t.V[k + 1] = q * t.V[k] + p * m;
  }
  return t;
}

}  // namespace ail
