#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ail {

// Inequality tolerance: lhs <= rhs + rel * scale + abs, where scale is the sum of
// magnitudes of the terms on the right-hand side.
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
  bool holds(double lhs, double rhs, double scale) const;
};

// V_{k+1} <= q V_k + p max_{(k - tau_k)_+ <= l <= k} V_l
struct BoundedDelayRecursion {
  double q = 0.0;
  double p = 0.0;
  std::size_t tau = 0;
  bool admissible() const { return q >= 0.0 && p >= 0.0 && q + p < 1.0; }
};

// tau_k <= alpha k + beta
struct GrowthDelaySpec {
  double alpha = 0.0;
  double beta = 0.0;
  void validate() const;
};

// Either a constant or an explicit finite sequence.
class CoeffSeq {
 public:
  CoeffSeq() = default;
  static CoeffSeq constant(double v);
  static CoeffSeq sequence(std::vector<double> values);

  double at(std::size_t k) const;
  bool is_constant() const { return constant_; }
  // Number of defined entries; unbounded for constants.
  std::size_t length() const;
  const std::vector<double>& values() const { return values_; }

 private:
  bool constant_ = true;
  std::vector<double> values_{0.0};
};

enum class CoupledFlavor { unit_q, contractive };

// X_k + V_{k+1} <= q_k V_k + p_k sum_{l=(k - tau_k)_+}^{k} W_l - r_k W_k + e_k
struct CoupledRecursion {
  CoupledFlavor flavor = CoupledFlavor::unit_q;
  CoeffSeq q = CoeffSeq::constant(1.0);
  // contractive flavor: constant lower bound with q_k >= q_floor > 0
  double q_floor = 0.0;
  CoeffSeq p;
  CoeffSeq r;
  CoeffSeq e;
  std::size_t tau = 0;
};

enum class CertificateKind { geometric, lambda_table, polynomial, asymptotic_only, summation_bound };

struct RateCertificate {
  CertificateKind kind = CertificateKind::geometric;
  bool admissible = false;
  std::map<std::string, double> params;
  std::string reason;

  double param(const std::string& name) const;
  std::string render() const;
};

const char* certificate_kind_name(CertificateKind kind);

// A recorded run. Optional series are empty when absent.
struct Trace {
  std::vector<double> V;
  std::vector<double> W;
  std::vector<double> X;
  std::vector<double> e;
  std::vector<std::size_t> delays;
  std::vector<double> gamma;

  std::size_t size() const { return V.size(); }
  // Checks lengths, non-negativity and 0 <= tau_k <= k.
  void validate() const;
};

std::string trace_to_csv(const Trace& t);
Trace trace_from_csv(std::string_view text);

RateCertificate lemma1_rate(const BoundedDelayRecursion& rec);

struct DelayFamily {
  enum class Kind { bounded, linear, sqrt_floor };
  Kind kind = Kind::bounded;
  double tau = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  static DelayFamily bounded(double tau);
  static DelayFamily linear(double alpha, double beta);
  static DelayFamily sqrt_floor();
  // "bounded:7", "linear:0.2,0", "sqrt-floor"; anything else is unsupported-family.
  static DelayFamily parse(std::string_view text);
};

// Decides lim (k - tau_k) = +inf analytically for the named family.
bool delay_family_admissible(const DelayFamily& family);

// Candidate decay function for the delayed recursion.
struct LambdaFunction {
  enum class Kind { geometric, polynomial, table };
  Kind kind = Kind::geometric;
  double scale = 1.0;
  double rho = 0.0;
  double alpha = 0.0, beta = 0.0, eta = 0.0;
  std::vector<double> table;  // values at t = 0, 1, 2, ...

  static LambdaFunction geometric(double rho, double scale = 1.0);
  static LambdaFunction polynomial(double alpha, double beta, double eta);
  static LambdaFunction tabulated(std::vector<double> values);
  double operator()(double t) const;
};

struct Lemma3Result {
  bool ok = false;
  std::optional<std::size_t> first_violation;
  std::string reason;
};

Lemma3Result lemma3_validate(const LambdaFunction& lambda, double q, double p,
                             const std::vector<std::size_t>& delays, std::size_t K,
                             const Tolerance& tol = {});

double corollary1_eta(const GrowthDelaySpec& spec, double q, double p);
double corollary1_bound(const GrowthDelaySpec& spec, double q, double p, double k);
RateCertificate corollary1_certificate(const GrowthDelaySpec& spec, double q, double p);

struct Admissibility {
  bool ok = false;
  std::string reason;
};

Admissibility lemma4_admissible(const CoupledRecursion& rec, std::size_t K);

// Entry j of each vector concerns horizon j = 0..K: v_next[j] bounds V_{j+1};
// x_sum[j] bounds sum_{k<=j} X_k (unit-q) or sum_{k<=j} X_k / Q_{k+1} (contractive).
struct Lemma4Bounds {
  std::vector<double> v_next;
  std::vector<double> x_sum;
  std::vector<double> Q;  // Q_0..Q_{K+1}
};

Lemma4Bounds lemma4_bounds(const CoupledRecursion& rec, double V0, std::size_t K);

struct Eq3Form {
  double q = 0.0;
  double p = 0.0;
  // When set the window at k is min(k, window) instead of the trace delays.
  std::optional<std::size_t> window;
};

struct Eq4Form {
  CoupledRecursion rec;
  std::optional<std::size_t> window;
};

using RecursionForm = std::variant<Eq3Form, Eq4Form>;

enum class ViolationKind { none, recursion, bound, non_finite };

struct Verdict {
  bool pass = true;
  // every recursion step held with equality up to tolerance
  bool tight = true;
  bool bound_checked = false;
  ViolationKind kind = ViolationKind::none;
  // index of the bounded quantity (V_{k+1} for a recursion step k)
  std::size_t index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t steps_checked = 0;

  std::string describe() const;
};

Verdict verify_trace(const Trace& trace, const RecursionForm& form, const Tolerance& tol = {});

// Pointwise check of a monitored sequence against a bound sequence (entries with
// an infinite bound are skipped).
Verdict compare_to_bound(const std::vector<double>& monitored, const std::vector<double>& bound,
                         const Tolerance& tol = {});

Trace worst_case_trace(double q, double p, std::size_t tau, double V0, std::size_t K);
// Same equality recursion driven by an explicit delay sequence tau_0..tau_K.
Trace worst_case_trace(double q, double p, const std::vector<std::size_t>& delays, double V0);

}  // namespace ail
