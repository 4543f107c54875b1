#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ail {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// R^d split into m consecutive blocks with positive weights.
struct Partition {
  std::vector<std::size_t> sizes;
  std::vector<double> weights;

  static Partition scalar(std::size_t d);
  // m nearly equal blocks (the first d mod m blocks get one extra coordinate), unit weights
  static Partition even(std::size_t d, std::size_t m);

  std::size_t m() const { return sizes.size(); }
  std::size_t dim() const;
  std::size_t offset(std::size_t i) const;
  void validate() const;
};

enum class SmoothFamily { least_squares, logistic, quadratic };

const char* smooth_family_name(SmoothFamily f);

// F(x) = (1/n) sum_i f_i(x).
//   least squares: f_i = 0.5 (a_i'x - b_i)^2
//   logistic:      f_i = log(1 + exp(-b_i a_i'x)), b_i in {-1, +1}
//   quadratic:     a single component 0.5 x'Hx - c'x with H symmetric PSD
class SmoothSum {
 public:
  static SmoothSum least_squares(Mat A, Vec b);
  static SmoothSum logistic(Mat A, Vec labels);
  static SmoothSum quadratic(Mat H, Vec c);

  SmoothFamily family() const { return family_; }
  std::size_t n() const { return n_; }
  std::size_t dim() const { return d_; }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }

  double component_L(std::size_t i) const;
  // (1/n) sum L_i
  double L() const { return L_; }
  // largest eigenvalue of the Hessian for quadratic-type families (true smoothness of F)
  double L_true() const { return L_true_; }
  double mu() const { return mu_; }
  std::optional<double> growth() const { return growth_; }

  double component_value(std::size_t i, const Vec& x) const;
  Vec component_gradient(std::size_t i, const Vec& x) const;
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;

  // Reference minimizer of F (minimum-norm for rank-deficient problems).
  const Vec& x_star() const { return x_star_; }
  double F_star() const { return F_star_; }

  // Euclidean projection onto the minimizer set of F; least squares and quadratic only.
  Vec project_solution_set(const Vec& x) const;

 private:
  void finish_quadratic_type(const Mat& hessian, const Vec& linear);

  SmoothFamily family_ = SmoothFamily::least_squares;
  std::size_t n_ = 0, d_ = 0;
  Mat A_;
  Vec b_;
  std::vector<double> Li_;
  double L_ = 0, L_true_ = 0, mu_ = 0;
  std::optional<double> growth_;
  Vec x_star_;
  double F_star_ = 0;
  Mat pinv_hessian_;  // H^+ for the projection
};

struct Regularizer {
  enum class Kind { none, l1, sq_l2, box, elastic };
  Kind kind = Kind::none;
  double lambda = 0.0;   // l1: lambda |x|_1, sq-l2: lambda |x|^2
  double lambda1 = 0.0;  // elastic: lambda1 |x|^2 + lambda2 |x|_1
  double lambda2 = 0.0;
  Vec lo, hi;            // box bounds, either of length d or length 1 (broadcast)

  static Regularizer none();
  static Regularizer l1(double lambda);
  static Regularizer sq_l2(double lambda);
  static Regularizer box(Vec lo, Vec hi);
  static Regularizer elastic(double lambda1, double lambda2);

  void validate() const;
  double lo_at(std::size_t j) const { return lo.size() == 1 ? lo[0] : lo[static_cast<Eigen::Index>(j)]; }
  double hi_at(std::size_t j) const { return hi.size() == 1 ? hi[0] : hi[static_cast<Eigen::Index>(j)]; }
};

const char* regularizer_kind_name(Regularizer::Kind k);

Vec component_gradient(const SmoothSum& p, std::size_t i, const Vec& x);
Vec full_gradient(const SmoothSum& p, const Vec& x);
// R(x); +inf when a box constraint is violated.
double regularizer_value(const Regularizer& r, const Vec& x);
double objective(const SmoothSum& p, const Regularizer& r, const Vec& x);
Vec prox(const Regularizer& r, double gamma, const Vec& x);
Vec projection_solution_set(const SmoothSum& p, const Vec& x);

// Minimizer of F + R used as ground truth. Closed form when R is none, otherwise a
// long proximal-gradient run driven to a fixed-point residual of 1e-13.
struct ReferenceSolution {
  Vec x;
  double P = 0.0;
};
ReferenceSolution reference_solution(const SmoothSum& p, const Regularizer& r);

struct StochasticOracle {
  enum class Noise { additive_gaussian, finite_sum_sampling };
  SmoothSum base;
  Noise noise = Noise::additive_gaussian;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Deterministic in (seed, draw). Gaussian noise is isotropic with total variance sigma^2.
Vec stochastic_gradient(const StochasticOracle& o, const Vec& x, std::uint64_t draw);

enum class NormKind { euclidean, block_max };

double block_max_norm(const Vec& x, const Partition& part);

class FixedPointOperator {
 public:
  enum class Family { affine, prox_grad };

  // T(x) = C x + h. The modulus is the sufficient bound (spectral norm or weighted
  // block row sum); a declared modulus below that bound is rejected.
  static FixedPointOperator affine(Mat C, Vec h, Partition part, NormKind norm,
                                   std::optional<double> declared_c = std::nullopt);
  // T(x) = prox_{sR}(x - s grad F(x)) with s = 2/(mu + L), modulus (Q-1)/(Q+1), Q = L/mu.
  static FixedPointOperator prox_grad(SmoothSum F, Regularizer R, Partition part);

  Family family() const { return family_; }
  NormKind norm_kind() const { return norm_; }
  const Partition& partition() const { return part_; }
  std::size_t dim() const { return part_.dim(); }
  double modulus() const { return c_; }
  const Vec& fixed_point() const { return x_star_; }
  const Mat& C() const { return C_; }
  const Vec& h() const { return h_; }
  double step() const { return step_; }

  Vec apply(const Vec& x) const;
  // Block i of T evaluated at x.
  Vec apply_block(const Vec& x, std::size_t i) const;
  Vec residual(const Vec& x) const;
  Vec residual_block(const Vec& x, std::size_t i) const;
  double norm(const Vec& x) const;

 private:
  Family family_ = Family::affine;
  NormKind norm_ = NormKind::euclidean;
  Partition part_;
  double c_ = 0.0;
  Mat C_;
  Vec h_;
  std::optional<SmoothSum> F_;
  Regularizer R_;
  double step_ = 0.0;
  Vec x_star_;
};

Vec operator_apply(const FixedPointOperator& T, const Vec& x);
// S(x) = x - T(x), or its block i.
Vec residual_apply(const FixedPointOperator& T, const Vec& x, std::optional<std::size_t> block = std::nullopt);
double contraction_modulus_estimate(const FixedPointOperator& T, const Vec& x_star, std::size_t samples, std::uint64_t seed);

// Weighted block row-sum bound max_i sum_j (w_i/w_j) |C_ij|_2.
double block_row_sum_bound(const Mat& C, const Partition& part);

// Deterministic generators addressed by (family, n, d, seed).
SmoothSum make_least_squares(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t rank = 0);
// Rows 0..2d-1 are +-e_j anchors with both labels so a finite minimizer always exists; needs n >= 2d.
SmoothSum make_logistic(std::size_t n, std::size_t d, std::uint64_t seed);
// Spectrum from mu to L (log spaced) in a random orthonormal basis.
SmoothSum make_quadratic(std::size_t d, double mu, double L, std::uint64_t seed);
SmoothSum generate_problem(std::string_view family, std::size_t n, std::size_t d, std::uint64_t seed);

FixedPointOperator make_affine_euclidean(std::size_t d, double c, std::uint64_t seed, const Partition& part);
// Affine map whose weighted block row sums all equal c.
FixedPointOperator make_affine_block_max(std::size_t d, double c, std::uint64_t seed, const Partition& part);

Vec gaussian_vector(std::size_t d, std::uint64_t seed, std::uint64_t stream);
Mat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream);

std::string serialize_problem(const SmoothSum& p);
SmoothSum parse_problem(std::string_view text);

}  // namespace ail
