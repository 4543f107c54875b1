#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ail/error.hpp"
#include "ail/problems.hpp"
#include "ail/rng.hpp"

namespace ail {

namespace {

constexpr double kPinvTol = 1e-10;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

Partition Partition::scalar(std::size_t d) {
  Partition p;
  p.sizes.assign(d, 1);
  p.weights.assign(d, 1.0);
  return p;
}

Partition Partition::even(std::size_t d, std::size_t m) {
  if (m == 0 || m > d) throw Error(Errc::invalid_parameters, "partition needs 1 <= m <= d");
  Partition p;
  for (std::size_t i = 0; i < m; ++i) p.sizes.push_back(d / m + (i < d % m ? 1 : 0));
  p.weights.assign(m, 1.0);
  return p;
}

std::size_t Partition::dim() const {
  std::size_t d = 0;
  for (auto s : sizes) d += s;
  return d;
}

std::size_t Partition::offset(std::size_t i) const {
  std::size_t o = 0;
  for (std::size_t j = 0; j < i; ++j) o += sizes[j];
  return o;
}

void Partition::validate() const {
  if (sizes.empty()) throw Error(Errc::invalid_parameters, "partition has no blocks");
  if (weights.size() != sizes.size()) throw Error(Errc::invalid_parameters, "partition weights and sizes differ in length");
  for (auto s : sizes)
    if (s == 0) throw Error(Errc::invalid_parameters, "partition block of size 0");
  for (auto w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(Errc::invalid_parameters, "partition weights must be positive");
}

const char* smooth_family_name(SmoothFamily f) {
  switch (f) {
    case SmoothFamily::least_squares: return "least-squares";
    case SmoothFamily::logistic: return "logistic";
    case SmoothFamily::quadratic: return "quadratic";
  }
  return "unknown";
}

SmoothSum SmoothSum::least_squares(Mat A, Vec b) {
  if (A.rows() == 0 || A.cols() == 0) throw Error(Errc::invalid_parameters, "empty design matrix");
  if (b.size() != A.rows()) throw Error(Errc::dimension_mismatch, "b must have one entry per row of A");
  SmoothSum s;
  s.family_ = SmoothFamily::least_squares;
  s.n_ = static_cast<std::size_t>(A.rows());
  s.d_ = static_cast<std::size_t>(A.cols());
  s.A_ = std::move(A);
  s.b_ = std::move(b);
  double sum = 0;
  for (std::size_t i = 0; i < s.n_; ++i) {
    s.Li_.push_back(s.A_.row(idx(i)).squaredNorm());
    sum += s.Li_.back();
  }
  s.L_ = sum / static_cast<double>(s.n_);

  Eigen::JacobiSVD<Mat> svd(s.A_, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  const double n = static_cast<double>(s.n_);
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    if (sv[j] > kPinvTol * smax) ++rank;
  s.L_true_ = smax * smax / n;
  Mat Vr = svd.matrixV().leftCols(rank);
  Vec coeff = (svd.matrixU().leftCols(rank).transpose() * s.b_).array() / sv.head(rank).array();
  s.x_star_ = Vr * coeff;
  s.pinv_hessian_ = Vr * Vr.transpose();
  if (rank > 0) s.growth_ = sv[rank - 1] * sv[rank - 1] / n;
  s.mu_ = (rank == s.A_.cols() && rank > 0) ? sv[rank - 1] * sv[rank - 1] / n : 0.0;
  s.F_star_ = s.value(s.x_star_);
  return s;
}

SmoothSum SmoothSum::quadratic(Mat H, Vec c) {
  if (H.rows() != H.cols() || H.rows() == 0) throw Error(Errc::invalid_parameters, "quadratic needs a square Hessian");
  if (c.size() != H.rows()) throw Error(Errc::dimension_mismatch, "linear term length differs from Hessian size");
  if ((H - H.transpose()).norm() > 1e-12 * (1.0 + H.norm())) throw Error(Errc::invalid_parameters, "Hessian must be symmetric");
  SmoothSum s;
  s.family_ = SmoothFamily::quadratic;
  s.n_ = 1;
  s.d_ = static_cast<std::size_t>(H.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Vec& ev = es.eigenvalues();  // ascending
  const double lmax = ev[ev.size() - 1];
  if (ev[0] < -kPinvTol * std::max(1.0, std::abs(lmax))) throw Error(Errc::invalid_parameters, "Hessian must be positive semidefinite");
  Eigen::Index first = 0;
  while (first < ev.size() && ev[first] <= kPinvTol * lmax) ++first;
  Mat Qr = es.eigenvectors().rightCols(ev.size() - first);
  Vec lam = ev.tail(ev.size() - first);
  Vec resid = c - Qr * (Qr.transpose() * c);
  if (resid.norm() > 1e-9 * (1.0 + c.norm())) throw Error(Errc::invalid_parameters, "linear term outside the Hessian range: unbounded below");
  s.A_ = std::move(H);
  s.b_ = std::move(c);
  s.Li_ = {lmax};
  s.L_ = lmax;
  s.L_true_ = lmax;
  s.mu_ = first == 0 ? ev[0] : 0.0;
  if (lam.size() > 0) s.growth_ = lam[0];
  s.x_star_ = Qr * ((Qr.transpose() * s.b_).array() / lam.array()).matrix();
  s.pinv_hessian_ = Qr * Qr.transpose();
  s.F_star_ = s.value(s.x_star_);
  return s;
}

SmoothSum SmoothSum::logistic(Mat A, Vec labels) {
  if (A.rows() == 0 || A.cols() == 0) throw Error(Errc::invalid_parameters, "empty design matrix");
  if (labels.size() != A.rows()) throw Error(Errc::dimension_mismatch, "one label per row required");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 1.0 && labels[i] != -1.0) throw Error(Errc::invalid_parameters, "logistic labels must be +1 or -1");
  SmoothSum s;
  s.family_ = SmoothFamily::logistic;
  s.n_ = static_cast<std::size_t>(A.rows());
  s.d_ = static_cast<std::size_t>(A.cols());
  s.A_ = std::move(A);
  s.b_ = std::move(labels);
  double sum = 0;
  for (std::size_t i = 0; i < s.n_; ++i) {
    s.Li_.push_back(0.25 * s.A_.row(idx(i)).squaredNorm());
    sum += s.Li_.back();
  }
  s.L_ = sum / static_cast<double>(s.n_);
  Eigen::JacobiSVD<Mat> svd(s.A_);
  double smax = svd.singularValues()[0];
  s.L_true_ = 0.25 * smax * smax / static_cast<double>(s.n_);
  s.mu_ = 0.0;

  // Reference minimizer: damped Newton to gradient norm 1e-12. Fails loudly when
  // the data are separable (no finite minimizer).
  Vec x = Vec::Zero(idx(s.d_));
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    Vec g = s.gradient(x);
    if (g.norm() <= 1e-12) {
      converged = true;
      break;
    }
    Mat Hs = Mat::Zero(idx(s.d_), idx(s.d_));
    for (std::size_t i = 0; i < s.n_; ++i) {
      double z = s.b_[idx(i)] * s.A_.row(idx(i)).dot(x);
      double w = sigmoid(z) * sigmoid(-z);
      Hs.noalias() += w * s.A_.row(idx(i)).transpose() * s.A_.row(idx(i));
    }
    Hs /= static_cast<double>(s.n_);
    Vec dir = Hs.ldlt().solve(-g);
    double f0 = s.value(x), t = 1.0;
    // near the minimizer function decreases drop below rounding, so take full steps there
    if (g.norm() > 1e-8)
      while (t > 1e-12 && s.value(x + t * dir) > f0 + 1e-4 * t * g.dot(dir)) t *= 0.5;
    x += t * dir;
  }
  if (!converged) throw Error(Errc::missing_solution, "logistic reference solve did not reach gradient norm 1e-12");
  s.x_star_ = x;
  s.F_star_ = s.value(x);
  return s;
}

double SmoothSum::component_L(std::size_t i) const {
  if (i >= n_) throw Error(Errc::index_out_of_range, "component " + std::to_string(i) + " of " + std::to_string(n_));
  return Li_[i];
}

double SmoothSum::component_value(std::size_t i, const Vec& x) const {
  if (i >= n_) throw Error(Errc::index_out_of_range, "component " + std::to_string(i) + " of " + std::to_string(n_));
  if (static_cast<std::size_t>(x.size()) != d_) throw Error(Errc::dimension_mismatch, "x has wrong dimension");
  switch (family_) {
    case SmoothFamily::least_squares: {
      double r = A_.row(idx(i)).dot(x) - b_[idx(i)];
      return 0.5 * r * r;
    }
    case SmoothFamily::logistic:
      return softplus(-b_[idx(i)] * A_.row(idx(i)).dot(x));
    case SmoothFamily::quadratic:
      return 0.5 * x.dot(A_ * x) - b_.dot(x);
  }
  return 0.0;
}

Vec SmoothSum::component_gradient(std::size_t i, const Vec& x) const {
  if (i >= n_) throw Error(Errc::index_out_of_range, "component " + std::to_string(i) + " of " + std::to_string(n_));
  if (static_cast<std::size_t>(x.size()) != d_) throw Error(Errc::dimension_mismatch, "x has wrong dimension");
  switch (family_) {
    case SmoothFamily::least_squares:
      return A_.row(idx(i)).transpose() * (A_.row(idx(i)).dot(x) - b_[idx(i)]);
    case SmoothFamily::logistic: {
      double bi = b_[idx(i)];
      return A_.row(idx(i)).transpose() * (-bi * sigmoid(-bi * A_.row(idx(i)).dot(x)));
    }
    case SmoothFamily::quadratic:
      return A_ * x - b_;
  }
  return {};
}

double SmoothSum::value(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != d_) throw Error(Errc::dimension_mismatch, "x has wrong dimension");
  switch (family_) {
    case SmoothFamily::least_squares:
      return 0.5 * (A_ * x - b_).squaredNorm() / static_cast<double>(n_);
    case SmoothFamily::logistic: {
      Vec z = A_ * x;
      double s = 0;
      for (std::size_t i = 0; i < n_; ++i) s += softplus(-b_[idx(i)] * z[idx(i)]);
      return s / static_cast<double>(n_);
    }
    case SmoothFamily::quadratic:
      return 0.5 * x.dot(A_ * x) - b_.dot(x);
  }
  return 0.0;
}

Vec SmoothSum::gradient(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != d_) throw Error(Errc::dimension_mismatch, "x has wrong dimension");
  switch (family_) {
    case SmoothFamily::least_squares:
      return A_.transpose() * (A_ * x - b_) / static_cast<double>(n_);
    case SmoothFamily::logistic: {
      Vec z = A_ * x;
      Vec w(idx(n_));
      for (std::size_t i = 0; i < n_; ++i) w[idx(i)] = -b_[idx(i)] * sigmoid(-b_[idx(i)] * z[idx(i)]);
      return A_.transpose() * w / static_cast<double>(n_);
    }
    case SmoothFamily::quadratic:
      return A_ * x - b_;
  }
  return {};
}

Vec SmoothSum::project_solution_set(const Vec& x) const {
  if (family_ == SmoothFamily::logistic)
    throw Error(Errc::unsupported_problem, "no exact solution-set projection for logistic problems");
  if (static_cast<std::size_t>(x.size()) != d_) throw Error(Errc::dimension_mismatch, "x has wrong dimension");
  // minimizers are x* + null(H); x* lies in the row space
  return x - pinv_hessian_ * x + x_star_;
}

Regularizer Regularizer::none() { return {}; }

Regularizer Regularizer::l1(double lambda) {
  Regularizer r;
  r.kind = Kind::l1;
  r.lambda = lambda;
  r.validate();
  return r;
}

Regularizer Regularizer::sq_l2(double lambda) {
  Regularizer r;
  r.kind = Kind::sq_l2;
  r.lambda = lambda;
  r.validate();
  return r;
}

Regularizer Regularizer::box(Vec lo, Vec hi) {
  Regularizer r;
  r.kind = Kind::box;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  r.validate();
  return r;
}

Regularizer Regularizer::elastic(double lambda1, double lambda2) {
  Regularizer r;
  r.kind = Kind::elastic;
  r.lambda1 = lambda1;
  r.lambda2 = lambda2;
  r.validate();
  return r;
}

void Regularizer::validate() const {
  if (!(lambda >= 0.0 && lambda1 >= 0.0 && lambda2 >= 0.0)) throw Error(Errc::invalid_parameters, "regularization weights must be >= 0");
  if (kind == Kind::box) {
    if (lo.size() == 0 || lo.size() != hi.size()) throw Error(Errc::invalid_parameters, "box bounds must have equal non-zero length");
    for (Eigen::Index j = 0; j < lo.size(); ++j)
      if (!(lo[j] <= hi[j])) throw Error(Errc::invalid_parameters, "box needs lo <= hi");
  }
}

const char* regularizer_kind_name(Regularizer::Kind k) {
  switch (k) {
    case Regularizer::Kind::none: return "none";
    case Regularizer::Kind::l1: return "l1";
    case Regularizer::Kind::sq_l2: return "sq-l2";
    case Regularizer::Kind::box: return "box";
    case Regularizer::Kind::elastic: return "elastic";
  }
  return "unknown";
}

Vec component_gradient(const SmoothSum& p, std::size_t i, const Vec& x) { return p.component_gradient(i, x); }

Vec full_gradient(const SmoothSum& p, const Vec& x) { return p.gradient(x); }

double regularizer_value(const Regularizer& r, const Vec& x) {
  switch (r.kind) {
    case Regularizer::Kind::none: return 0.0;
    case Regularizer::Kind::l1: return r.lambda * x.lpNorm<1>();
    case Regularizer::Kind::sq_l2: return r.lambda * x.squaredNorm();
    case Regularizer::Kind::elastic: return r.lambda1 * x.squaredNorm() + r.lambda2 * x.lpNorm<1>();
    case Regularizer::Kind::box:
      if (r.lo.size() != 1 && r.lo.size() != x.size()) throw Error(Errc::dimension_mismatch, "box bounds do not match x");
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        auto u = static_cast<std::size_t>(j);
        if (x[j] < r.lo_at(u) || x[j] > r.hi_at(u)) return HUGE_VAL;
      }
      return 0.0;
  }
  return 0.0;
}

double objective(const SmoothSum& p, const Regularizer& r, const Vec& x) {
  double rv = regularizer_value(r, x);
  if (rv == HUGE_VAL) return HUGE_VAL;
  return p.value(x) + rv;
}

Vec prox(const Regularizer& r, double gamma, const Vec& x) {
  if (!(gamma > 0.0)) throw Error(Errc::invalid_parameters, "prox needs gamma > 0");
  Vec u = x;
  switch (r.kind) {
    case Regularizer::Kind::none:
      break;
    case Regularizer::Kind::l1:
      for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = soft_threshold(x[j], gamma * r.lambda);
      break;
    case Regularizer::Kind::sq_l2:
      u = x / (1.0 + 2.0 * gamma * r.lambda);
      break;
    case Regularizer::Kind::elastic:
      // shrink by the l1 part, then scale by the quadratic part
      for (Eigen::Index j = 0; j < u.size(); ++j)
        u[j] = soft_threshold(x[j], gamma * r.lambda2) / (1.0 + 2.0 * gamma * r.lambda1);
      break;
    case Regularizer::Kind::box:
      if (r.lo.size() != 1 && r.lo.size() != x.size()) throw Error(Errc::dimension_mismatch, "box bounds do not match x");
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        auto k = static_cast<std::size_t>(j);
        u[j] = std::clamp(x[j], r.lo_at(k), r.hi_at(k));
      }
      break;
  }
  return u;
}

Vec projection_solution_set(const SmoothSum& p, const Vec& x) { return p.project_solution_set(x); }

ReferenceSolution reference_solution(const SmoothSum& p, const Regularizer& r) {
  ReferenceSolution ref;
  if (r.kind == Regularizer::Kind::none) {
    ref.x = p.x_star();
    ref.P = p.F_star();
    return ref;
  }
  // Accelerated proximal gradient with adaptive restart, finished when the plain
  // proximal-gradient fixed-point residual is below 1e-13.
  const double s = 1.0 / std::max(p.L_true(), 1e-300);
  Vec x = prox(r, s, p.x_star());
  Vec y = x;
  double t = 1.0;
  for (int it = 0; it < 2000000; ++it) {
    Vec xn = prox(r, s, y - s * p.gradient(y));
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if ((y - xn).dot(xn - x) > 0.0) tn = 1.0;  // restart
    Vec yn = xn + ((t - 1.0) / tn) * (xn - x);
    if (tn == 1.0) yn = xn;
    x = xn;
    y = yn;
    t = tn;
    if (it % 16 == 0) {
      Vec step = prox(r, s, x - s * p.gradient(x)) - x;
      if (step.norm() <= 1e-13 * (1.0 + x.norm())) break;
    }
  }
  ref.x = x;
  ref.P = objective(p, r, x);
  return ref;
}

Vec stochastic_gradient(const StochasticOracle& o, const Vec& x, std::uint64_t draw) {
  CounterRng rng(o.seed);
  if (o.noise == StochasticOracle::Noise::finite_sum_sampling) {
    std::size_t i = static_cast<std::size_t>(rng.below(o.base.n(), draw));
    return o.base.component_gradient(i, x);
  }
  Vec g = o.base.gradient(x);
  if (o.sigma == 0.0) return g;
  const auto d = static_cast<std::uint64_t>(g.size());
  const double sd = o.sigma / std::sqrt(static_cast<double>(d));
  for (std::uint64_t j = 0; j < d; ++j) g[static_cast<Eigen::Index>(j)] += sd * rng.normal(draw * d + j);
  return g;
}

double block_max_norm(const Vec& x, const Partition& part) {
  if (part.dim() != static_cast<std::size_t>(x.size())) throw Error(Errc::dimension_mismatch, "partition does not match vector length");
  double best = 0.0;
  std::size_t off = 0;
  for (std::size_t i = 0; i < part.m(); ++i) {
    double v = part.weights[i] * x.segment(idx(off), idx(part.sizes[i])).norm();
    best = std::max(best, v);
    off += part.sizes[i];
  }
  return best;
}

}  // namespace ail
