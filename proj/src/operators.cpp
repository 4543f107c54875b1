#include <cmath>

#include "ail/error.hpp"
#include "ail/problems.hpp"
#include "ail/rng.hpp"

namespace ail {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double spectral_norm(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace

double block_row_sum_bound(const Mat& C, const Partition& part) {
  part.validate();
  if (static_cast<std::size_t>(C.rows()) != part.dim() || C.rows() != C.cols())
    throw Error(Errc::dimension_mismatch, "matrix does not match partition");
  double best = 0.0;
  for (std::size_t i = 0; i < part.m(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < part.m(); ++j) {
      Mat blk = C.block(idx(part.offset(i)), idx(part.offset(j)), idx(part.sizes[i]), idx(part.sizes[j]));
      row += part.weights[i] / part.weights[j] * spectral_norm(blk);
    }
    best = std::max(best, row);
  }
  return best;
}

FixedPointOperator FixedPointOperator::affine(Mat C, Vec h, Partition part, NormKind norm, std::optional<double> declared_c) {
  part.validate();
  const auto d = static_cast<Eigen::Index>(part.dim());
  if (C.rows() != d || C.cols() != d || h.size() != d) throw Error(Errc::dimension_mismatch, "affine operator does not match partition");
  double bound = norm == NormKind::euclidean ? spectral_norm(C) : block_row_sum_bound(C, part);
  double c = bound;
  if (declared_c) {
    if (*declared_c + 1e-12 < bound)
      throw Error(Errc::invalid_parameters, "declared modulus is below the verifiable bound");
    c = *declared_c;
  }
  if (!(c < 1.0)) throw Error(Errc::invalid_parameters, "affine operator is not a contraction in the chosen norm");
  FixedPointOperator T;
  T.family_ = Family::affine;
  T.norm_ = norm;
  T.part_ = std::move(part);
  T.c_ = c;
  T.x_star_ = (Mat::Identity(d, d) - C).partialPivLu().solve(h);
  T.C_ = std::move(C);
  T.h_ = std::move(h);
  return T;
}

FixedPointOperator FixedPointOperator::prox_grad(SmoothSum F, Regularizer R, Partition part) {
  part.validate();
  if (part.dim() != F.dim()) throw Error(Errc::dimension_mismatch, "partition does not match problem dimension");
  R.validate();
  if (!(F.mu() > 0.0)) throw Error(Errc::invalid_parameters, "prox-grad operator needs a strongly convex smooth part");
  FixedPointOperator T;
  T.family_ = Family::prox_grad;
  T.norm_ = NormKind::euclidean;
  T.part_ = std::move(part);
  const double L = F.L(), mu = F.mu();
  const double Q = L / mu;
  T.c_ = (Q - 1.0) / (Q + 1.0);
  T.step_ = 2.0 / (mu + L);
  T.F_ = std::move(F);
  T.R_ = std::move(R);
  // fixed point by iterating the contraction itself
  Vec x = T.R_.kind == Regularizer::Kind::none ? T.F_->x_star() : prox(T.R_, T.step_, T.F_->x_star());
  for (int it = 0; it < 1000000; ++it) {
    Vec nx = T.apply(x);
    double diff = (nx - x).norm();
    x = nx;
    if (diff <= 1e-14 * (1.0 + x.norm())) break;
  }
  T.x_star_ = x;
  return T;
}

Vec FixedPointOperator::apply(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw Error(Errc::dimension_mismatch, "operator input has wrong dimension");
  if (family_ == Family::affine) return C_ * x + h_;
  return prox(R_, step_, x - step_ * F_->gradient(x));
}

Vec FixedPointOperator::apply_block(const Vec& x, std::size_t i) const {
  if (i >= part_.m()) throw Error(Errc::index_out_of_range, "block index out of range");
  if (static_cast<std::size_t>(x.size()) != dim()) throw Error(Errc::dimension_mismatch, "operator input has wrong dimension");
  const auto off = idx(part_.offset(i)), len = idx(part_.sizes[i]);
  if (family_ == Family::affine) return C_.middleRows(off, len) * x + h_.segment(off, len);
  // the regularizers are separable, so the block of the prox is the prox of the block
  Vec g = F_->gradient(x);
  Vec z = x.segment(off, len) - step_ * g.segment(off, len);
  if (R_.kind == Regularizer::Kind::box && R_.lo.size() != 1) {
    Regularizer sub = R_;
    sub.lo = R_.lo.segment(off, len);
    sub.hi = R_.hi.segment(off, len);
    return prox(sub, step_, z);
  }
  return prox(R_, step_, z);
}

Vec FixedPointOperator::residual(const Vec& x) const { return x - apply(x); }

Vec FixedPointOperator::residual_block(const Vec& x, std::size_t i) const {
  return x.segment(idx(part_.offset(i)), idx(part_.sizes[i])) - apply_block(x, i);
}

double FixedPointOperator::norm(const Vec& x) const {
  return norm_ == NormKind::euclidean ? x.norm() : block_max_norm(x, part_);
}

Vec operator_apply(const FixedPointOperator& T, const Vec& x) { return T.apply(x); }

Vec residual_apply(const FixedPointOperator& T, const Vec& x, std::optional<std::size_t> block) {
  return block ? T.residual_block(x, *block) : T.residual(x);
}

double contraction_modulus_estimate(const FixedPointOperator& T, const Vec& x_star, std::size_t samples, std::uint64_t seed) {
  if (static_cast<std::size_t>(x_star.size()) != T.dim()) throw Error(Errc::dimension_mismatch, "fixed point has wrong dimension");
  CounterRng rng(seed);
  const auto d = static_cast<std::uint64_t>(T.dim());
  double best = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Vec u(static_cast<Eigen::Index>(d));
    for (std::uint64_t j = 0; j < d; ++j) u[static_cast<Eigen::Index>(j)] = rng.normal(s * d + j);
    // radii spread over several orders of magnitude
    double radius = std::pow(10.0, 4.0 * rng.child(1).uniform(s) - 2.0) * (1.0 + x_star.norm());
    Vec x = x_star + radius * u / u.norm();
    double den = T.norm(x - x_star);
    if (den == 0.0) continue;
    best = std::max(best, T.norm(T.apply(x) - x_star) / den);
  }
  return best;
}

}  // namespace ail
