#include <Eigen/QR>
#include <cmath>

#include "ail/error.hpp"
#include "ail/problems.hpp"
#include "ail/rng.hpp"

namespace ail {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

enum Stream : std::uint64_t { kDesign = 1, kFactor, kTruth, kNoise, kLabels, kBasis, kShift };

}  // namespace

Vec gaussian_vector(std::size_t d, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng = CounterRng(seed).child(stream);
  Vec v(idx(d));
  for (std::size_t j = 0; j < d; ++j) v[idx(j)] = rng.normal(j);
  return v;
}

Mat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng = CounterRng(seed).child(stream);
  Mat M(idx(rows), idx(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) M(idx(r), idx(c)) = rng.normal(r * cols + c);
  return M;
}

SmoothSum make_least_squares(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t rank) {
  if (n == 0 || d == 0) throw Error(Errc::invalid_parameters, "least squares needs n, d >= 1");
  const std::size_t full = std::min(n, d);
  if (rank == 0) rank = full;
  if (rank > full) throw Error(Errc::invalid_parameters, "rank exceeds min(n, d)");
  Mat A;
  if (rank == full) {
    A = gaussian_matrix(n, d, seed, kDesign);
  } else {
    A = gaussian_matrix(n, rank, seed, kDesign) * gaussian_matrix(rank, d, seed, kFactor) / std::sqrt(static_cast<double>(rank));
  }
  Vec b = A * gaussian_vector(d, seed, kTruth) + 0.1 * gaussian_vector(n, seed, kNoise);
  return SmoothSum::least_squares(std::move(A), std::move(b));
}

SmoothSum make_logistic(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || n < 2 * d) throw Error(Errc::invalid_parameters, "logistic generator needs n >= 2d");
  Mat A = gaussian_matrix(n, d, seed, kDesign);
  Vec w = gaussian_vector(d, seed, kTruth);
  Vec noise = gaussian_vector(n, seed, kNoise);
  Vec labels(idx(n));
  for (std::size_t i = 0; i < n; ++i) labels[idx(i)] = A.row(idx(i)).dot(w) + 0.5 * noise[idx(i)] >= 0 ? 1.0 : -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    A.row(idx(2 * j)).setZero();
    A(idx(2 * j), idx(j)) = 1.0;
    labels[idx(2 * j)] = 1.0;
    A.row(idx(2 * j + 1)).setZero();
    A(idx(2 * j + 1), idx(j)) = 1.0;
    labels[idx(2 * j + 1)] = -1.0;
  }
  return SmoothSum::logistic(std::move(A), std::move(labels));
}

SmoothSum make_quadratic(std::size_t d, double mu, double L, std::uint64_t seed) {
  if (d == 0 || !(mu > 0.0) || !(L >= mu)) throw Error(Errc::invalid_parameters, "quadratic needs d >= 1 and 0 < mu <= L");
  if (d == 1 && mu != L) throw Error(Errc::invalid_parameters, "one-dimensional quadratic needs mu == L");
  Vec lam(idx(d));
  for (std::size_t j = 0; j < d; ++j)
    lam[idx(j)] = d == 1 ? mu : mu * std::pow(L / mu, static_cast<double>(j) / static_cast<double>(d - 1));
  lam[0] = mu;
  lam[idx(d - 1)] = L;
  Eigen::HouseholderQR<Mat> qr(gaussian_matrix(d, d, seed, kBasis));
  Mat Q = qr.householderQ();
  Mat H = Q * lam.asDiagonal() * Q.transpose();
  H = 0.5 * (H + H.transpose()).eval();
  Vec c = H * gaussian_vector(d, seed, kTruth);
  return SmoothSum::quadratic(std::move(H), std::move(c));
}

SmoothSum generate_problem(std::string_view family, std::size_t n, std::size_t d, std::uint64_t seed) {
  if (family == "least-squares") return make_least_squares(n, d, seed);
  if (family == "logistic") return make_logistic(n, d, seed);
  if (family == "quadratic") return make_quadratic(d, 1.0, 10.0, seed);
  throw Error(Errc::unsupported_family, "unknown problem family '" + std::string(family) + "'");
}

FixedPointOperator make_affine_euclidean(std::size_t d, double c, std::uint64_t seed, const Partition& part) {
  if (!(c > 0.0 && c < 1.0)) throw Error(Errc::invalid_parameters, "modulus must lie in (0,1)");
  Mat G = gaussian_matrix(d, d, seed, kDesign);
  Eigen::JacobiSVD<Mat> svd(G);
  Mat C = c * G / svd.singularValues()[0];
  return FixedPointOperator::affine(std::move(C), gaussian_vector(d, seed, kShift), part, NormKind::euclidean, c);
}

FixedPointOperator make_affine_block_max(std::size_t d, double c, std::uint64_t seed, const Partition& part) {
  if (!(c > 0.0 && c < 1.0)) throw Error(Errc::invalid_parameters, "modulus must lie in (0,1)");
  part.validate();
  if (part.dim() != d) throw Error(Errc::dimension_mismatch, "partition does not match dimension");
  Mat C = gaussian_matrix(d, d, seed, kDesign);
  for (std::size_t i = 0; i < part.m(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < part.m(); ++j) {
      Mat blk = C.block(idx(part.offset(i)), idx(part.offset(j)), idx(part.sizes[i]), idx(part.sizes[j]));
      Eigen::JacobiSVD<Mat> svd(blk);
      row += part.weights[i] / part.weights[j] * svd.singularValues()[0];
    }
    C.middleRows(idx(part.offset(i)), idx(part.sizes[i])) *= c / row;
  }
  return FixedPointOperator::affine(std::move(C), gaussian_vector(d, seed, kShift), part, NormKind::block_max, c);
}

}  // namespace ail
