#pragma once

#include <cmath>
#include <vector>

#include "ail/algorithms.hpp"

namespace ail::detail {

// Keeps every stride-th iterate and the last one.
class IterateRecorder {
 public:
  explicit IterateRecorder(std::size_t K) : K_(K), stride_(thinning_stride(K)) {}
  void offer(RunResult& r, std::size_t k, const Vec& x) const {
    if (k % stride_ == 0 || k == K_) {
      r.iterate_index.push_back(k);
      r.iterates.push_back(x);
    }
  }

 private:
  std::size_t K_, stride_;
};

// monitored_k <= margin * bound_k at every k (or every multiple of `every`);
// infinite or NaN bounds are skipped.
inline Verdict check_bound(const std::vector<double>& monitored, const std::vector<double>& bound, double margin,
                           const Tolerance& tol, std::size_t every = 0) {
  Verdict v;
  v.tight = false;
  v.bound_checked = true;
  for (std::size_t k = 0; k < monitored.size() && k < bound.size(); ++k) {
    if (every > 0 && k % every != 0) continue;
    double b = bound[k];
    if (std::isnan(b) || b == HUGE_VAL) continue;
    b *= margin;
    ++v.steps_checked;
    if (!std::isfinite(monitored[k])) {
      v.pass = false;
      v.kind = ViolationKind::non_finite;
      v.index = k;
      v.lhs = monitored[k];
      v.rhs = b;
      return v;
    }
    if (!tol.holds(monitored[k], b, std::abs(b))) {
      v.pass = false;
      v.kind = ViolationKind::bound;
      v.index = k;
      v.lhs = monitored[k];
      v.rhs = b;
      return v;
    }
  }
  return v;
}

inline void finish_checks(RunResult& r, const Tolerance& tol = {}, std::size_t every = 0) {
  r.verdict = check_bound(r.monitored, r.bound, r.margin, tol, every);
  for (auto& e : r.extra) e.verdict = check_bound(e.monitored, e.bound, r.margin, tol, every);
  if (r.form) r.recursion = verify_trace(r.trace, *r.form, tol);
}

inline std::size_t max_of(const std::vector<std::size_t>& v) {
  std::size_t m = 0;
  for (auto x : v) m = std::max(m, x);
  return m;
}

}  // namespace ail::detail
