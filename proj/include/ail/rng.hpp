#pragma once

#include <cstdint>

namespace ail {

// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t z);

// Counter-based generator: draw n of key k is the n-th output of a SplitMix64
// stream seeded with k, so any language can reproduce a stream from the
// reference SplitMix64 vectors. Streams are split by hashing the stream id
// into a fresh key.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * kGolden); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;
  // Uniform integer in [0, n) via the high half of a 128-bit product.
  std::uint64_t below(std::uint64_t n, std::uint64_t counter) const;
  // Standard normal from draws 2*counter and 2*counter+1 (Box-Muller, cosine branch).
  double normal(std::uint64_t counter) const;

  CounterRng child(std::uint64_t stream) const;

 private:
  std::uint64_t key_;
};

// Sequential cursor over a counter stream.
class RngCursor {
 public:
  explicit RngCursor(CounterRng rng) : rng_(rng) {}
  std::uint64_t next_bits() { return rng_.bits(n_++); }
  double next_uniform() { return rng_.uniform(n_++); }
  std::uint64_t next_below(std::uint64_t n) { return rng_.below(n, n_++); }
  double next_normal() { return rng_.normal(n_++); }
  std::uint64_t position() const { return n_; }

 private:
  CounterRng rng_;
  std::uint64_t n_ = 0;
};

}  // namespace ail
