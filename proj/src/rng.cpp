#include "ail/rng.hpp"

#include <cmath>
#include <numbers>

namespace ail {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n, std::uint64_t counter) const {
  unsigned __int128 prod = static_cast<unsigned __int128>(bits(counter)) * n;
  return static_cast<std::uint64_t>(prod >> 64);
}

double CounterRng::normal(std::uint64_t counter) const {
  // u1 in (0, 1] so the log is finite
  double u1 = (static_cast<double>(bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::child(std::uint64_t stream) const {
  return CounterRng(mix64(key_ ^ mix64(stream + kGolden)));
}

}  // namespace ail
