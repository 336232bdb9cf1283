#pragma once

#include <cstdint>
#include <random>

namespace dtfsc {

/// Sampling source for simulation. The double conversion is done by hand so
/// that a seed reproduces the same trajectory on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Index drawn from weights that sum to 1 (the last entry absorbs rounding).
template <typename Range, typename Weight>
std::size_t sample_index(Rng& rng, const Range& items, Weight weight) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t i = 0;
  for (const auto& item : items) {
    acc += weight(item);
    if (u < acc) return i;
    ++i;
  }
  return i == 0 ? 0 : i - 1;
}

}  // namespace dtfsc
