#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace rbe {

/// SplitMix64 finalizer applied to (master, index). Used to derive
/// independent per-run seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random stream with portable distributions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard library's distributions are implementation
/// defined, so every distribution used here is written out explicitly:
///   uniform   : top 53 bits of one engine draw scaled by 2^-53
///   normal    : Box-Muller on two uniforms, the spare value is cached
///   below(n)  : Lemire-style rejection on 64-bit draws
/// Given the same seed the stream is bit-identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t below(std::size_t n);
  // Index drawn from a probability vector; the last index with non-zero
  // mass absorbs rounding.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rbe
