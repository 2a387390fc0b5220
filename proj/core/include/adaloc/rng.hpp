#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "adaloc/types.hpp"

namespace adaloc {

/// Seedable random stream with a portable normal sampler.
///
/// std::normal_distribution is implementation-defined, so Gaussian draws go
/// through an explicit Box-Muller transform on top of mt19937_64. Named
/// substreams let independent noise sources (truth init, observation noise,
/// initial ensemble) draw without shifting each other's sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from this stream's base seed and a label.
  Rng substream(std::string_view purpose) const;

  std::uint64_t seed() const { return seed_; }

  /// Uniform draw in [0, 1).
  double uniform();

  /// Standard normal draw (Box-Muller, pair-cached).
  double normal();

  Vector normal_vector(Index n);

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// SplitMix64 step, used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace adaloc
