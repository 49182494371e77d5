#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>

namespace coordhr {

/// SplitMix64 finalizer. Used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over a string, for turning preset names into stream labels.
std::uint64_t hash_label(std::string_view label);

/// Deterministic seed derivation: folds each path element into the master
/// seed with SplitMix64. Same (master, path) always yields the same seed.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Seedable generator with derivable substreams.
///
/// The engine is std::mt19937_64; conversions to doubles and Gaussian
/// variates are done here (not through <random> distributions) so streams
/// are bit-identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent stream `index` of this generator's seed.
  Rng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on {0, ..., n-1}; unbiased.
  std::size_t index(std::size_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Standard exponential.
  double exponential();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace coordhr
