#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace semscene {

uint64_t splitmix64(uint64_t& state);

/// Deterministic RNG: mt19937_64 engine (sequence fixed by the standard)
/// with hand-rolled distributions so draws are identical on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  /// Independent stream for a sub-task (scene index, worker id, ...).
  Rng derive(uint64_t salt) const;

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n). Requires n > 0.
  uint64_t uniform_int(uint64_t n);

  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_range(int64_t lo, int64_t hi);

  /// Standard normal via Box-Muller (cached pair).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Index draw from unnormalized non-negative weights.
  size_t categorical(std::span<const double> weights);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace semscene
