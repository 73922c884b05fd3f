#include "semscene/rng.hpp"

#include <cmath>
#include <numbers>

#include "semscene/errors.hpp"

namespace semscene {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::derive(uint64_t salt) const {
  uint64_t state = seed_ ^ (0x6a09e667f3bcc909ULL + salt * 0x9e3779b97f4a7c15ULL);
  uint64_t derived = splitmix64(state);
  return Rng(derived);
}

double Rng::uniform() {
  // 53-bit mantissa trick; in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) throw ConfigError("uniform_int: n must be positive");
  // Lemire multiply-shift with rejection of the biased zone.
  uint64_t x = engine_();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  uint64_t lo = static_cast<uint64_t>(m);
  if (lo < n) {
    uint64_t threshold = -n % n;
    while (lo < threshold) {
      x = engine_();
      m = static_cast<__uint128_t>(x) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

int64_t Rng::uniform_range(int64_t lo, int64_t hi) {
  if (hi < lo) throw ConfigError("uniform_range: hi < lo");
  return lo + static_cast<int64_t>(uniform_int(static_cast<uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

size_t Rng::categorical(std::span<const double> weights) {
  if (weights.empty()) throw DistributionError("categorical: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DistributionError("categorical: negative weight");
    total += w;
  }
  if (total <= 0.0) throw DistributionError("categorical: weights sum to zero");
  double u = uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace semscene
