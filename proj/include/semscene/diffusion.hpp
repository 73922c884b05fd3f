#pragma once

#include <span>

#include "semscene/grid.hpp"
#include "semscene/rng.hpp"
#include "semscene/schedule.hpp"
#include "semscene/semantic_map.hpp"

namespace semscene {

/// Floor applied to probabilities inside logs (KL, NLL).
inline constexpr double kLogFloor = 1e-12;

/// q(x_t | x_0): probability alpha_bar_t + (1-alpha_bar_t)/K on the true
/// class and (1-alpha_bar_t)/K elsewhere.
CategoricalGrid forward_marginal(const CategoricalGrid& x0_onehot, int t,
                                 const NoiseSchedule& sched);

/// Single-step kernel q(x_t | x_{t-1}) = C(alpha_t x_{t-1} + (1-alpha_t)/K),
/// applied per pixel. Used by the marginal-consistency checks.
CategoricalGrid forward_step(const CategoricalGrid& x_prev_onehot, int t,
                             const NoiseSchedule& sched);

/// Independent per-pixel categorical draw; returns a one-hot grid.
CategoricalGrid sample_from(const CategoricalGrid& grid, Rng& rng);

/// q(x_{t-1} | x_t, x0) for hard or soft x0: per pixel the normalized product
/// [alpha_t x_t + (1-alpha_t)/K] * [alpha_bar_{t-1} x0 + (1-alpha_bar_{t-1})/K].
/// t = 1 returns x0_dist unchanged.
CategoricalGrid posterior(const CategoricalGrid& xt_onehot, const CategoricalGrid& x0_dist,
                          int t, const NoiseSchedule& sched);

/// KL(p || q) = sum p log(p/q) with 0 log 0 = 0 and q floored at kLogFloor.
/// Both inputs must be normalized distributions.
double kl_categorical(std::span<const double> p, std::span<const double> q);

/// Pixel-mean KL between two categorical grids.
double mean_pixel_kl(const CategoricalGrid& p, const CategoricalGrid& q);

/// Denoiser contract: estimate the per-pixel x0 distribution from a noisy
/// one-hot grid, the timestep, and the conditioning input. Implementations
/// must be deterministic given identical inputs and parameters.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual CategoricalGrid predict(const CategoricalGrid& xt_onehot, int t,
                                  const ConditionSpec& cond) const = 0;
  /// Whether this denoiser accepts the given condition kind at inference.
  virtual bool supports(ConditionKind /*kind*/) const { return true; }
};

/// Ancestral sampler: x_T uniform, x_{t-1} ~ posterior(x_t, xhat0, t) for
/// t = T..2, then the argmax of the final x0 estimate.
SemanticMap sample_layout(const Denoiser& denoiser, const ConditionSpec& cond,
                          const NoiseSchedule& sched, Rng& rng, double scale, int K);

}  // namespace semscene
