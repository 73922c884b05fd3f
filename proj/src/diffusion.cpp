#include "semscene/diffusion.hpp"

#include <cmath>

namespace semscene {

namespace {

void check_onehot_shape(const CategoricalGrid& g) {
  if (g.height <= 0 || g.width <= 0 || g.K <= 0)
    throw ShapeError("categorical grid is empty");
}

CategoricalGrid mix_with_uniform(const CategoricalGrid& onehot, double keep) {
  check_onehot_shape(onehot);
  CategoricalGrid out(onehot.height, onehot.width, onehot.K);
  const double off = (1.0 - keep) / onehot.K;
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = keep * onehot.values[i] + off;
  return out;
}

}  // namespace

CategoricalGrid forward_marginal(const CategoricalGrid& x0_onehot, int t,
                                 const NoiseSchedule& sched) {
  sched.check_step(t);
  return mix_with_uniform(x0_onehot, sched.alpha_bar[t]);
}

CategoricalGrid forward_step(const CategoricalGrid& x_prev_onehot, int t,
                             const NoiseSchedule& sched) {
  sched.check_step(t);
  return mix_with_uniform(x_prev_onehot, sched.alpha[t]);
}

CategoricalGrid sample_from(const CategoricalGrid& grid, Rng& rng) {
  check_onehot_shape(grid);
  CategoricalGrid out(grid.height, grid.width, grid.K, 0.0);
  for (size_t p = 0; p < grid.pixel_count(); ++p) {
    size_t k = rng.categorical(grid.pixel(p));
    out.pixel(p)[k] = 1.0;
  }
  return out;
}

CategoricalGrid posterior(const CategoricalGrid& xt_onehot, const CategoricalGrid& x0_dist,
                          int t, const NoiseSchedule& sched) {
  sched.check_step(t);
  if (xt_onehot.height != x0_dist.height || xt_onehot.width != x0_dist.width ||
      xt_onehot.K != x0_dist.K)
    throw ShapeError("posterior operands have mismatched shapes");
  if (t == 1) return x0_dist;

  const int K = xt_onehot.K;
  const double alpha_t = sched.alpha[t];
  const double abar_prev = sched.alpha_bar[t - 1];
  const double off_t = (1.0 - alpha_t) / K;
  const double off_prev = (1.0 - abar_prev) / K;

  CategoricalGrid out(xt_onehot.height, xt_onehot.width, K);
  for (size_t p = 0; p < out.pixel_count(); ++p) {
    auto xt = xt_onehot.pixel(p);
    auto x0 = x0_dist.pixel(p);
    auto theta = out.pixel(p);
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      theta[k] = (alpha_t * xt[k] + off_t) * (abar_prev * x0[k] + off_prev);
      sum += theta[k];
    }
    for (int k = 0; k < K; ++k) theta[k] /= sum;
  }
  return out;
}

double kl_categorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("kl_categorical size mismatch");
  double sp = 0.0, sq = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12 || q[i] < -1e-12)
      throw DistributionError("kl_categorical: negative probability");
    sp += p[i];
    sq += q[i];
  }
  if (std::fabs(sp - 1.0) > 1e-6 || std::fabs(sq - 1.0) > 1e-6)
    throw DistributionError("kl_categorical: inputs must sum to 1");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * std::log(p[i] / std::max(q[i], kLogFloor));
  }
  return kl;
}

double mean_pixel_kl(const CategoricalGrid& p, const CategoricalGrid& q) {
  if (p.height != q.height || p.width != q.width || p.K != q.K)
    throw ShapeError("mean_pixel_kl shape mismatch");
  double total = 0.0;
  for (size_t i = 0; i < p.pixel_count(); ++i) total += kl_categorical(p.pixel(i), q.pixel(i));
  return total / static_cast<double>(p.pixel_count());
}

SemanticMap sample_layout(const Denoiser& denoiser, const ConditionSpec& cond,
                          const NoiseSchedule& sched, Rng& rng, double scale, int K) {
  if (!denoiser.supports(cond.kind))
    throw CheckpointError(std::string("denoiser was not trained for condition kind '") +
                          to_string(cond.kind) + "'");
  cond.validate();
  const int H = cond.mask.height, W = cond.mask.width;
  CategoricalGrid uniform(H, W, K, 1.0 / K);
  CategoricalGrid x_t = sample_from(uniform, rng);
  for (int t = sched.T; t >= 2; --t) {
    CategoricalGrid xhat0 = denoiser.predict(x_t, t, cond);
    x_t = sample_from(posterior(x_t, xhat0, t, sched), rng);
  }
  CategoricalGrid xhat0 = denoiser.predict(x_t, 1, cond);
  return argmax_map(xhat0, scale);
}

}  // namespace semscene
