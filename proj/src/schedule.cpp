#include "semscene/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semscene/errors.hpp"

namespace semscene {

const char* to_string(ScheduleKind kind) {
  return kind == ScheduleKind::Cosine ? "cosine" : "linear";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "cosine") return ScheduleKind::Cosine;
  if (s == "linear") return ScheduleKind::Linear;
  throw ConfigError("unknown schedule kind '" + s + "' (expected cosine|linear)");
}

void NoiseSchedule::check_step(int t) const {
  if (t < 1 || t > T) throw StepError("timestep " + std::to_string(t) + " outside [1, " +
                                      std::to_string(T) + "]");
}

void NoiseSchedule::validate() const {
  if (T < 2) throw ConfigError("noise schedule needs T >= 2");
  if (beta.size() != static_cast<size_t>(T) + 1 || alpha.size() != beta.size() ||
      alpha_bar.size() != beta.size())
    throw ShapeError("noise schedule table sizes inconsistent with T");
  if (alpha_bar[0] != 1.0) throw ConfigError("alpha_bar[0] must be 1");
  for (int t = 1; t <= T; ++t) {
    if (!(beta[t] > 0.0 && beta[t] < 1.0)) throw ConfigError("beta out of (0,1)");
    if (!(alpha_bar[t] < alpha_bar[t - 1])) throw ConfigError("alpha_bar not strictly decreasing");
  }
  if (!(alpha_bar[T] < 0.01)) throw ConfigError("terminal alpha_bar must be below 0.01");
}

NoiseSchedule schedule_from_betas(std::vector<double> betas, ScheduleKind kind) {
  NoiseSchedule sched;
  sched.T = static_cast<int>(betas.size());
  sched.kind = kind;
  sched.beta.assign(sched.T + 1, 0.0);
  sched.alpha.assign(sched.T + 1, 1.0);
  sched.alpha_bar.assign(sched.T + 1, 1.0);
  for (int t = 1; t <= sched.T; ++t) {
    sched.beta[t] = betas[t - 1];
    sched.alpha[t] = 1.0 - sched.beta[t];
    sched.alpha_bar[t] = sched.alpha_bar[t - 1] * sched.alpha[t];
  }
  return sched;
}

NoiseSchedule build_schedule(int T, ScheduleKind kind) {
  if (T < 2) throw ConfigError("build_schedule requires T >= 2");
  std::vector<double> betas(T);
  if (kind == ScheduleKind::Cosine) {
    constexpr double s = 0.008;
    auto abar = [&](double t) {
      double u = (t / T + s) / (1.0 + s) * std::numbers::pi / 2.0;
      double c = std::cos(u);
      return c * c;
    };
    double abar0 = abar(0.0);
    double prev = 1.0;
    for (int t = 1; t <= T; ++t) {
      double target = abar(static_cast<double>(t)) / abar0;
      double beta = 1.0 - target / prev;
      beta = std::clamp(beta, 1e-8, 0.999);
      betas[t - 1] = beta;
      prev *= 1.0 - beta;
    }
  } else {
    constexpr double beta_lo = 1e-4, beta_hi = 0.02;
    for (int t = 1; t <= T; ++t)
      betas[t - 1] = T == 1 ? beta_lo : beta_lo + (beta_hi - beta_lo) * (t - 1) / (T - 1);
  }
  NoiseSchedule sched = schedule_from_betas(std::move(betas), kind);
  sched.validate();
  return sched;
}

}  // namespace semscene
