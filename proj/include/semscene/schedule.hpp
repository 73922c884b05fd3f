#pragma once

#include <string>
#include <vector>

namespace semscene {

enum class ScheduleKind : int { Cosine = 0, Linear = 1 };

const char* to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& s);

/// Per-step noise tables. beta/alpha are 1-indexed by timestep (index 0
/// unused); alpha_bar[t] is the cumulative retention product with
/// alpha_bar[0] = 1.
struct NoiseSchedule {
  int T = 0;
  ScheduleKind kind = ScheduleKind::Cosine;
  std::vector<double> beta;       // size T+1, beta[0] unused
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // size T+1, alpha_bar[0] = 1

  void check_step(int t) const;

  /// Invariants: beta in (0,1), alpha_bar strictly decreasing,
  /// near-uniform terminal marginal (alpha_bar[T] < 0.01).
  void validate() const;
};

/// Cosine: alpha_bar(t) = cos^2(((t/T + s)/(1 + s)) * pi/2), s = 0.008, with
/// beta clipped to [1e-8, 0.999]. Linear: beta from 1e-4 to 0.02.
NoiseSchedule build_schedule(int T, ScheduleKind kind);

/// Schedule from explicit betas (tests and checkpoint loading).
NoiseSchedule schedule_from_betas(std::vector<double> betas, ScheduleKind kind);

}  // namespace semscene
