#pragma once

#include "semscene/dataset.hpp"
#include "semscene/denoiser.hpp"

namespace semscene {

struct DenoiserTrainConfig {
  DenoiserConfig model;
  int T = 100;
  ScheduleKind schedule = ScheduleKind::Cosine;
  TrainingMode mode = TrainingMode::Mixed;
  int steps = 4000;
  int batch_size = 8;
  double lr = 2e-3;
  double weight_decay = 0.0;
  uint64_t seed = 1;
  int log_every = 200;  // flush per-bucket running means every N steps
};

/// Training log row: diffusion timesteps are grouped into ten buckets.
struct TrainLogRow {
  long step = 0;
  int t_bucket = 0;
  double loss = 0.0;
};

struct TrainedDenoiser {
  ReferenceDenoiser model;
  NoiseSchedule schedule;
  std::vector<TrainLogRow> log;
};

/// Adam on L_MDM over the dataset. In mixed mode every sample draws its
/// condition kind uniformly from {none, floor, arch}; per-masktype modes use
/// their fixed kind. Deterministic per seed.
TrainedDenoiser train_denoiser(const std::vector<SceneRecord>& dataset,
                               const DenoiserTrainConfig& cfg, uint64_t palette_hash);

void write_training_log_csv(const std::filesystem::path& path,
                            const std::vector<TrainLogRow>& rows);

}  // namespace semscene
