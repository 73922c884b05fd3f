#include "semscene/train.hpp"

#include <cstdio>
#include <fstream>

namespace semscene {

TrainedDenoiser train_denoiser(const std::vector<SceneRecord>& dataset,
                               const DenoiserTrainConfig& cfg, uint64_t palette_hash) {
  if (dataset.empty()) throw DataError("train_denoiser: empty dataset");
  if (cfg.steps < 1 || cfg.batch_size < 1) throw ConfigError("steps and batch_size must be positive");

  NoiseSchedule sched = build_schedule(cfg.T, cfg.schedule);
  Rng rng(cfg.seed);
  Rng init_rng = rng.derive(0xD0);
  ReferenceDenoiser model(cfg.model, cfg.mode, palette_hash, init_rng);

  Adam opt(model.param_count(), {.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  std::vector<double> grad(model.param_count(), 0.0);

  const int buckets = 10;
  std::vector<double> bucket_sum(buckets, 0.0);
  std::vector<long> bucket_n(buckets, 0);
  std::vector<TrainLogRow> log;

  for (int step = 1; step <= cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int b = 0; b < cfg.batch_size; ++b) {
      const SceneRecord& rec = dataset[rng.uniform_int(dataset.size())];
      int t = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(cfg.T))) + 1;
      ConditionKind kind = cfg.mode == TrainingMode::Mixed
                               ? static_cast<ConditionKind>(rng.uniform_int(3))
                               : fixed_kind(cfg.mode);
      ConditionSpec cond = make_condition(kind, rec.arch, rec.layout.room_type);
      double loss = loss_mdm_accumulate(model, rec.layout.map, t, cond, sched, rng, grad);
      int bucket = std::min(buckets - 1, (t - 1) * buckets / cfg.T);
      bucket_sum[bucket] += loss;
      bucket_n[bucket] += 1;
    }
    const double inv_b = 1.0 / cfg.batch_size;
    for (double& g : grad) g *= inv_b;
    opt.update(model.params(), grad);

    if (step % cfg.log_every == 0 || step == cfg.steps) {
      for (int k = 0; k < buckets; ++k) {
        if (bucket_n[k] == 0) continue;
        log.push_back({step, k, bucket_sum[k] / bucket_n[k]});
        bucket_sum[k] = 0.0;
        bucket_n[k] = 0;
      }
    }
  }
  return {std::move(model), std::move(sched), std::move(log)};
}

void write_training_log_csv(const std::filesystem::path& path,
                            const std::vector<TrainLogRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "step,t_bucket,loss\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.10g", row.loss);
    out << row.step << ',' << row.t_bucket << ',' << buf << '\n';
  }
}

}  // namespace semscene
