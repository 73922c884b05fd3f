#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "semscene/denoiser.hpp"
#include "semscene/train.hpp"

using namespace semscene;

namespace {

NoiseSchedule fixed_abar_schedule(std::vector<double> abar) {
  // Hand-built schedule with chosen cumulative retentions (tests only).
  NoiseSchedule sched;
  sched.T = static_cast<int>(abar.size());
  sched.beta.assign(sched.T + 1, 0.5);
  sched.alpha.assign(sched.T + 1, 0.5);
  sched.alpha_bar.assign(sched.T + 1, 1.0);
  for (int t = 1; t <= sched.T; ++t) {
    sched.alpha_bar[t] = abar[t - 1];
    sched.alpha[t] = sched.alpha_bar[t] / sched.alpha_bar[t - 1];
    sched.beta[t] = 1.0 - sched.alpha[t];
  }
  return sched;
}

CategoricalGrid onehot_pixel(int k, int K) {
  CategoricalGrid g(1, 1, K, 0.0);
  g.values[k] = 1.0;
  return g;
}

ConditionSpec none_condition(int h, int w, int room = 0) {
  return {ConditionKind::None, ArchMask(h, w, 0), room};
}

/// Denoiser that always answers with a fixed target map's one-hot.
class FixedMapDenoiser : public Denoiser {
 public:
  explicit FixedMapDenoiser(const SemanticMap& map) : grid_(one_hot(map, map.K)) {}
  CategoricalGrid predict(const CategoricalGrid&, int, const ConditionSpec&) const override {
    return grid_;
  }

 private:
  CategoricalGrid grid_;
};

SceneRecord tiny_record(int canvas, int K, uint64_t seed) {
  Rng rng(seed);
  SemanticMap map(canvas, canvas, 0.125, K, kVoid);
  for (int r = 1; r < canvas - 1; ++r)
    for (int c = 1; c < canvas - 1; ++c) map.at(r, c) = kFloor;
  // A blob of one object category plus a door strip.
  int cat = kFirstObjectCategory + static_cast<int>(rng.uniform_int(K - kFirstObjectCategory));
  for (int r = 2; r < 5; ++r)
    for (int c = 2; c < 6; ++c) map.at(r, c) = static_cast<uint8_t>(cat);
  map.at(1, canvas / 2) = kDoor;
  map.at(1, canvas / 2 + 1) = kDoor;
  SceneRecord rec;
  rec.layout.map = map;
  rec.layout.room_type = static_cast<int>(seed % kRoomTypeCount);
  rec.arch = arch_mask_from_map(map);
  return rec;
}

}  // namespace

TEST_CASE("build_schedule invariants and endpoints") {
  NoiseSchedule cosine = build_schedule(100, ScheduleKind::Cosine);
  CHECK(cosine.alpha_bar[0] == 1.0);
  CHECK(cosine.alpha_bar[100] < 0.01);
  CHECK_NOTHROW(cosine.validate());

  NoiseSchedule linear = build_schedule(1000, ScheduleKind::Linear);
  CHECK(linear.alpha_bar[0] == 1.0);
  CHECK(linear.beta[1] == doctest::Approx(1e-4));
  CHECK(linear.beta[1000] == doctest::Approx(0.02));
  for (int t = 1; t <= 1000; ++t) CHECK(linear.alpha_bar[t] < linear.alpha_bar[t - 1]);

  CHECK_THROWS_AS(build_schedule(1, ScheduleKind::Cosine), ConfigError);
  CHECK_THROWS_AS(cosine.check_step(0), StepError);
  CHECK_THROWS_AS(cosine.check_step(101), StepError);
}

TEST_CASE("forward marginal closed form") {
  NoiseSchedule sched = fixed_abar_schedule({1.0, 0.5, 0.0});
  CategoricalGrid x0 = onehot_pixel(2, 4);

  CategoricalGrid keep = forward_marginal(x0, 1, sched);  // abar = 1
  CHECK(keep.values == x0.values);

  CategoricalGrid half = forward_marginal(x0, 2, sched);  // abar = 0.5
  CHECK(half.at(0, 0, 0) == doctest::Approx(0.125));
  CHECK(half.at(0, 0, 1) == doctest::Approx(0.125));
  CHECK(half.at(0, 0, 2) == doctest::Approx(0.625));
  CHECK(half.at(0, 0, 3) == doctest::Approx(0.125));

  CategoricalGrid uniform = forward_marginal(x0, 3, sched);  // abar = 0
  for (int k = 0; k < 4; ++k) CHECK(uniform.at(0, 0, k) == doctest::Approx(0.25));

  CHECK_THROWS_AS(forward_marginal(x0, 0, sched), StepError);
  CHECK_THROWS_AS(forward_marginal(x0, 4, sched), StepError);
}

TEST_CASE("sample_from determinism and frequencies") {
  CategoricalGrid degenerate = onehot_pixel(3, 5);
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    CategoricalGrid draw = sample_from(degenerate, rng);
    CHECK(draw.values[3] == 1.0);
  }

  CategoricalGrid uniform(1, 1, 2, 0.5);
  long ones = 0;
  Rng mc(123);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += sample_from(uniform, mc).values[1] == 1.0;
  CHECK(std::fabs(static_cast<double>(ones) / n - 0.5) < 0.01);

  CategoricalGrid grid(4, 4, 6, 1.0 / 6);
  Rng a(77), b(77);
  CHECK(sample_from(grid, a).values == sample_from(grid, b).values);
}

TEST_CASE("posterior equals brute-force Bayes enumeration") {
  for (int K : {2, 3, 4}) {
    NoiseSchedule sched = build_schedule(5, ScheduleKind::Cosine);
    for (int t = 2; t <= 5; ++t) {
      for (int x0 = 0; x0 < K; ++x0) {
        for (int xt = 0; xt < K; ++xt) {
          CategoricalGrid post =
              posterior(onehot_pixel(xt, K), onehot_pixel(x0, K), t, sched);
          // Oracle: q(x_{t-1}=j | x_t, x_0) via q(x_t|x_{t-1}) q(x_{t-1}|x_0).
          std::vector<double> oracle(K);
          double total = 0.0;
          for (int j = 0; j < K; ++j) {
            double step = sched.alpha[t] * (j == xt ? 1.0 : 0.0) + (1.0 - sched.alpha[t]) / K;
            double marg = sched.alpha_bar[t - 1] * (j == x0 ? 1.0 : 0.0) +
                          (1.0 - sched.alpha_bar[t - 1]) / K;
            oracle[j] = step * marg;
            total += oracle[j];
          }
          for (int j = 0; j < K; ++j) {
            CHECK(std::fabs(post.values[j] - oracle[j] / total) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("posterior rows normalize and t=1 passes x0 through") {
  NoiseSchedule sched = build_schedule(8, ScheduleKind::Cosine);
  Rng rng(4);
  CategoricalGrid x0_dist(3, 3, 4);
  for (size_t p = 0; p < x0_dist.pixel_count(); ++p) {
    double sum = 0.0;
    auto px = x0_dist.pixel(p);
    for (int k = 0; k < 4; ++k) {
      px[k] = rng.uniform() + 1e-3;
      sum += px[k];
    }
    for (int k = 0; k < 4; ++k) px[k] /= sum;
  }
  CategoricalGrid xt = sample_from(x0_dist, rng);
  for (int t = 2; t <= 8; ++t) CHECK_NOTHROW(posterior(xt, x0_dist, t, sched).validate(1e-9));
  CategoricalGrid at_one = posterior(xt, x0_dist, 1, sched);
  CHECK(at_one.values == x0_dist.values);
}

TEST_CASE("posterior limit cases") {
  // alpha_t -> 1 with hard x0: the x_t factor dominates its own class.
  NoiseSchedule sched = fixed_abar_schedule({0.5, 0.5 * (1.0 - 1e-12)});
  CategoricalGrid post = posterior(onehot_pixel(1, 4), onehot_pixel(0, 4), 2, sched);
  // Direct evaluation of the product formula.
  double a1 = (1.0 - 1e-12) * 1.0 + 1e-12 / 4;
  double b1 = (1.0 - 0.5) / 4;
  double a0 = 1e-12 / 4;
  double b0 = 0.5 + 0.125;
  double s = a1 * b1 + a0 * b0 + 2 * (1e-12 / 4) * 0.125;
  CHECK(post.values[1] == doctest::Approx(a1 * b1 / s).epsilon(1e-9));
  CHECK(post.values[1] > 0.99);

  // Uniform x0 estimate near the chain end stays close to uniform.
  NoiseSchedule cosine = build_schedule(100, ScheduleKind::Cosine);
  CategoricalGrid uniform(1, 1, 4, 0.25);
  Rng rng(2);
  CategoricalGrid xt = sample_from(forward_marginal(onehot_pixel(0, 4), 100, cosine), rng);
  CategoricalGrid near_uniform = posterior(xt, uniform, 100, cosine);
  for (int k = 0; k < 4; ++k) CHECK(std::fabs(near_uniform.values[k] - 0.25) < 0.01);
}

TEST_CASE("kl_categorical values and properties") {
  std::vector<double> p{1.0, 0.0};
  std::vector<double> half{0.5, 0.5};
  CHECK(kl_categorical(p, p) == 0.0);
  CHECK(kl_categorical(p, half) == doctest::Approx(std::log(2.0)));

  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(5), b(5);
    double sa = 0, sb = 0;
    for (int k = 0; k < 5; ++k) {
      a[k] = rng.uniform() + 1e-6;
      b[k] = rng.uniform() + 1e-6;
      sa += a[k];
      sb += b[k];
    }
    for (int k = 0; k < 5; ++k) {
      a[k] /= sa;
      b[k] /= sb;
    }
    CHECK(kl_categorical(a, b) >= 0.0);
  }
  std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(kl_categorical(bad, half), DistributionError);
}

TEST_CASE("sequential single-step kernels reproduce the closed-form marginal") {
  NoiseSchedule sched = build_schedule(10, ScheduleKind::Cosine);
  const int K = 4, t_target = 7, n = 100000;
  CategoricalGrid x0 = onehot_pixel(2, K);
  CategoricalGrid analytic = forward_marginal(x0, t_target, sched);

  Rng rng(55);
  std::vector<long> counts(K, 0);
  for (int i = 0; i < n; ++i) {
    CategoricalGrid x = x0;
    for (int t = 1; t <= t_target; ++t) x = sample_from(forward_step(x, t, sched), rng);
    for (int k = 0; k < K; ++k)
      if (x.values[k] == 1.0) ++counts[k];
  }
  double l1 = 0.0;
  for (int k = 0; k < K; ++k)
    l1 += std::fabs(static_cast<double>(counts[k]) / n - analytic.values[k]);
  CHECK(l1 < 0.02);
}

TEST_CASE("sample_layout with a fixed-map oracle returns the map") {
  SemanticMap target(8, 8, 0.125, 6, kVoid);
  Rng fill(3);
  for (auto& c : target.cells) c = static_cast<uint8_t>(fill.uniform_int(6));
  FixedMapDenoiser oracle(target);
  NoiseSchedule sched = build_schedule(20, ScheduleKind::Cosine);

  Rng rng(99);
  SemanticMap out = sample_layout(oracle, none_condition(8, 8), sched, rng, target.scale, 6);
  CHECK(out.cells == target.cells);

  Rng r1(123), r2(123);
  SemanticMap s1 = sample_layout(oracle, none_condition(8, 8), sched, r1, target.scale, 6);
  SemanticMap s2 = sample_layout(oracle, none_condition(8, 8), sched, r2, target.scale, 6);
  CHECK(s1.cells == s2.cells);
}

TEST_CASE("loss_mdm is zero under the ground-truth oracle") {
  const int K = 6;
  SceneRecord rec = tiny_record(10, K, 1);
  NoiseSchedule sched = build_schedule(12, ScheduleKind::Cosine);
  FixedMapDenoiser oracle(rec.layout.map);
  ConditionSpec cond = make_condition(ConditionKind::Arch, rec.arch, 0);
  Rng rng(8);
  for (int t = 2; t <= 12; ++t)
    CHECK(mdm_loss_value(oracle, rec.layout.map, t, cond, sched, rng) == 0.0);
  // The hard oracle also nails the t=1 reconstruction term.
  CHECK(mdm_loss_value(oracle, rec.layout.map, 1, cond, sched, rng) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("denoiser gradients match central finite differences") {
  DenoiserConfig cfg;
  cfg.K = 5;
  cfg.room_types = 3;
  cfg.embed_dim = 4;
  cfg.hidden_dim = 6;
  cfg.radius = 1;
  Rng init(41);
  ReferenceDenoiser model(cfg, TrainingMode::Mixed, 0xABCD, init);

  SemanticMap x0(6, 6, 0.125, 5, kVoid);
  Rng fill(7);
  for (auto& c : x0.cells) c = static_cast<uint8_t>(fill.uniform_int(5));
  ArchMask arch = arch_mask_from_map(x0);
  NoiseSchedule sched = build_schedule(10, ScheduleKind::Cosine);

  const double step = 1e-5;
  int checked = 0;
  Rng pick(101);
  for (int t : {1, 2, 5, 10}) {
    ConditionKind kind = static_cast<ConditionKind>(t % 3);
    ConditionSpec cond = make_condition(kind, arch, t % 3);
    const uint64_t noise_seed = 1000 + t;

    Rng g(noise_seed);
    MdmLoss base = loss_mdm(model, x0, t, cond, sched, g, true);

    for (int i = 0; i < 30; ++i) {
      size_t idx = pick.uniform_int(model.param_count());
      double saved = model.params()[idx];
      Rng gp(noise_seed);
      model.params()[idx] = saved + step;
      double up = loss_mdm(model, x0, t, cond, sched, gp, false).loss;
      Rng gm(noise_seed);
      model.params()[idx] = saved - step;
      double down = loss_mdm(model, x0, t, cond, sched, gm, false).loss;
      model.params()[idx] = saved;

      double fd = (up - down) / (2 * step);
      double analytic = base.grad[idx];
      double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-8});
      if (std::fabs(fd) < 1e-10 && std::fabs(analytic) < 1e-10) continue;
      CHECK(std::fabs(fd - analytic) / denom < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("training loss decreases on a toy corpus") {
  std::vector<SceneRecord> corpus{tiny_record(10, 6, 1), tiny_record(10, 6, 2)};
  DenoiserTrainConfig cfg;
  cfg.model.K = 6;
  cfg.model.embed_dim = 8;
  cfg.model.hidden_dim = 16;
  cfg.model.radius = 1;
  cfg.T = 20;
  cfg.mode = TrainingMode::ArchOnly;
  cfg.steps = 200;
  cfg.batch_size = 4;
  cfg.lr = 5e-3;
  cfg.seed = 3;
  cfg.log_every = 20;
  TrainedDenoiser trained = train_denoiser(corpus, cfg, 0x1);

  double early = 0.0, late = 0.0;
  int early_n = 0, late_n = 0;
  for (const auto& row : trained.log) {
    if (row.step <= 40) {
      early += row.loss;
      ++early_n;
    } else if (row.step > 160) {
      late += row.loss;
      ++late_n;
    }
  }
  REQUIRE(early_n > 0);
  REQUIRE(late_n > 0);
  CHECK(late / late_n < early / early_n);
}

TEST_CASE("single-sample overfit drives the loss down") {
  std::vector<SceneRecord> corpus{tiny_record(12, 6, 5)};
  DenoiserTrainConfig cfg;
  cfg.model.K = 6;
  cfg.model.embed_dim = 12;
  cfg.model.hidden_dim = 32;
  cfg.model.radius = 2;
  cfg.T = 20;
  cfg.mode = TrainingMode::ArchOnly;
  cfg.steps = 2000;
  cfg.batch_size = 2;
  cfg.lr = 4e-3;
  cfg.seed = 11;
  TrainedDenoiser trained = train_denoiser(corpus, cfg, 0x1);

  const SceneRecord& rec = corpus[0];
  ConditionSpec cond = make_condition(ConditionKind::Arch, rec.arch, rec.layout.room_type);
  double total = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    Rng rng(500 + t);
    total += loss_mdm(trained.model, rec.layout.map, t, cond, trained.schedule, rng, false).loss;
  }
  CHECK(total / cfg.T < 0.05);
}

TEST_CASE("mixed mode serves all condition kinds; per-masktype refuses others") {
  std::vector<SceneRecord> corpus{tiny_record(10, 6, 1)};
  DenoiserTrainConfig cfg;
  cfg.model.K = 6;
  cfg.model.embed_dim = 8;
  cfg.model.hidden_dim = 12;
  cfg.model.radius = 1;
  cfg.T = 10;
  cfg.mode = TrainingMode::Mixed;
  cfg.steps = 50;
  cfg.batch_size = 2;
  cfg.seed = 5;
  TrainedDenoiser mixed = train_denoiser(corpus, cfg, 0x1);

  Rng rng(1);
  for (ConditionKind kind : {ConditionKind::None, ConditionKind::Floor, ConditionKind::Arch}) {
    ConditionSpec cond = make_condition(kind, corpus[0].arch, 0);
    CHECK_NOTHROW(
        sample_layout(mixed.model, cond, mixed.schedule, rng, 0.125, 6));
  }

  cfg.mode = TrainingMode::ArchOnly;
  TrainedDenoiser arch_only = train_denoiser(corpus, cfg, 0x1);
  ConditionSpec floor_cond = make_condition(ConditionKind::Floor, corpus[0].arch, 0);
  CHECK_THROWS_AS(
      sample_layout(arch_only.model, floor_cond, arch_only.schedule, rng, 0.125, 6),
      CheckpointError);
  CHECK(arch_only.model.supports(ConditionKind::Arch));
  CHECK_FALSE(arch_only.model.supports(ConditionKind::None));
}

TEST_CASE("checkpoint save/load round trip") {
  std::vector<SceneRecord> corpus{tiny_record(10, 6, 1)};
  DenoiserTrainConfig cfg;
  cfg.model.K = 6;
  cfg.model.embed_dim = 8;
  cfg.model.hidden_dim = 12;
  cfg.model.radius = 1;
  cfg.T = 10;
  cfg.steps = 20;
  cfg.batch_size = 2;
  TrainedDenoiser trained = train_denoiser(corpus, cfg, 0xFEED);

  auto tmp = std::filesystem::temp_directory_path() / "semscene_diffusion_test";
  std::filesystem::create_directories(tmp);
  save_denoiser(tmp / "ckpt.json", trained.model, trained.schedule);
  auto [loaded, sched] = load_denoiser(tmp / "ckpt.json");
  CHECK(loaded.palette_hash() == 0xFEED);
  CHECK(loaded.mode() == trained.model.mode());
  CHECK(std::equal(loaded.params().begin(), loaded.params().end(),
                   trained.model.params().begin()));
  CHECK(sched.T == trained.schedule.T);
  CHECK(sched.alpha_bar == trained.schedule.alpha_bar);

  ConditionSpec cond = make_condition(ConditionKind::Arch, corpus[0].arch, 0);
  Rng r1(9), r2(9);
  SemanticMap a = sample_layout(trained.model, cond, trained.schedule, r1, 0.125, 6);
  SemanticMap b = sample_layout(loaded, cond, sched, r2, 0.125, 6);
  CHECK(a.cells == b.cells);
}
