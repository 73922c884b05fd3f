#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "semscene/apm.hpp"
#include "semscene/synth.hpp"

using namespace semscene;

namespace {

std::vector<double> random_tokens(int n, int d, Rng& rng) {
  std::vector<double> out(static_cast<size_t>(n) * d);
  for (auto& v : out) v = rng.normal();
  return out;
}

std::vector<SceneRecord> small_corpus(int scenes, uint64_t seed) {
  GrammarConfig g;
  Rng rng(seed);
  std::vector<SceneRecord> records;
  for (int i = 0; i < scenes; ++i) {
    Rng scene_rng = rng.derive(i + 1);
    records.push_back(generate_scene(g, static_cast<RoomType>(i % 3), scene_rng));
  }
  return records;
}

}  // namespace

TEST_CASE("cross-attention weights are row-normalized distributions") {
  const int n = 9, d = 8;
  Rng rng(1);
  auto q = random_tokens(n, d, rng);
  auto kv = random_tokens(n, d, rng);
  auto wq = random_tokens(d, d, rng);
  auto wk = random_tokens(d, d, rng);
  auto wv = random_tokens(d, d, rng);

  AttentionResult res = cross_attention(q, kv, n, d, wq, wk, wv);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double w = res.weights[static_cast<size_t>(i) * n + j];
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("identical key/value tokens make the output query-independent") {
  const int n = 6, d = 5;
  Rng rng(2);
  auto wq = random_tokens(d, d, rng);
  auto wk = random_tokens(d, d, rng);
  auto wv = random_tokens(d, d, rng);

  std::vector<double> kv(static_cast<size_t>(n) * d);
  std::vector<double> token(d);
  for (auto& v : token) v = rng.normal();
  for (int t = 0; t < n; ++t) std::copy(token.begin(), token.end(), kv.begin() + t * d);

  auto q1 = random_tokens(n, d, rng);
  auto q2 = random_tokens(n, d, rng);
  AttentionResult r1 = cross_attention(q1, kv, n, d, wq, wk, wv);
  AttentionResult r2 = cross_attention(q2, kv, n, d, wq, wk, wv);
  for (size_t i = 0; i < r1.output.size(); ++i)
    CHECK(r1.output[i] == doctest::Approx(r2.output[i]).epsilon(1e-12));
}

TEST_CASE("key/value token permutation leaves the output unchanged") {
  const int n = 8, d = 6;
  Rng rng(3);
  auto q = random_tokens(n, d, rng);
  auto kv = random_tokens(n, d, rng);
  auto wq = random_tokens(d, d, rng);
  auto wk = random_tokens(d, d, rng);
  auto wv = random_tokens(d, d, rng);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  std::vector<double> kv_perm(kv.size());
  for (int t = 0; t < n; ++t)
    std::copy(kv.begin() + perm[t] * d, kv.begin() + (perm[t] + 1) * d, kv_perm.begin() + t * d);

  AttentionResult a = cross_attention(q, kv, n, d, wq, wk, wv);
  AttentionResult b = cross_attention(q, kv_perm, n, d, wq, wk, wv);
  for (size_t i = 0; i < a.output.size(); ++i)
    CHECK(a.output[i] == doctest::Approx(b.output[i]).epsilon(1e-10));

  std::vector<double> short_q(q.begin(), q.begin() + (n - 1) * d);
  CHECK_THROWS_AS(cross_attention(short_q, kv, n, d, wq, wk, wv), ShapeError);
}

TEST_CASE("zero-weight model outputs its head biases; prediction deterministic") {
  ApmConfig cfg;
  cfg.K = 12;
  cfg.grid_tokens = 4;
  cfg.feat_dim = 8;
  cfg.trunk_dim = 8;
  Rng init(7);
  ApmModel model(cfg, 0x1, init);

  auto corpus = small_corpus(1, 3);
  const auto& rec = corpus[0];
  InstanceMask mask = mask_from_instance(rec.layout, 0);

  AttributePrediction p1 = model.predict(rec.layout.map, mask);
  AttributePrediction p2 = model.predict(rec.layout.map, mask);
  CHECK(p1.s_y == p2.s_y);
  CHECK(p1.p_y == p2.p_y);
  CHECK(p1.orientation_logits == p2.orientation_logits);

  std::fill(model.params().begin(), model.params().end(), 0.0);
  const auto& layout = model.layout();
  model.params()[layout.find("head_s_b").offset] = 1.25;
  model.params()[layout.find("head_p_b").offset] = 0.75;
  model.params()[layout.find("head_r_b").offset + 2] = 9.0;
  AttributePrediction p3 = model.predict(rec.layout.map, mask);
  CHECK(p3.s_y == doctest::Approx(1.25));
  CHECK(p3.p_y == doctest::Approx(0.75));
  CHECK(p3.orientation == 2);

  // Large-margin correct logit: total collapses to a vanishing L_r.
  ApmLossValue loss = loss_apm(model, rec.layout.map, mask, {1.25, 0.75, 2}, false);
  CHECK(loss.l_s == doctest::Approx(0.0));
  CHECK(loss.l_p == doctest::Approx(0.0));
  CHECK(loss.l_r == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(loss.total == loss.l_s + loss.l_p + loss.l_r);
}

TEST_CASE("apm loss gradients match central finite differences") {
  ApmConfig cfg;
  cfg.K = 12;
  cfg.grid_tokens = 4;
  cfg.feat_dim = 6;
  cfg.trunk_dim = 6;
  Rng init(11);
  ApmModel model(cfg, 0x1, init);

  auto corpus = small_corpus(2, 9);
  const auto& rec = corpus[0];
  InstanceMask mask = mask_from_instance(rec.layout, 0);
  ApmTarget target{0.6, 0.1, 1};

  ApmLossValue base = loss_apm(model, rec.layout.map, mask, target, true);
  CHECK(base.total == base.l_s + base.l_p + base.l_r);

  const double step = 1e-5;
  Rng pick(21);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    size_t idx = pick.uniform_int(model.param_count());
    double saved = model.params()[idx];
    model.params()[idx] = saved + step;
    double up = loss_apm(model, rec.layout.map, mask, target, false).total;
    model.params()[idx] = saved - step;
    double down = loss_apm(model, rec.layout.map, mask, target, false).total;
    model.params()[idx] = saved;

    double fd = (up - down) / (2 * step);
    double analytic = base.grad[idx];
    double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-8});
    if (std::fabs(fd) < 1e-10 && std::fabs(analytic) < 1e-10) continue;
    CHECK(std::fabs(fd - analytic) / denom < 1e-4);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("five-scene overfit reaches perfect training orientation accuracy") {
  auto corpus = small_corpus(5, 17);
  ApmTrainConfig cfg;
  cfg.model.K = 12;
  cfg.model.grid_tokens = 6;
  cfg.model.feat_dim = 32;
  cfg.model.trunk_dim = 32;
  cfg.steps = 5000;
  cfg.batch_size = 8;
  cfg.lr = 3e-3;
  cfg.weight_decay = 0.0;
  cfg.seed = 5;
  TrainedApm trained = train_apm(corpus, cfg, 0x1);

  int total = 0, correct = 0;
  for (const auto& rec : corpus) {
    for (size_t i = 0; i < rec.layout.instances.size(); ++i) {
      InstanceMask mask = mask_from_instance(rec.layout, i);
      AttributePrediction pred = trained.model.predict(rec.layout.map, mask);
      ++total;
      correct += pred.orientation == rec.layout.instances[i].orientation;
    }
  }
  CHECK(total > 0);
  CHECK(correct == total);

  // Training is deterministic per seed (short runs compare cheaply).
  ApmTrainConfig short_cfg = cfg;
  short_cfg.steps = 100;
  TrainedApm a = train_apm(corpus, short_cfg, 0x1);
  TrainedApm b = train_apm(corpus, short_cfg, 0x1);
  CHECK(std::equal(a.model.params().begin(), a.model.params().end(), b.model.params().begin()));
}

TEST_CASE("apm checkpoint round trip") {
  auto corpus = small_corpus(2, 23);
  ApmTrainConfig cfg;
  cfg.model.K = 12;
  cfg.steps = 20;
  cfg.batch_size = 4;
  TrainedApm trained = train_apm(corpus, cfg, 0xBEEF);

  auto tmp = std::filesystem::temp_directory_path() / "semscene_apm_test";
  std::filesystem::create_directories(tmp);
  save_apm(tmp / "apm.json", trained.model);
  ApmModel loaded = load_apm(tmp / "apm.json");
  CHECK(loaded.palette_hash() == 0xBEEF);
  CHECK(std::equal(loaded.params().begin(), loaded.params().end(),
                   trained.model.params().begin()));
}

TEST_CASE("orientation heuristics") {
  // Inward: a room with the instance on the west side faces east (class 1).
  SemanticMap map(10, 20, 0.5, 12, kFloor);
  InstanceMask mask;
  mask.height = 10;
  mask.width = 20;
  mask.category = kFirstObjectCategory;
  mask.cells.assign(200, 0);
  for (int r = 4; r < 6; ++r)
    for (int c = 1; c < 3; ++c) {
      mask.cells[static_cast<size_t>(r) * 20 + c] = 1;
      ++mask.pixel_count;
    }
  CHECK(heuristic_orientation(OrientationHeuristic::Inward, mask, map, nullptr, nullptr) == 1);

  AttributePriors priors;
  priors.per_category[kFirstObjectCategory] = {1.0, 0.0, {10, 1, 1, 1}, 13};
  priors.global_orientation_counts = {1, 1, 8, 1};
  priors.total = 13;
  priors.global_mean_sy = 0.9;
  priors.global_mean_py = 0.05;
  CHECK(heuristic_orientation(OrientationHeuristic::Majority, mask, map, &priors, nullptr) == 0);
  InstanceMask other = mask;
  other.category = kFirstObjectCategory + 1;  // falls back to the global counts
  CHECK(heuristic_orientation(OrientationHeuristic::Majority, other, map, &priors, nullptr) == 2);

  Rng rng(31);
  std::array<long, 4> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    ++counts[heuristic_orientation(OrientationHeuristic::Random, mask, map, nullptr, &rng)];
  for (long c : counts) CHECK(std::fabs(static_cast<double>(c) / n - 0.25) < 0.01);
}

TEST_CASE("vertical priors and their recomputation") {
  auto corpus = small_corpus(12, 29);
  AttributePriors priors = compute_attribute_priors(corpus);

  // Brute-force recomputation with independent bookkeeping.
  std::map<int, std::vector<double>> sy, py;
  for (const auto& rec : corpus)
    for (const auto& inst : rec.layout.instances) {
      sy[inst.category].push_back(inst.size.y);
      py[inst.category].push_back(inst.position.y);
    }
  for (const auto& [cat, values] : sy) {
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    auto [h_sy, h_py] = heuristic_vertical(cat, priors);
    CHECK(h_sy == doctest::Approx(mean).epsilon(1e-12));
    double mean_py = std::accumulate(py[cat].begin(), py[cat].end(), 0.0) / py[cat].size();
    CHECK(h_py == doctest::Approx(mean_py).epsilon(1e-12));
  }

  auto [g_sy, g_py] = heuristic_vertical(999, priors);
  CHECK(g_sy == doctest::Approx(priors.global_mean_sy));
  CHECK(g_py == doctest::Approx(priors.global_mean_py));

  AttributePriors empty;
  CHECK_THROWS_AS(heuristic_vertical(4, empty), ConfigError);

  // JSON round trip.
  AttributePriors back = priors_from_json(priors_to_json(priors));
  CHECK(back.total == priors.total);
  CHECK(back.global_mean_sy == priors.global_mean_sy);
  CHECK(back.per_category.size() == priors.per_category.size());
}

TEST_CASE("empty mask and bad targets are rejected") {
  ApmConfig cfg;
  cfg.K = 12;
  Rng init(3);
  ApmModel model(cfg, 0x1, init);
  auto corpus = small_corpus(1, 5);
  InstanceMask empty;
  empty.height = corpus[0].layout.map.height;
  empty.width = corpus[0].layout.map.width;
  empty.category = 4;
  empty.cells.assign(static_cast<size_t>(empty.height) * empty.width, 0);
  CHECK_THROWS_AS(model.predict(corpus[0].layout.map, empty), InstanceError);

  InstanceMask mask = mask_from_instance(corpus[0].layout, 0);
  CHECK_THROWS_AS(loss_apm(model, corpus[0].layout.map, mask, {0.5, 0.0, 7}, false),
                  InstanceError);
}
