#include "semscene/denoiser.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "semscene/json_io.hpp"

namespace semscene {

const char* to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::Mixed: return "mixed";
    case TrainingMode::NoneOnly: return "none";
    case TrainingMode::FloorOnly: return "floor";
    case TrainingMode::ArchOnly: return "arch";
  }
  return "mixed";
}

TrainingMode training_mode_from_string(const std::string& s) {
  if (s == "mixed") return TrainingMode::Mixed;
  if (s == "none") return TrainingMode::NoneOnly;
  if (s == "floor") return TrainingMode::FloorOnly;
  if (s == "arch") return TrainingMode::ArchOnly;
  throw ConfigError("unknown training mode '" + s + "'");
}

ConditionKind fixed_kind(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::NoneOnly: return ConditionKind::None;
    case TrainingMode::FloorOnly: return ConditionKind::Floor;
    case TrainingMode::ArchOnly: return ConditionKind::Arch;
    default: throw ConfigError("mixed mode has no fixed condition kind");
  }
}

void DenoiserConfig::validate() const {
  if (K < kFirstObjectCategory + 1) throw ConfigError("denoiser K must be at least 5");
  if (room_types < 1) throw ConfigError("denoiser needs at least one room type");
  if (embed_dim < 2 || embed_dim % 2 != 0) throw ConfigError("embed_dim must be even and >= 2");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be positive");
  if (radius < 0) throw ConfigError("radius must be non-negative");
}

namespace {

std::vector<double> sinusoidal_embedding(int t, int d) {
  std::vector<double> emb(d);
  int half = d / 2;
  for (int i = 0; i < half; ++i) {
    double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / half);
    emb[2 * i] = std::sin(t * freq);
    emb[2 * i + 1] = std::cos(t * freq);
  }
  return emb;
}

}  // namespace

ReferenceDenoiser::ReferenceDenoiser(DenoiserConfig cfg, TrainingMode mode,
                                     uint64_t palette_hash, Rng& init_rng)
    : cfg_(cfg), mode_(mode), palette_hash_(palette_hash) {
  cfg_.validate();
  const int d = cfg_.embed_dim, h = cfg_.hidden_dim, K = cfg_.K, S = cfg_.window();
  off_embed_cat_ = layout_.add("embed_cat", static_cast<size_t>(K) * d);
  off_embed_mask_ = layout_.add("embed_mask", 4 * static_cast<size_t>(d));
  off_embed_room_ = layout_.add("embed_room", static_cast<size_t>(cfg_.room_types) * d);
  off_embed_cond_ = layout_.add("embed_cond", 3 * static_cast<size_t>(d));
  off_w1_spatial_ = layout_.add("w1_spatial", static_cast<size_t>(h) * S * d);
  off_w1_time_ = layout_.add("w1_time", static_cast<size_t>(h) * d);
  off_b1_ = layout_.add("b1", h);
  off_w2_ = layout_.add("w2", static_cast<size_t>(K) * h);
  off_b2_ = layout_.add("b2", K);
  params_.assign(layout_.total, 0.0);

  auto init_block = [&](size_t off, size_t count, double stddev) {
    for (size_t i = 0; i < count; ++i) params_[off + i] = init_rng.normal(0.0, stddev);
  };
  init_block(off_embed_cat_, static_cast<size_t>(K) * d, 0.5);
  init_block(off_embed_mask_, 4 * static_cast<size_t>(d), 0.5);
  init_block(off_embed_room_, static_cast<size_t>(cfg_.room_types) * d, 0.5);
  init_block(off_embed_cond_, 3 * static_cast<size_t>(d), 0.5);
  init_block(off_w1_spatial_, static_cast<size_t>(h) * S * d,
             std::sqrt(2.0 / ((S + 1.0) * d + h)));
  init_block(off_w1_time_, static_cast<size_t>(h) * d, std::sqrt(2.0 / ((S + 1.0) * d + h)));
  init_block(off_w2_, static_cast<size_t>(K) * h, std::sqrt(2.0 / (h + K)));
}

bool ReferenceDenoiser::supports(ConditionKind kind) const {
  if (mode_ == TrainingMode::Mixed) return true;
  return kind == fixed_kind(mode_);
}

std::vector<double> ReferenceDenoiser::make_time_vec(int t, int room_type, int kind_index) const {
  const int d = cfg_.embed_dim;
  std::vector<double> tv = sinusoidal_embedding(t, d);
  if (room_type < 0 || room_type >= cfg_.room_types)
    throw ConfigError("room type outside the model's range");
  const double* er = params_.data() + off_embed_room_ + static_cast<size_t>(room_type) * d;
  const double* ec = params_.data() + off_embed_cond_ + static_cast<size_t>(kind_index) * d;
  for (int j = 0; j < d; ++j) tv[j] += er[j] + ec[j];
  return tv;
}

ReferenceDenoiser::Forward ReferenceDenoiser::forward(const std::vector<uint8_t>& xt_cats,
                                                      int H, int W, int t,
                                                      const ConditionSpec& cond) const {
  const int d = cfg_.embed_dim, h = cfg_.hidden_dim, K = cfg_.K;
  const int rho = cfg_.radius, S = cfg_.window(), win = 2 * rho + 1;
  if (static_cast<int>(xt_cats.size()) != H * W) throw ShapeError("xt category count mismatch");
  if (cond.mask.height != H || cond.mask.width != W)
    throw ShapeError("condition mask dimensions do not match the input grid");
  if (!supports(cond.kind))
    throw CheckpointError(std::string("denoiser was not trained for condition kind '") +
                          to_string(cond.kind) + "'");

  Forward fwd;
  fwd.H = H;
  fwd.W = W;
  fwd.t = t;
  fwd.room_type = cond.room_type;
  fwd.kind_index = static_cast<int>(cond.kind);
  fwd.xt_cats = xt_cats;
  fwd.mask_cells = cond.mask.cells;
  fwd.time_vec = make_time_vec(t, cond.room_type, fwd.kind_index);

  const double* w1 = params_.data() + off_w1_spatial_;
  const double* w1t = params_.data() + off_w1_time_;
  const double* b1 = params_.data() + off_b1_;
  const double* w2 = params_.data() + off_w2_;
  const double* b2 = params_.data() + off_b2_;
  const double* ecat = params_.data() + off_embed_cat_;
  const double* emask = params_.data() + off_embed_mask_;
  const size_t sd = static_cast<size_t>(S) * d;

  // Window-position tables: T[o][cat*4+mask] = W1_block(o) * (e_cat + e_mask).
  const int combos = K * 4;
  std::vector<double> table(static_cast<size_t>(S) * combos * h, 0.0);
  {
    std::vector<double> tcat(static_cast<size_t>(S) * K * h);
    std::vector<double> tmask(static_cast<size_t>(S) * 4 * h);
    for (int o = 0; o < S; ++o) {
      for (int c = 0; c < K; ++c) {
        double* dst = tcat.data() + (static_cast<size_t>(o) * K + c) * h;
        const double* emb = ecat + static_cast<size_t>(c) * d;
        for (int row = 0; row < h; ++row) {
          const double* wrow = w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
          double acc = 0.0;
          for (int j = 0; j < d; ++j) acc += wrow[j] * emb[j];
          dst[row] = acc;
        }
      }
      for (int m = 0; m < 4; ++m) {
        double* dst = tmask.data() + (static_cast<size_t>(o) * 4 + m) * h;
        const double* emb = emask + static_cast<size_t>(m) * d;
        for (int row = 0; row < h; ++row) {
          const double* wrow = w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
          double acc = 0.0;
          for (int j = 0; j < d; ++j) acc += wrow[j] * emb[j];
          dst[row] = acc;
        }
      }
      for (int c = 0; c < K; ++c) {
        const double* tc = tcat.data() + (static_cast<size_t>(o) * K + c) * h;
        for (int m = 0; m < 4; ++m) {
          const double* tm = tmask.data() + (static_cast<size_t>(o) * 4 + m) * h;
          double* dst = table.data() + (static_cast<size_t>(o) * combos + c * 4 + m) * h;
          for (int row = 0; row < h; ++row) dst[row] = tc[row] + tm[row];
        }
      }
    }
  }

  std::vector<double> base(h);
  for (int row = 0; row < h; ++row) {
    double acc = b1[row];
    const double* wrow = w1t + static_cast<size_t>(row) * d;
    for (int j = 0; j < d; ++j) acc += wrow[j] * fwd.time_vec[j];
    base[row] = acc;
  }

  const size_t P = static_cast<size_t>(H) * W;
  fwd.hidden.assign(P * h, 0.0);
  fwd.xhat0 = CategoricalGrid(H, W, K);
  std::vector<double> acc(h);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const size_t p = static_cast<size_t>(r) * W + c;
      std::copy(base.begin(), base.end(), acc.begin());
      for (int dr = -rho; dr <= rho; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= H) continue;
        const int o_row = (dr + rho) * win;
        for (int dc = -rho; dc <= rho; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= W) continue;
          const size_t q = static_cast<size_t>(rr) * W + cc;
          const int combo = xt_cats[q] * 4 + fwd.mask_cells[q];
          const double* src =
              table.data() + (static_cast<size_t>(o_row + dc + rho) * combos + combo) * h;
          for (int row = 0; row < h; ++row) acc[row] += src[row];
        }
      }
      double* hid = fwd.hidden.data() + p * h;
      for (int row = 0; row < h; ++row) hid[row] = std::tanh(acc[row]);

      auto out = fwd.xhat0.pixel(p);
      double max_logit = -1e300;
      for (int k = 0; k < K; ++k) {
        const double* wrow = w2 + static_cast<size_t>(k) * h;
        double logit = b2[k];
        for (int row = 0; row < h; ++row) logit += wrow[row] * hid[row];
        out[k] = logit;
        if (logit > max_logit) max_logit = logit;
      }
      double denom = 0.0;
      for (int k = 0; k < K; ++k) {
        out[k] = std::exp(out[k] - max_logit);
        denom += out[k];
      }
      for (int k = 0; k < K; ++k) out[k] /= denom;
    }
  }
  return fwd;
}

CategoricalGrid ReferenceDenoiser::predict(const CategoricalGrid& xt_onehot, int t,
                                           const ConditionSpec& cond) const {
  if (xt_onehot.K != cfg_.K) throw ShapeError("input grid K does not match the model");
  std::vector<uint8_t> cats = xt_onehot.argmax();
  return forward(cats, xt_onehot.height, xt_onehot.width, t, cond).xhat0;
}

void ReferenceDenoiser::backward(const Forward& fwd, const CategoricalGrid& dL_dxhat0,
                                 std::span<double> grad) const {
  const int d = cfg_.embed_dim, h = cfg_.hidden_dim, K = cfg_.K;
  const int rho = cfg_.radius, S = cfg_.window(), win = 2 * rho + 1;
  const int H = fwd.H, W = fwd.W;
  const size_t P = static_cast<size_t>(H) * W;
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer size mismatch");
  if (dL_dxhat0.height != H || dL_dxhat0.width != W || dL_dxhat0.K != K)
    throw ShapeError("dL/dxhat0 shape mismatch");

  const double* w2 = params_.data() + off_w2_;
  const double* w1 = params_.data() + off_w1_spatial_;
  const double* w1t = params_.data() + off_w1_time_;
  const double* ecat = params_.data() + off_embed_cat_;
  const double* emask = params_.data() + off_embed_mask_;
  const size_t sd = static_cast<size_t>(S) * d;

  double* g_w2 = grad.data() + off_w2_;
  double* g_b2 = grad.data() + off_b2_;
  double* g_w1 = grad.data() + off_w1_spatial_;
  double* g_w1t = grad.data() + off_w1_time_;
  double* g_b1 = grad.data() + off_b1_;
  double* g_ecat = grad.data() + off_embed_cat_;
  double* g_emask = grad.data() + off_embed_mask_;

  std::vector<double> dpre(P * static_cast<size_t>(h), 0.0);
  std::vector<double> dlogits(K);
  for (size_t p = 0; p < P; ++p) {
    auto xhat = fwd.xhat0.pixel(p);
    auto g_out = dL_dxhat0.pixel(p);
    double dot = 0.0;
    for (int k = 0; k < K; ++k) dot += g_out[k] * xhat[k];
    for (int k = 0; k < K; ++k) dlogits[k] = xhat[k] * (g_out[k] - dot);

    const double* hid = fwd.hidden.data() + p * h;
    double* dp = dpre.data() + p * h;
    for (int k = 0; k < K; ++k) {
      const double dlk = dlogits[k];
      if (dlk == 0.0) continue;
      g_b2[k] += dlk;
      double* gw2row = g_w2 + static_cast<size_t>(k) * h;
      const double* w2row = w2 + static_cast<size_t>(k) * h;
      for (int row = 0; row < h; ++row) {
        gw2row[row] += dlk * hid[row];
        dp[row] += dlk * w2row[row];
      }
    }
    for (int row = 0; row < h; ++row) dp[row] *= 1.0 - hid[row] * hid[row];
  }

  // Bucket dpre by (window offset, category, mask class) before forming
  // weight and embedding gradients; this keeps the hot loop at one h-vector
  // add per (pixel, offset).
  const int combos = K * 4;
  std::vector<double> buckets(static_cast<size_t>(S) * combos * h, 0.0);
  std::vector<double> dsum(h, 0.0);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const size_t p = static_cast<size_t>(r) * W + c;
      const double* dp = dpre.data() + p * h;
      for (int row = 0; row < h; ++row) dsum[row] += dp[row];
      for (int dr = -rho; dr <= rho; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= H) continue;
        const int o_row = (dr + rho) * win;
        for (int dc = -rho; dc <= rho; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= W) continue;
          const size_t q = static_cast<size_t>(rr) * W + cc;
          const int combo = fwd.xt_cats[q] * 4 + fwd.mask_cells[q];
          double* dst = buckets.data() + (static_cast<size_t>(o_row + dc + rho) * combos + combo) * h;
          for (int row = 0; row < h; ++row) dst[row] += dp[row];
        }
      }
    }
  }

  std::vector<double> bcat(static_cast<size_t>(K) * h);
  std::vector<double> bmask(4 * static_cast<size_t>(h));
  for (int o = 0; o < S; ++o) {
    std::fill(bcat.begin(), bcat.end(), 0.0);
    std::fill(bmask.begin(), bmask.end(), 0.0);
    for (int c = 0; c < K; ++c) {
      for (int m = 0; m < 4; ++m) {
        const double* src = buckets.data() + (static_cast<size_t>(o) * combos + c * 4 + m) * h;
        double* dc_ = bcat.data() + static_cast<size_t>(c) * h;
        double* dm = bmask.data() + static_cast<size_t>(m) * h;
        for (int row = 0; row < h; ++row) {
          dc_[row] += src[row];
          dm[row] += src[row];
        }
      }
    }
    for (int c = 0; c < K; ++c) {
      const double* b = bcat.data() + static_cast<size_t>(c) * h;
      const double* emb = ecat + static_cast<size_t>(c) * d;
      double* gemb = g_ecat + static_cast<size_t>(c) * d;
      for (int row = 0; row < h; ++row) {
        const double br = b[row];
        if (br == 0.0) continue;
        double* gw1row = g_w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
        const double* w1row = w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
        for (int j = 0; j < d; ++j) {
          gw1row[j] += br * emb[j];
          gemb[j] += br * w1row[j];
        }
      }
    }
    for (int m = 0; m < 4; ++m) {
      const double* b = bmask.data() + static_cast<size_t>(m) * h;
      const double* emb = emask + static_cast<size_t>(m) * d;
      double* gemb = g_emask + static_cast<size_t>(m) * d;
      for (int row = 0; row < h; ++row) {
        const double br = b[row];
        if (br == 0.0) continue;
        double* gw1row = g_w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
        const double* w1row = w1 + static_cast<size_t>(row) * sd + static_cast<size_t>(o) * d;
        for (int j = 0; j < d; ++j) {
          gw1row[j] += br * emb[j];
          gemb[j] += br * w1row[j];
        }
      }
    }
  }

  std::vector<double> dtv(d, 0.0);
  for (int row = 0; row < h; ++row) {
    g_b1[row] += dsum[row];
    const double* wrow = w1t + static_cast<size_t>(row) * d;
    double* gwrow = g_w1t + static_cast<size_t>(row) * d;
    for (int j = 0; j < d; ++j) {
      gwrow[j] += dsum[row] * fwd.time_vec[j];
      dtv[j] += dsum[row] * wrow[j];
    }
  }
  double* g_eroom = grad.data() + off_embed_room_ + static_cast<size_t>(fwd.room_type) * d;
  double* g_econd = grad.data() + off_embed_cond_ + static_cast<size_t>(fwd.kind_index) * d;
  for (int j = 0; j < d; ++j) {
    g_eroom[j] += dtv[j];
    g_econd[j] += dtv[j];
  }
}

double loss_mdm_accumulate(const ReferenceDenoiser& denoiser, const SemanticMap& x0, int t,
                           const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng,
                           std::span<double> grad_acc) {
  sched.check_step(t);
  const int K = denoiser.config().K;
  if (x0.K != K) throw ShapeError("x0 map K does not match the model");
  CategoricalGrid x0_onehot = one_hot(x0, K);
  CategoricalGrid xt = sample_from(forward_marginal(x0_onehot, t, sched), rng);
  auto fwd = denoiser.forward(xt.argmax(), x0.height, x0.width, t, cond);

  const size_t P = fwd.xhat0.pixel_count();
  const double inv_p = 1.0 / static_cast<double>(P);
  CategoricalGrid dxhat0(x0.height, x0.width, K, 0.0);
  double loss = 0.0;

  if (t >= 2) {
    CategoricalGrid q_post = posterior(xt, x0_onehot, t, sched);
    CategoricalGrid p_post = posterior(xt, fwd.xhat0, t, sched);
    const double alpha_t = sched.alpha[t];
    const double abar_prev = sched.alpha_bar[t - 1];
    const double off_t = (1.0 - alpha_t) / K;
    const double off_prev = (1.0 - abar_prev) / K;
    std::vector<double> g(K);
    for (size_t p = 0; p < P; ++p) {
      auto q = q_post.pixel(p);
      auto pp = p_post.pixel(p);
      loss += kl_categorical(q, pp) * inv_p;
      if (grad_acc.empty()) continue;
      auto xtp = xt.pixel(p);
      auto x0p = fwd.xhat0.pixel(p);
      // dL/dp, then through the normalized product to dL/dxhat0.
      double dot = 0.0;
      for (int k = 0; k < K; ++k) {
        g[k] = pp[k] > kLogFloor ? -q[k] / pp[k] * inv_p : 0.0;
        dot += g[k] * pp[k];
      }
      double s = 0.0;
      for (int k = 0; k < K; ++k) s += (alpha_t * xtp[k] + off_t) * (abar_prev * x0p[k] + off_prev);
      auto dx = dxhat0.pixel(p);
      for (int k = 0; k < K; ++k) {
        double a_k = alpha_t * xtp[k] + off_t;
        dx[k] = abar_prev * (a_k / s) * (g[k] - dot);
      }
    }
  } else {
    for (size_t p = 0; p < P; ++p) {
      int truth = x0.cells[p];
      double prob = std::max(fwd.xhat0.pixel(p)[truth], kLogFloor);
      loss += -std::log(prob) * inv_p;
      if (!grad_acc.empty() && fwd.xhat0.pixel(p)[truth] > kLogFloor)
        dxhat0.pixel(p)[truth] = -inv_p / prob;
    }
  }

  if (!grad_acc.empty()) denoiser.backward(fwd, dxhat0, grad_acc);
  return loss;
}

double mdm_loss_value(const Denoiser& denoiser, const SemanticMap& x0, int t,
                      const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng) {
  sched.check_step(t);
  const int K = x0.K;
  CategoricalGrid x0_onehot = one_hot(x0, K);
  CategoricalGrid xt = sample_from(forward_marginal(x0_onehot, t, sched), rng);
  CategoricalGrid xhat0 = denoiser.predict(xt, t, cond);
  if (t >= 2) {
    CategoricalGrid q_post = posterior(xt, x0_onehot, t, sched);
    CategoricalGrid p_post = posterior(xt, xhat0, t, sched);
    return mean_pixel_kl(q_post, p_post);
  }
  double loss = 0.0;
  const double inv_p = 1.0 / static_cast<double>(xhat0.pixel_count());
  for (size_t p = 0; p < xhat0.pixel_count(); ++p)
    loss += -std::log(std::max(xhat0.pixel(p)[x0.cells[p]], kLogFloor)) * inv_p;
  return loss;
}

MdmLoss loss_mdm(const ReferenceDenoiser& denoiser, const SemanticMap& x0, int t,
                 const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng,
                 bool with_grad) {
  MdmLoss result;
  if (with_grad) {
    result.grad.assign(denoiser.param_count(), 0.0);
    result.loss = loss_mdm_accumulate(denoiser, x0, t, cond, sched, rng, result.grad);
  } else {
    result.loss = loss_mdm_accumulate(denoiser, x0, t, cond, sched, rng, {});
  }
  return result;
}

void save_denoiser(const std::filesystem::path& path, const ReferenceDenoiser& model,
                   const NoiseSchedule& sched) {
  nlohmann::json j;
  j["version"] = kDenoiserCheckpointVersion;
  j["type"] = "denoiser";
  j["palette_hash"] = model.palette_hash();
  j["mode"] = to_string(model.mode());
  const auto& cfg = model.config();
  j["config"] = {{"K", cfg.K},
                 {"room_types", cfg.room_types},
                 {"embed_dim", cfg.embed_dim},
                 {"hidden_dim", cfg.hidden_dim},
                 {"radius", cfg.radius}};
  std::vector<double> betas(sched.beta.begin() + 1, sched.beta.end());
  j["schedule"] = {{"T", sched.T}, {"kind", to_string(sched.kind)}, {"betas", betas}};
  nlohmann::json params;
  for (const auto& block : model.layout().blocks) {
    auto span = model.params().subspan(block.offset, block.count);
    params[block.name] = std::vector<double>(span.begin(), span.end());
  }
  j["params"] = params;
  save_json_file(path, j, -1);
}

std::pair<ReferenceDenoiser, NoiseSchedule> load_denoiser(const std::filesystem::path& path) {
  nlohmann::json j = load_json_file(path);
  if (!j.contains("version") || j.at("version").get<int>() != kDenoiserCheckpointVersion ||
      j.value("type", "") != "denoiser")
    throw CheckpointError("not a compatible denoiser checkpoint: " + path.string());
  DenoiserConfig cfg;
  cfg.K = j.at("config").at("K").get<int>();
  cfg.room_types = j.at("config").at("room_types").get<int>();
  cfg.embed_dim = j.at("config").at("embed_dim").get<int>();
  cfg.hidden_dim = j.at("config").at("hidden_dim").get<int>();
  cfg.radius = j.at("config").at("radius").get<int>();
  TrainingMode mode = training_mode_from_string(j.at("mode").get<std::string>());
  Rng dummy(0);
  ReferenceDenoiser model(cfg, mode, j.at("palette_hash").get<uint64_t>(), dummy);
  for (const auto& block : model.layout().blocks) {
    auto vals = j.at("params").at(block.name).get<std::vector<double>>();
    if (vals.size() != block.count)
      throw CheckpointError("checkpoint parameter block '" + block.name + "' has wrong size");
    std::copy(vals.begin(), vals.end(), model.params().begin() + block.offset);
  }
  auto betas = j.at("schedule").at("betas").get<std::vector<double>>();
  NoiseSchedule sched = schedule_from_betas(
      std::move(betas), schedule_kind_from_string(j.at("schedule").at("kind").get<std::string>()));
  if (sched.T != j.at("schedule").at("T").get<int>())
    throw CheckpointError("checkpoint schedule length mismatch");
  return {std::move(model), std::move(sched)};
}

}  // namespace semscene
