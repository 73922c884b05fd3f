#include "semscene/apm.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "semscene/diffusion.hpp"

namespace semscene {

using nlohmann::json;

void ApmConfig::validate() const {
  if (K < kFirstObjectCategory + 1) throw ConfigError("apm K must be at least 5");
  if (grid_tokens < 1) throw ConfigError("grid_tokens must be positive");
  if (feat_dim < 1 || trunk_dim < 1) throw ConfigError("feature dims must be positive");
}

AttentionResult cross_attention(std::span<const double> query_tokens,
                                std::span<const double> kv_tokens, int n, int d,
                                std::span<const double> wq, std::span<const double> wk,
                                std::span<const double> wv) {
  const size_t nd = static_cast<size_t>(n) * d;
  const size_t dd = static_cast<size_t>(d) * d;
  if (query_tokens.size() != nd || kv_tokens.size() != nd)
    throw ShapeError("cross_attention token buffers must be n*d");
  if (wq.size() != dd || wk.size() != dd || wv.size() != dd)
    throw ShapeError("cross_attention projections must be d*d");

  AttentionResult res;
  res.n = n;
  res.d = d;
  res.q.assign(nd, 0.0);
  res.k.assign(nd, 0.0);
  res.v.assign(nd, 0.0);
  auto project = [d, n](std::span<const double> w, std::span<const double> x, double* out) {
    for (int t = 0; t < n; ++t) {
      const double* xt = x.data() + static_cast<size_t>(t) * d;
      double* ot = out + static_cast<size_t>(t) * d;
      for (int i = 0; i < d; ++i) {
        const double* wrow = w.data() + static_cast<size_t>(i) * d;
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += wrow[j] * xt[j];
        ot[i] = acc;
      }
    }
  };
  project(wq, query_tokens, res.q.data());
  project(wk, kv_tokens, res.k.data());
  project(wv, kv_tokens, res.v.data());

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  res.weights.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double* row = res.weights.data() + static_cast<size_t>(i) * n;
    const double* qi = res.q.data() + static_cast<size_t>(i) * d;
    double max_score = -1e300;
    for (int j = 0; j < n; ++j) {
      const double* kj = res.k.data() + static_cast<size_t>(j) * d;
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += qi[a] * kj[a];
      row[j] = s * scale;
      max_score = std::max(max_score, row[j]);
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - max_score);
      denom += row[j];
    }
    for (int j = 0; j < n; ++j) row[j] /= denom;
  }

  res.output.assign(nd, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = res.weights.data() + static_cast<size_t>(i) * n;
    double* oi = res.output.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < n; ++j) {
      const double a = row[j];
      if (a == 0.0) continue;
      const double* vj = res.v.data() + static_cast<size_t>(j) * d;
      for (int k = 0; k < d; ++k) oi[k] += a * vj[k];
    }
  }
  return res;
}

ApmModel::ApmModel(ApmConfig cfg, uint64_t palette_hash, Rng& init_rng)
    : cfg_(cfg), palette_hash_(palette_hash) {
  cfg_.validate();
  const int d = cfg_.feat_dim, m = cfg_.trunk_dim, K = cfg_.K;
  off_enc_layout_w_ = layout_.add("enc_layout_w", static_cast<size_t>(d) * K);
  off_enc_layout_b_ = layout_.add("enc_layout_b", d);
  off_enc_mask_w_ = layout_.add("enc_mask_w", d);
  off_enc_mask_b_ = layout_.add("enc_mask_b", d);
  off_wq_ = layout_.add("wq", static_cast<size_t>(d) * d);
  off_wk_ = layout_.add("wk", static_cast<size_t>(d) * d);
  off_wv_ = layout_.add("wv", static_cast<size_t>(d) * d);
  off_trunk_w1_ = layout_.add("trunk_w1", static_cast<size_t>(m) * d);
  off_trunk_b1_ = layout_.add("trunk_b1", m);
  off_trunk_w2_ = layout_.add("trunk_w2", static_cast<size_t>(m) * m);
  off_trunk_b2_ = layout_.add("trunk_b2", m);
  off_head_s_w_ = layout_.add("head_s_w", m);
  off_head_s_b_ = layout_.add("head_s_b", 1);
  off_head_p_w_ = layout_.add("head_p_w", m);
  off_head_p_b_ = layout_.add("head_p_b", 1);
  off_head_r_w_ = layout_.add("head_r_w", 4 * static_cast<size_t>(m));
  off_head_r_b_ = layout_.add("head_r_b", 4);
  params_.assign(layout_.total, 0.0);

  auto init_block = [&](size_t off, size_t count, double stddev) {
    for (size_t i = 0; i < count; ++i) params_[off + i] = init_rng.normal(0.0, stddev);
  };
  init_block(off_enc_layout_w_, static_cast<size_t>(d) * K, std::sqrt(2.0 / (K + d)));
  init_block(off_enc_mask_w_, d, std::sqrt(2.0 / (1 + d)));
  init_block(off_wq_, static_cast<size_t>(d) * d, std::sqrt(1.0 / d));
  init_block(off_wk_, static_cast<size_t>(d) * d, std::sqrt(1.0 / d));
  init_block(off_wv_, static_cast<size_t>(d) * d, std::sqrt(1.0 / d));
  init_block(off_trunk_w1_, static_cast<size_t>(m) * d, std::sqrt(2.0 / (d + m)));
  init_block(off_trunk_w2_, static_cast<size_t>(m) * m, std::sqrt(2.0 / (m + m)));
  init_block(off_head_s_w_, m, std::sqrt(1.0 / m));
  init_block(off_head_p_w_, m, std::sqrt(1.0 / m));
  init_block(off_head_r_w_, 4 * static_cast<size_t>(m), std::sqrt(1.0 / m));
}

namespace {

// Patch boundaries via integer block splits so any H >= g works.
inline std::pair<int, int> patch_range(int i, int total, int g) {
  return {i * total / g, (i + 1) * total / g};
}

}  // namespace

ApmModel::Forward ApmModel::forward(const SemanticMap& map, const InstanceMask& mask) const {
  const int g = cfg_.grid_tokens, d = cfg_.feat_dim, m = cfg_.trunk_dim, K = cfg_.K;
  const int n = g * g;
  if (map.K != K) throw ShapeError("map K does not match the APM");
  if (mask.height != map.height || mask.width != map.width)
    throw ShapeError("instance mask dimensions do not match the map");
  if (mask.pixel_count < 1) throw InstanceError("instance mask is empty");
  if (map.height < g || map.width < g) throw ShapeError("map smaller than the token grid");

  Forward fwd;
  fwd.layout_pooled.assign(static_cast<size_t>(n) * K, 0.0);
  fwd.mask_pooled.assign(n, 0.0);
  for (int i = 0; i < g; ++i) {
    auto [r0, r1] = patch_range(i, map.height, g);
    for (int j = 0; j < g; ++j) {
      auto [c0, c1] = patch_range(j, map.width, g);
      const int t = i * g + j;
      double* lp = fwd.layout_pooled.data() + static_cast<size_t>(t) * K;
      int count = (r1 - r0) * (c1 - c0);
      int set = 0;
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          lp[map.at(r, c)] += 1.0;
          set += mask.at(r, c) ? 1 : 0;
        }
      }
      for (int k = 0; k < K; ++k) lp[k] /= count;
      fwd.mask_pooled[t] = static_cast<double>(set) / count;
    }
  }

  const double* elw = params_.data() + off_enc_layout_w_;
  const double* elb = params_.data() + off_enc_layout_b_;
  const double* emw = params_.data() + off_enc_mask_w_;
  const double* emb = params_.data() + off_enc_mask_b_;
  fwd.q_tokens.assign(static_cast<size_t>(n) * d, 0.0);
  fwd.kv_tokens.assign(static_cast<size_t>(n) * d, 0.0);
  for (int t = 0; t < n; ++t) {
    const double* lp = fwd.layout_pooled.data() + static_cast<size_t>(t) * K;
    double* qt = fwd.q_tokens.data() + static_cast<size_t>(t) * d;
    double* kt = fwd.kv_tokens.data() + static_cast<size_t>(t) * d;
    for (int i = 0; i < d; ++i) {
      const double* wrow = elw + static_cast<size_t>(i) * K;
      double acc = elb[i];
      for (int k = 0; k < K; ++k) acc += wrow[k] * lp[k];
      qt[i] = acc;
      kt[i] = emw[i] * fwd.mask_pooled[t] + emb[i];
    }
  }

  fwd.attn = cross_attention(fwd.q_tokens, fwd.kv_tokens, n, d,
                             std::span(params_).subspan(off_wq_, static_cast<size_t>(d) * d),
                             std::span(params_).subspan(off_wk_, static_cast<size_t>(d) * d),
                             std::span(params_).subspan(off_wv_, static_cast<size_t>(d) * d));

  fwd.pooled.assign(d, 0.0);
  for (int t = 0; t < n; ++t) {
    const double* ot = fwd.attn.output.data() + static_cast<size_t>(t) * d;
    for (int i = 0; i < d; ++i) fwd.pooled[i] += ot[i];
  }
  for (int i = 0; i < d; ++i) fwd.pooled[i] /= n;

  const double* w1 = params_.data() + off_trunk_w1_;
  const double* b1 = params_.data() + off_trunk_b1_;
  const double* w2 = params_.data() + off_trunk_w2_;
  const double* b2 = params_.data() + off_trunk_b2_;
  fwd.h1.assign(m, 0.0);
  fwd.h2.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double* wrow = w1 + static_cast<size_t>(i) * d;
    double acc = b1[i];
    for (int j = 0; j < d; ++j) acc += wrow[j] * fwd.pooled[j];
    fwd.h1[i] = std::tanh(acc);
  }
  for (int i = 0; i < m; ++i) {
    const double* wrow = w2 + static_cast<size_t>(i) * m;
    double acc = b2[i];
    for (int j = 0; j < m; ++j) acc += wrow[j] * fwd.h1[j];
    fwd.h2[i] = std::tanh(acc);
  }

  const double* hsw = params_.data() + off_head_s_w_;
  const double* hpw = params_.data() + off_head_p_w_;
  const double* hrw = params_.data() + off_head_r_w_;
  fwd.s_y = params_[off_head_s_b_];
  fwd.p_y = params_[off_head_p_b_];
  for (int j = 0; j < m; ++j) {
    fwd.s_y += hsw[j] * fwd.h2[j];
    fwd.p_y += hpw[j] * fwd.h2[j];
  }
  for (int k = 0; k < 4; ++k) {
    const double* wrow = hrw + static_cast<size_t>(k) * m;
    double acc = params_[off_head_r_b_ + k];
    for (int j = 0; j < m; ++j) acc += wrow[j] * fwd.h2[j];
    fwd.logits[k] = acc;
  }
  return fwd;
}

AttributePrediction ApmModel::predict(const SemanticMap& map, const InstanceMask& mask) const {
  Forward fwd = forward(map, mask);
  AttributePrediction pred;
  pred.s_y = std::max(fwd.s_y, 0.01);
  pred.p_y = fwd.p_y;
  pred.orientation_logits = fwd.logits;
  pred.orientation = 0;
  for (int k = 1; k < 4; ++k)
    if (fwd.logits[k] > fwd.logits[pred.orientation]) pred.orientation = k;
  return pred;
}

void ApmModel::backward(const Forward& fwd, double d_sy, double d_py,
                        const std::array<double, 4>& d_logits, std::span<double> grad) const {
  const int g = cfg_.grid_tokens, d = cfg_.feat_dim, m = cfg_.trunk_dim, K = cfg_.K;
  const int n = g * g;
  if (grad.size() != params_.size()) throw ShapeError("gradient buffer size mismatch");

  const double* hsw = params_.data() + off_head_s_w_;
  const double* hpw = params_.data() + off_head_p_w_;
  const double* hrw = params_.data() + off_head_r_w_;

  // Heads.
  std::vector<double> dh2(m, 0.0);
  grad[off_head_s_b_] += d_sy;
  grad[off_head_p_b_] += d_py;
  for (int j = 0; j < m; ++j) {
    grad[off_head_s_w_ + j] += d_sy * fwd.h2[j];
    grad[off_head_p_w_ + j] += d_py * fwd.h2[j];
    dh2[j] += d_sy * hsw[j] + d_py * hpw[j];
  }
  for (int k = 0; k < 4; ++k) {
    const double dk = d_logits[k];
    if (dk == 0.0) continue;
    grad[off_head_r_b_ + k] += dk;
    const double* wrow = hrw + static_cast<size_t>(k) * m;
    for (int j = 0; j < m; ++j) {
      grad[off_head_r_w_ + static_cast<size_t>(k) * m + j] += dk * fwd.h2[j];
      dh2[j] += dk * wrow[j];
    }
  }

  // Trunk.
  const double* w2 = params_.data() + off_trunk_w2_;
  const double* w1 = params_.data() + off_trunk_w1_;
  std::vector<double> dh1(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double dpre = dh2[i] * (1.0 - fwd.h2[i] * fwd.h2[i]);
    grad[off_trunk_b2_ + i] += dpre;
    const double* wrow = w2 + static_cast<size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      grad[off_trunk_w2_ + static_cast<size_t>(i) * m + j] += dpre * fwd.h1[j];
      dh1[j] += dpre * wrow[j];
    }
  }
  std::vector<double> dz(d, 0.0);
  for (int i = 0; i < m; ++i) {
    double dpre = dh1[i] * (1.0 - fwd.h1[i] * fwd.h1[i]);
    grad[off_trunk_b1_ + i] += dpre;
    const double* wrow = w1 + static_cast<size_t>(i) * d;
    for (int j = 0; j < d; ++j) {
      grad[off_trunk_w1_ + static_cast<size_t>(i) * d + j] += dpre * fwd.pooled[j];
      dz[j] += dpre * wrow[j];
    }
  }

  // Token-mean pooling spreads dz uniformly.
  const double inv_n = 1.0 / n;
  std::vector<double> d_out(static_cast<size_t>(n) * d);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < d; ++i) d_out[static_cast<size_t>(t) * d + i] = dz[i] * inv_n;

  // Attention backward.
  const auto& attn = fwd.attn;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> dV(static_cast<size_t>(n) * d, 0.0);
  std::vector<double> dQ(static_cast<size_t>(n) * d, 0.0);
  std::vector<double> dK(static_cast<size_t>(n) * d, 0.0);
  std::vector<double> dA(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* arow = attn.weights.data() + static_cast<size_t>(i) * n;
    const double* doi = d_out.data() + static_cast<size_t>(i) * d;
    double dot_total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double* vj = attn.v.data() + static_cast<size_t>(j) * d;
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += doi[a] * vj[a];
      dA[j] = s;
      dot_total += s * arow[j];
      double* dvj = dV.data() + static_cast<size_t>(j) * d;
      const double aij = arow[j];
      for (int a = 0; a < d; ++a) dvj[a] += aij * doi[a];
    }
    double* dqi = dQ.data() + static_cast<size_t>(i) * d;
    const double* qi = attn.q.data() + static_cast<size_t>(i) * d;
    for (int j = 0; j < n; ++j) {
      double ds = arow[j] * (dA[j] - dot_total) * scale;
      if (ds == 0.0) continue;
      const double* kj = attn.k.data() + static_cast<size_t>(j) * d;
      double* dkj = dK.data() + static_cast<size_t>(j) * d;
      for (int a = 0; a < d; ++a) {
        dqi[a] += ds * kj[a];
        dkj[a] += ds * qi[a];
      }
    }
  }

  // Projection weights and token gradients.
  std::vector<double> dxq(static_cast<size_t>(n) * d, 0.0);
  std::vector<double> dxkv(static_cast<size_t>(n) * d, 0.0);
  const double* wq = params_.data() + off_wq_;
  const double* wk = params_.data() + off_wk_;
  const double* wv = params_.data() + off_wv_;
  for (int t = 0; t < n; ++t) {
    const double* xq = fwd.q_tokens.data() + static_cast<size_t>(t) * d;
    const double* xkv = fwd.kv_tokens.data() + static_cast<size_t>(t) * d;
    const double* dq = dQ.data() + static_cast<size_t>(t) * d;
    const double* dk_ = dK.data() + static_cast<size_t>(t) * d;
    const double* dv = dV.data() + static_cast<size_t>(t) * d;
    double* dxq_t = dxq.data() + static_cast<size_t>(t) * d;
    double* dxkv_t = dxkv.data() + static_cast<size_t>(t) * d;
    for (int i = 0; i < d; ++i) {
      const double dqi = dq[i], dki = dk_[i], dvi = dv[i];
      const double* wq_row = wq + static_cast<size_t>(i) * d;
      const double* wk_row = wk + static_cast<size_t>(i) * d;
      const double* wv_row = wv + static_cast<size_t>(i) * d;
      for (int j = 0; j < d; ++j) {
        grad[off_wq_ + static_cast<size_t>(i) * d + j] += dqi * xq[j];
        grad[off_wk_ + static_cast<size_t>(i) * d + j] += dki * xkv[j];
        grad[off_wv_ + static_cast<size_t>(i) * d + j] += dvi * xkv[j];
        dxq_t[j] += dqi * wq_row[j];
        dxkv_t[j] += dki * wk_row[j] + dvi * wv_row[j];
      }
    }
  }

  // Encoders.
  for (int t = 0; t < n; ++t) {
    const double* lp = fwd.layout_pooled.data() + static_cast<size_t>(t) * K;
    const double* dxq_t = dxq.data() + static_cast<size_t>(t) * d;
    const double* dxkv_t = dxkv.data() + static_cast<size_t>(t) * d;
    const double mp = fwd.mask_pooled[t];
    for (int i = 0; i < d; ++i) {
      grad[off_enc_layout_b_ + i] += dxq_t[i];
      grad[off_enc_mask_b_ + i] += dxkv_t[i];
      grad[off_enc_mask_w_ + i] += dxkv_t[i] * mp;
      const double di = dxq_t[i];
      if (di == 0.0) continue;
      double* gw = grad.data() + off_enc_layout_w_ + static_cast<size_t>(i) * K;
      for (int k = 0; k < K; ++k) gw[k] += di * lp[k];
    }
  }
}

double loss_apm_accumulate(const ApmModel& model, const SemanticMap& map,
                           const InstanceMask& mask, const ApmTarget& target,
                           std::span<double> grad_acc) {
  ApmLossValue v;
  auto fwd = model.forward(map, mask);
  double ds = fwd.s_y - target.s_y;
  double dp = fwd.p_y - target.p_y;
  v.l_s = ds * ds;
  v.l_p = dp * dp;
  double max_logit = *std::max_element(fwd.logits.begin(), fwd.logits.end());
  double denom = 0.0;
  std::array<double, 4> sm{};
  for (int k = 0; k < 4; ++k) {
    sm[k] = std::exp(fwd.logits[k] - max_logit);
    denom += sm[k];
  }
  for (int k = 0; k < 4; ++k) sm[k] /= denom;
  v.l_r = -std::log(std::max(sm[target.orientation], kLogFloor));
  if (!grad_acc.empty()) {
    std::array<double, 4> d_logits = sm;
    d_logits[target.orientation] -= 1.0;
    model.backward(fwd, 2.0 * ds, 2.0 * dp, d_logits, grad_acc);
  }
  return v.l_s + v.l_p + v.l_r;
}

ApmLossValue loss_apm(const ApmModel& model, const SemanticMap& map, const InstanceMask& mask,
                      const ApmTarget& target, bool with_grad) {
  if (target.orientation < 0 || target.orientation > 3)
    throw InstanceError("target orientation class must be in {0,1,2,3}");
  ApmLossValue v;
  auto fwd = model.forward(map, mask);
  double ds = fwd.s_y - target.s_y;
  double dp = fwd.p_y - target.p_y;
  v.l_s = ds * ds;
  v.l_p = dp * dp;
  double max_logit = *std::max_element(fwd.logits.begin(), fwd.logits.end());
  double denom = 0.0;
  std::array<double, 4> sm{};
  for (int k = 0; k < 4; ++k) {
    sm[k] = std::exp(fwd.logits[k] - max_logit);
    denom += sm[k];
  }
  for (int k = 0; k < 4; ++k) sm[k] /= denom;
  v.l_r = -std::log(std::max(sm[target.orientation], kLogFloor));
  v.total = v.l_s + v.l_p + v.l_r;
  if (with_grad) {
    v.grad.assign(model.param_count(), 0.0);
    std::array<double, 4> d_logits = sm;
    d_logits[target.orientation] -= 1.0;
    model.backward(fwd, 2.0 * ds, 2.0 * dp, d_logits, v.grad);
  }
  return v;
}

InstanceMask mask_from_instance(const SceneLayout& layout, size_t instance_index) {
  if (instance_index >= layout.instances.size())
    throw IndexError("instance index out of range");
  const auto& inst = layout.instances[instance_index];
  const auto& map = layout.map;
  Point2 ext = inst.world_footprint();
  int c0 = static_cast<int>(std::llround((inst.position.x - ext.x / 2) / map.scale));
  int c1 = static_cast<int>(std::llround((inst.position.x + ext.x / 2) / map.scale)) - 1;
  int r0 = static_cast<int>(std::llround((inst.position.z - ext.z / 2) / map.scale));
  int r1 = static_cast<int>(std::llround((inst.position.z + ext.z / 2) / map.scale)) - 1;
  InstanceMask mask;
  mask.height = map.height;
  mask.width = map.width;
  mask.category = inst.category;
  mask.cells.assign(static_cast<size_t>(map.height) * map.width, 0);
  mask.min_row = map.height;
  mask.min_col = map.width;
  for (int r = std::max(0, r0); r <= std::min(map.height - 1, r1); ++r) {
    for (int c = std::max(0, c0); c <= std::min(map.width - 1, c1); ++c) {
      if (map.at(r, c) != inst.category) continue;
      mask.cells[static_cast<size_t>(r) * map.width + c] = 1;
      ++mask.pixel_count;
      mask.min_row = std::min(mask.min_row, r);
      mask.max_row = std::max(mask.max_row, r);
      mask.min_col = std::min(mask.min_col, c);
      mask.max_col = std::max(mask.max_col, c);
    }
  }
  if (mask.pixel_count == 0) throw InstanceError("instance footprint rasterizes to no pixels");
  return mask;
}

TrainedApm train_apm(const std::vector<SceneRecord>& dataset, const ApmTrainConfig& cfg,
                     uint64_t palette_hash) {
  if (dataset.empty()) throw DataError("train_apm: empty dataset");
  std::vector<std::pair<size_t, size_t>> index;
  for (size_t s = 0; s < dataset.size(); ++s)
    for (size_t i = 0; i < dataset[s].layout.instances.size(); ++i) index.push_back({s, i});
  if (index.empty()) throw DataError("train_apm: dataset has no instances");

  Rng rng(cfg.seed);
  Rng init_rng = rng.derive(0xA9);
  ApmModel model(cfg.model, palette_hash, init_rng);
  Adam opt(model.param_count(), {.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  std::vector<double> grad(model.param_count(), 0.0);

  // Ground-truth masks are fixed; cache them up front.
  std::vector<InstanceMask> masks(index.size());
  for (size_t i = 0; i < index.size(); ++i)
    masks[i] = mask_from_instance(dataset[index[i].first].layout, index[i].second);

  std::vector<ApmTrainLogRow> log;
  double running = 0.0;
  long running_n = 0;
  for (int step = 1; step <= cfg.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int b = 0; b < cfg.batch_size; ++b) {
      size_t pick = rng.uniform_int(index.size());
      const auto& [s, i] = index[pick];
      const auto& inst = dataset[s].layout.instances[i];
      ApmTarget target{inst.size.y, inst.position.y, inst.orientation};
      running += loss_apm_accumulate(model, dataset[s].layout.map, masks[pick], target, grad);
      ++running_n;
    }
    const double inv_b = 1.0 / cfg.batch_size;
    for (double& g : grad) g *= inv_b;
    opt.update(model.params(), grad);
    if (step % cfg.log_every == 0 || step == cfg.steps) {
      log.push_back({step, running / running_n});
      running = 0.0;
      running_n = 0;
    }
  }
  return {std::move(model), std::move(log)};
}

void save_apm(const std::filesystem::path& path, const ApmModel& model) {
  json j;
  j["version"] = kApmCheckpointVersion;
  j["type"] = "apm";
  j["palette_hash"] = model.palette_hash();
  const auto& cfg = model.config();
  j["config"] = {{"K", cfg.K},
                 {"grid_tokens", cfg.grid_tokens},
                 {"feat_dim", cfg.feat_dim},
                 {"trunk_dim", cfg.trunk_dim}};
  json params;
  for (const auto& block : model.layout().blocks) {
    auto span = model.params().subspan(block.offset, block.count);
    params[block.name] = std::vector<double>(span.begin(), span.end());
  }
  j["params"] = params;
  save_json_file(path, j, -1);
}

ApmModel load_apm(const std::filesystem::path& path) {
  json j = load_json_file(path);
  if (!j.contains("version") || j.at("version").get<int>() != kApmCheckpointVersion ||
      j.value("type", "") != "apm")
    throw CheckpointError("not a compatible APM checkpoint: " + path.string());
  ApmConfig cfg;
  cfg.K = j.at("config").at("K").get<int>();
  cfg.grid_tokens = j.at("config").at("grid_tokens").get<int>();
  cfg.feat_dim = j.at("config").at("feat_dim").get<int>();
  cfg.trunk_dim = j.at("config").at("trunk_dim").get<int>();
  Rng dummy(0);
  ApmModel model(cfg, j.at("palette_hash").get<uint64_t>(), dummy);
  for (const auto& block : model.layout().blocks) {
    auto vals = j.at("params").at(block.name).get<std::vector<double>>();
    if (vals.size() != block.count)
      throw CheckpointError("checkpoint parameter block '" + block.name + "' has wrong size");
    std::copy(vals.begin(), vals.end(), model.params().begin() + block.offset);
  }
  return model;
}

AttributePriors compute_attribute_priors(const std::vector<SceneRecord>& dataset) {
  if (dataset.empty()) throw DataError("compute_attribute_priors: empty dataset");
  AttributePriors priors;
  std::map<int, std::pair<double, double>> sums;
  double gsy = 0.0, gpy = 0.0;
  for (const auto& rec : dataset) {
    for (const auto& inst : rec.layout.instances) {
      auto& entry = priors.per_category[inst.category];
      auto& sum = sums[inst.category];
      sum.first += inst.size.y;
      sum.second += inst.position.y;
      entry.orientation_counts[inst.orientation] += 1;
      entry.count += 1;
      gsy += inst.size.y;
      gpy += inst.position.y;
      priors.global_orientation_counts[inst.orientation] += 1;
      priors.total += 1;
    }
  }
  if (priors.total == 0) throw DataError("compute_attribute_priors: no instances");
  for (auto& [cat, entry] : priors.per_category) {
    entry.mean_sy = sums[cat].first / entry.count;
    entry.mean_py = sums[cat].second / entry.count;
  }
  priors.global_mean_sy = gsy / priors.total;
  priors.global_mean_py = gpy / priors.total;
  return priors;
}

json priors_to_json(const AttributePriors& priors) {
  json j;
  j["version"] = 1;
  json per = json::object();
  for (const auto& [cat, e] : priors.per_category) {
    per[std::to_string(cat)] = {{"mean_sy", e.mean_sy},
                                {"mean_py", e.mean_py},
                                {"orientation_counts", e.orientation_counts},
                                {"count", e.count}};
  }
  j["per_category"] = per;
  j["global"] = {{"mean_sy", priors.global_mean_sy},
                 {"mean_py", priors.global_mean_py},
                 {"orientation_counts", priors.global_orientation_counts},
                 {"count", priors.total}};
  return j;
}

AttributePriors priors_from_json(const json& j) {
  AttributePriors priors;
  for (const auto& [key, value] : j.at("per_category").items()) {
    AttributePriors::Entry e;
    e.mean_sy = value.at("mean_sy").get<double>();
    e.mean_py = value.at("mean_py").get<double>();
    e.orientation_counts = value.at("orientation_counts").get<std::array<long, 4>>();
    e.count = value.at("count").get<long>();
    priors.per_category[std::stoi(key)] = e;
  }
  priors.global_mean_sy = j.at("global").at("mean_sy").get<double>();
  priors.global_mean_py = j.at("global").at("mean_py").get<double>();
  priors.global_orientation_counts =
      j.at("global").at("orientation_counts").get<std::array<long, 4>>();
  priors.total = j.at("global").at("count").get<long>();
  return priors;
}

namespace {

int argmax_counts(const std::array<long, 4>& counts) {
  int best = 0;
  for (int k = 1; k < 4; ++k)
    if (counts[k] > counts[best]) best = k;
  return best;
}

}  // namespace

int heuristic_orientation(OrientationHeuristic kind, const InstanceMask& mask,
                          const SemanticMap& map, const AttributePriors* stats, Rng* rng) {
  switch (kind) {
    case OrientationHeuristic::Random: {
      if (!rng) throw ConfigError("random orientation heuristic needs an rng");
      return static_cast<int>(rng->uniform_int(4));
    }
    case OrientationHeuristic::Majority: {
      if (!stats) throw ConfigError("majority orientation heuristic needs priors");
      auto it = stats->per_category.find(mask.category);
      const auto& counts = it != stats->per_category.end() ? it->second.orientation_counts
                                                           : stats->global_orientation_counts;
      return argmax_counts(counts);
    }
    case OrientationHeuristic::Inward: {
      double ir = 0.0, ic = 0.0;
      long in = 0;
      for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
          if (mask.at(r, c)) {
            ir += r + 0.5;
            ic += c + 0.5;
            ++in;
          }
      if (in == 0) throw InstanceError("inward heuristic: empty mask");
      double fr = 0.0, fc = 0.0;
      long fn = 0;
      for (int r = 0; r < map.height; ++r)
        for (int c = 0; c < map.width; ++c)
          if (map.at(r, c) != kVoid) {
            fr += r + 0.5;
            fc += c + 0.5;
            ++fn;
          }
      if (fn == 0) throw GeometryError("inward heuristic: no room pixels");
      double dx = fc / fn - ic / in;  // column axis is world x
      double dz = fr / fn - ir / in;  // row axis is world z
      int best = 0;
      double best_dot = -1e300;
      for (int r = 0; r < 4; ++r) {
        Point2 f = front_direction(r);
        double dot = f.x * dx + f.z * dz;
        if (dot > best_dot + 1e-12) {
          best_dot = dot;
          best = r;
        }
      }
      return best;
    }
  }
  throw ConfigError("unknown orientation heuristic");
}

std::pair<double, double> heuristic_vertical(int category, const AttributePriors& priors) {
  if (priors.total == 0) throw ConfigError("heuristic_vertical: empty priors");
  auto it = priors.per_category.find(category);
  if (it == priors.per_category.end())
    return {priors.global_mean_sy, priors.global_mean_py};
  return {it->second.mean_sy, it->second.mean_py};
}

}  // namespace semscene
