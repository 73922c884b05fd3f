#pragma once

#include <array>
#include <filesystem>
#include <map>

#include "semscene/dataset.hpp"
#include "semscene/extraction.hpp"
#include "semscene/optim.hpp"
#include "semscene/rng.hpp"

namespace semscene {

/// Scaled dot-product single-head cross-attention over flattened tokens.
/// Inputs are token-major (n x d); wq/wk/wv are d x d row-major.
struct AttentionResult {
  int n = 0, d = 0;
  std::vector<double> output;   // n x d
  std::vector<double> weights;  // n x n, rows sum to 1
  std::vector<double> q, k, v;  // projected tokens, kept for backward
};

AttentionResult cross_attention(std::span<const double> query_tokens,
                                std::span<const double> kv_tokens, int n, int d,
                                std::span<const double> wq, std::span<const double> wk,
                                std::span<const double> wv);

struct ApmConfig {
  int K = 12;
  int grid_tokens = 8;  // g: encoders pool to a g x g token grid
  int feat_dim = 32;    // d
  int trunk_dim = 32;

  void validate() const;
};

struct AttributePrediction {
  double s_y = 0.0;  // vertical extent, meters (clamped > 0)
  double p_y = 0.0;  // bottom offset above floor, meters
  std::array<double, 4> orientation_logits{};
  int orientation = 0;  // argmax class
};

struct ApmLossValue {
  double l_s = 0.0;   // squared error, meters^2
  double l_p = 0.0;
  double l_r = 0.0;   // cross-entropy, nats
  double total = 0.0;
  std::vector<double> grad;  // empty when not requested
};

struct ApmTarget {
  double s_y = 0.0;
  double p_y = 0.0;
  int orientation = 0;
};

/// Patch-pool + linear encoders into a g x g token grid, cross-attention of
/// layout features (query) against instance-mask features (key/value),
/// global average pooling, then a shared two-layer trunk with one linear
/// head per attribute.
class ApmModel {
 public:
  ApmModel(ApmConfig cfg, uint64_t palette_hash, Rng& init_rng);

  const ApmConfig& config() const { return cfg_; }
  uint64_t palette_hash() const { return palette_hash_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const ParamLayout& layout() const { return layout_; }
  size_t param_count() const { return params_.size(); }

  AttributePrediction predict(const SemanticMap& map, const InstanceMask& mask) const;

  struct Forward {
    std::vector<double> layout_pooled;  // n x K patch category fractions
    std::vector<double> mask_pooled;    // n
    std::vector<double> q_tokens;       // n x d (encoded layout)
    std::vector<double> kv_tokens;      // n x d (encoded mask)
    AttentionResult attn;
    std::vector<double> pooled;  // d, token mean of attention output
    std::vector<double> h1, h2;  // trunk activations (post-tanh)
    double s_y = 0.0, p_y = 0.0;
    std::array<double, 4> logits{};
  };

  Forward forward(const SemanticMap& map, const InstanceMask& mask) const;

  /// Accumulates parameter gradients given upstream gradients on the three
  /// head outputs.
  void backward(const Forward& fwd, double d_sy, double d_py,
                const std::array<double, 4>& d_logits, std::span<double> grad) const;

 private:
  ApmConfig cfg_;
  uint64_t palette_hash_ = 0;
  ParamLayout layout_;
  std::vector<double> params_;
  size_t off_enc_layout_w_ = 0, off_enc_layout_b_ = 0;
  size_t off_enc_mask_w_ = 0, off_enc_mask_b_ = 0;
  size_t off_wq_ = 0, off_wk_ = 0, off_wv_ = 0;
  size_t off_trunk_w1_ = 0, off_trunk_b1_ = 0, off_trunk_w2_ = 0, off_trunk_b2_ = 0;
  size_t off_head_s_w_ = 0, off_head_s_b_ = 0;
  size_t off_head_p_w_ = 0, off_head_p_b_ = 0;
  size_t off_head_r_w_ = 0, off_head_r_b_ = 0;
};

/// L_APM = L_s + L_p + L_r at one instance.
ApmLossValue loss_apm(const ApmModel& model, const SemanticMap& map, const InstanceMask& mask,
                      const ApmTarget& target, bool with_grad = true);

double loss_apm_accumulate(const ApmModel& model, const SemanticMap& map,
                           const InstanceMask& mask, const ApmTarget& target,
                           std::span<double> grad_acc);

/// Ground-truth instance mask rasterized from the layout's annotations.
InstanceMask mask_from_instance(const SceneLayout& layout, size_t instance_index);

struct ApmTrainConfig {
  ApmConfig model;
  int steps = 3000;
  int batch_size = 16;
  double lr = 1e-3;
  double weight_decay = 1e-3;
  uint64_t seed = 1;
  int log_every = 200;
};

struct ApmTrainLogRow {
  long step = 0;
  double loss = 0.0;
};

struct TrainedApm {
  ApmModel model;
  std::vector<ApmTrainLogRow> log;
};

/// Adam with decoupled weight decay on L_APM over every ground-truth
/// instance. Deterministic per seed.
TrainedApm train_apm(const std::vector<SceneRecord>& dataset, const ApmTrainConfig& cfg,
                     uint64_t palette_hash);

inline constexpr int kApmCheckpointVersion = 1;

void save_apm(const std::filesystem::path& path, const ApmModel& model);
ApmModel load_apm(const std::filesystem::path& path);

// --- Heuristic baselines -------------------------------------------------

/// Per-category attribute statistics from a training split.
struct AttributePriors {
  struct Entry {
    double mean_sy = 0.0;
    double mean_py = 0.0;
    std::array<long, 4> orientation_counts{};
    long count = 0;
  };
  std::map<int, Entry> per_category;
  double global_mean_sy = 0.0;
  double global_mean_py = 0.0;
  std::array<long, 4> global_orientation_counts{};
  long total = 0;
};

AttributePriors compute_attribute_priors(const std::vector<SceneRecord>& dataset);

nlohmann::json priors_to_json(const AttributePriors& priors);
AttributePriors priors_from_json(const nlohmann::json& j);

enum class OrientationHeuristic : int { Random = 0, Majority = 1, Inward = 2 };

/// Baselines: random uniform draw; majority class for the category (global
/// fallback); inward = face from the instance centroid toward the room-region
/// centroid, snapped to the nearest axis direction (ties to smaller class).
int heuristic_orientation(OrientationHeuristic kind, const InstanceMask& mask,
                          const SemanticMap& map, const AttributePriors* stats, Rng* rng);

/// Category-mean vertical attributes; unseen categories fall back to the
/// global means.
std::pair<double, double> heuristic_vertical(int category, const AttributePriors& priors);

}  // namespace semscene
