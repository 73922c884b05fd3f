#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "semscene/diffusion.hpp"
#include "semscene/optim.hpp"

namespace semscene {

enum class TrainingMode : int { Mixed = 0, NoneOnly = 1, FloorOnly = 2, ArchOnly = 3 };

const char* to_string(TrainingMode mode);
TrainingMode training_mode_from_string(const std::string& s);

/// Condition kind a per-masktype mode trains on; Mixed has no fixed kind.
ConditionKind fixed_kind(TrainingMode mode);

struct DenoiserConfig {
  int K = 12;          // palette categories
  int room_types = kRoomTypeCount;
  int embed_dim = 16;  // d; must be even (sinusoidal pairs)
  int hidden_dim = 48;
  int radius = 2;      // neighborhood rho; window is (2*rho+1)^2

  int window() const { return (2 * radius + 1) * (2 * radius + 1); }
  void validate() const;
};

/// Per-pixel neighborhood perceptron estimating the x0 distribution.
///
/// Each window cell contributes its category embedding plus the arch-mask
/// class embedding at that cell; the room-type and condition-kind embeddings
/// are added to the sinusoidal timestep embedding, which feeds the hidden
/// layer through its own projection. A two-layer perceptron (tanh hidden,
/// softmax output) maps the concatenated window features to K logits.
class ReferenceDenoiser : public Denoiser {
 public:
  ReferenceDenoiser(DenoiserConfig cfg, TrainingMode mode, uint64_t palette_hash, Rng& init_rng);

  const DenoiserConfig& config() const { return cfg_; }
  TrainingMode mode() const { return mode_; }
  uint64_t palette_hash() const { return palette_hash_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const ParamLayout& layout() const { return layout_; }
  size_t param_count() const { return params_.size(); }

  bool supports(ConditionKind kind) const override;

  CategoricalGrid predict(const CategoricalGrid& xt_onehot, int t,
                          const ConditionSpec& cond) const override;

  /// Activations cached by forward() for the matching backward() call.
  struct Forward {
    int H = 0, W = 0, t = 0;
    int room_type = 0;
    int kind_index = 0;
    std::vector<uint8_t> xt_cats;
    std::vector<uint8_t> mask_cells;
    std::vector<double> time_vec;  // sinusoidal + room + kind embeddings
    std::vector<double> hidden;    // P x h, post-tanh
    CategoricalGrid xhat0;
  };

  /// Index-map forward pass (one-hot inputs argmax to these categories).
  Forward forward(const std::vector<uint8_t>& xt_cats, int H, int W, int t,
                  const ConditionSpec& cond) const;

  /// Accumulates parameter gradients for dL/dxhat0 (gradient with respect to
  /// the softmax output) into grad, which must hold param_count() entries.
  void backward(const Forward& fwd, const CategoricalGrid& dL_dxhat0,
                std::span<double> grad) const;

 private:
  DenoiserConfig cfg_;
  TrainingMode mode_;
  uint64_t palette_hash_ = 0;
  ParamLayout layout_;
  std::vector<double> params_;
  size_t off_embed_cat_ = 0, off_embed_mask_ = 0, off_embed_room_ = 0, off_embed_cond_ = 0;
  size_t off_w1_spatial_ = 0, off_w1_time_ = 0, off_b1_ = 0, off_w2_ = 0, off_b2_ = 0;

  friend struct DenoiserCheckpoint;
  std::vector<double> make_time_vec(int t, int room_type, int kind_index) const;
};

struct MdmLoss {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d params, empty when not requested
};

/// L_MDM at one (x0, t, condition) draw: samples x_t from the forward
/// marginal, then for t >= 2 the pixel-mean KL between the ground-truth
/// posterior and the predicted posterior; for t = 1 the pixel-mean NLL of
/// x0 under xhat0.
MdmLoss loss_mdm(const ReferenceDenoiser& denoiser, const SemanticMap& x0, int t,
                 const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng,
                 bool with_grad = true);

/// Same computation, accumulating gradients into an external buffer
/// (batch training); returns the loss.
double loss_mdm_accumulate(const ReferenceDenoiser& denoiser, const SemanticMap& x0, int t,
                           const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng,
                           std::span<double> grad_acc);

/// Loss value only, for any denoiser implementation (oracle checks).
double mdm_loss_value(const Denoiser& denoiser, const SemanticMap& x0, int t,
                      const ConditionSpec& cond, const NoiseSchedule& sched, Rng& rng);

inline constexpr int kDenoiserCheckpointVersion = 1;

void save_denoiser(const std::filesystem::path& path, const ReferenceDenoiser& model,
                   const NoiseSchedule& sched);
std::pair<ReferenceDenoiser, NoiseSchedule> load_denoiser(const std::filesystem::path& path);

}  // namespace semscene
