#pragma once

#include <optional>

#include "semscene/apm.hpp"
#include "semscene/assembly.hpp"
#include "semscene/metrics.hpp"
#include "semscene/synth.hpp"
#include "semscene/train.hpp"

namespace semscene {

/// Pipeline stages behind the CLI. Each function is idempotent given
/// identical inputs and seed and stamps its resolved configuration into the
/// output location.

struct SynthArgs {
  std::filesystem::path out;
  BuildDatasetConfig dataset;
};
void cmd_synth(const SynthArgs& args);

struct TrainDenoiserArgs {
  std::filesystem::path data;
  std::filesystem::path out;  // checkpoint JSON path
  DenoiserTrainConfig train;
  std::optional<int> limit;  // cap on train scenes (smoke runs)
};
void cmd_train_denoiser(const TrainDenoiserArgs& args);

struct TrainApmArgs {
  std::filesystem::path data;
  std::filesystem::path out;         // checkpoint JSON path
  std::filesystem::path priors_out;  // attribute priors JSON
  ApmTrainConfig train;
  std::optional<int> limit;
};
void cmd_train_apm(const TrainApmArgs& args);

struct GenerateArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path data;  // masks and room types come from this dataset
  std::filesystem::path out;
  int count = 200;
  ConditionKind condition = ConditionKind::Arch;
  std::string split = "test";
  uint64_t seed = 7;
  std::optional<std::filesystem::path> mask_file;  // single-mask conditioning
};
void cmd_generate(const GenerateArgs& args);

struct ExtractArgs {
  std::filesystem::path in;    // generated-scene directory
  std::filesystem::path data;  // thresholds come from its train split
  std::filesystem::path out;
};
void cmd_extract(const ExtractArgs& args);

struct AssembleArgs {
  std::filesystem::path in;       // generated-scene directory
  std::filesystem::path extract;  // extraction-report directory
  std::filesystem::path data;     // catalog source (train split)
  std::filesystem::path out;
  std::optional<std::filesystem::path> apm_checkpoint;  // absent => heuristics
  std::filesystem::path priors;   // required for heuristic attributes
  bool rescale_to_predicted = false;
  bool write_obj = false;
};
void cmd_assemble(const AssembleArgs& args);

struct EvaluateArgs {
  std::filesystem::path scenes;  // assembled-scene directory
  std::filesystem::path data;    // ground-truth histograms (train split)
  std::filesystem::path out;
  std::optional<std::filesystem::path> gen;  // adds map-level metrics
};
void cmd_evaluate(const EvaluateArgs& args);

struct RenderArgs {
  std::filesystem::path in;  // map JSON, dataset scene JSON, or scene JSON
  std::filesystem::path out;
  std::string palette = "desk";
};
void cmd_render(const RenderArgs& args);

// Shared helpers (also used by tests and the acceptance suite).

struct GeneratedScene {
  SemanticMap map;
  ConditionSpec condition;
  int source_index = 0;
};

std::vector<GeneratedScene> load_generated(const std::filesystem::path& dir);

/// Fraction (percent) of object-category pixels that land on the condition
/// mask's void region; skips scenes without a mask condition.
double object_pixels_on_void_pct(const std::vector<GeneratedScene>& scenes);

std::map<int, CategoryHistogram> gt_histograms_by_type(const std::vector<SceneRecord>& records);

}  // namespace semscene
