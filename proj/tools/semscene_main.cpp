// semscene: dataset synthesis, diffusion/APM training, generation,
// extraction, assembly, evaluation, and rendering in one CLI.

#include <CLI11.hpp>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "semscene/commands.hpp"

namespace {

using nlohmann::json;
using namespace semscene;

// Exit codes: 0 ok, 2 config error, 3 data error, 4 checkpoint/mode mismatch.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCheckpoint = 4;

/// Config file values become flag defaults; explicit flags win.
struct ConfigView {
  json values = json::object();

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!values.contains(key)) return fallback;
    return values.at(key).get<T>();
  }
};

ConfigView load_config_arg(int argc, char** argv) {
  ConfigView view;
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") {
      view.values = load_json_file(argv[i + 1]);
      if (!view.values.is_object()) throw ConfigError("config file must hold a JSON object");
    }
  }
  return view;
}

GrammarConfig grammar_from(const ConfigView& cfg) {
  GrammarConfig g;
  g.canvas = cfg.get("grid", g.canvas);
  g.scale = cfg.get("scale", g.scale);
  g.palette_preset = cfg.get<std::string>("palette", g.palette_preset);
  g.l_shape_prob = cfg.get("l_shape_prob", g.l_shape_prob);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    ConfigView cfg = load_config_arg(argc, argv);

    CLI::App app{"semantic-map scene synthesis toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with flag defaults");

    // synth
    SynthArgs synth;
    synth.dataset.grammar = grammar_from(cfg);
    synth.dataset.scenes = cfg.get("scenes", synth.dataset.scenes);
    synth.dataset.seed = cfg.get("seed", synth.dataset.seed);
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset");
    c_synth->add_option("--out", synth.out, "output dataset directory")->required();
    c_synth->add_option("--scenes", synth.dataset.scenes, "scene count");
    c_synth->add_option("--seed", synth.dataset.seed, "dataset seed");
    c_synth->add_option("--grid", synth.dataset.grammar.canvas, "canvas size in pixels");
    c_synth->add_option("--scale", synth.dataset.grammar.scale, "meters per pixel");
    c_synth->add_option("--palette", synth.dataset.grammar.palette_preset, "palette preset");

    // train-denoiser
    TrainDenoiserArgs td;
    td.train.T = cfg.get("T", td.train.T);
    td.train.schedule = schedule_kind_from_string(
        cfg.get<std::string>("schedule", to_string(td.train.schedule)));
    td.train.mode =
        training_mode_from_string(cfg.get<std::string>("mode", to_string(td.train.mode)));
    td.train.steps = cfg.get("denoiser_steps", td.train.steps);
    td.train.batch_size = cfg.get("denoiser_batch", td.train.batch_size);
    td.train.lr = cfg.get("denoiser_lr", td.train.lr);
    td.train.seed = cfg.get("seed", td.train.seed);
    td.train.model.embed_dim = cfg.get("embed_dim", td.train.model.embed_dim);
    td.train.model.hidden_dim = cfg.get("hidden_dim", td.train.model.hidden_dim);
    td.train.model.radius = cfg.get("radius", td.train.model.radius);
    std::string td_mode = to_string(td.train.mode);
    std::string td_schedule = to_string(td.train.schedule);
    int td_limit = 0;
    auto* c_td = app.add_subcommand("train-denoiser", "train the layout diffusion model");
    c_td->add_option("--data", td.data, "dataset directory")->required();
    c_td->add_option("--out", td.out, "checkpoint output path")->required();
    c_td->add_option("--mode", td_mode, "mixed|none|floor|arch");
    c_td->add_option("-T,--steps-diffusion", td.train.T, "diffusion steps");
    c_td->add_option("--schedule", td_schedule, "cosine|linear");
    c_td->add_option("--steps", td.train.steps, "optimizer steps");
    c_td->add_option("--batch", td.train.batch_size, "batch size");
    c_td->add_option("--lr", td.train.lr, "learning rate");
    c_td->add_option("--seed", td.train.seed, "training seed");
    c_td->add_option("--limit", td_limit, "cap train scenes (smoke runs)");

    // train-apm
    TrainApmArgs ta;
    ta.train.steps = cfg.get("apm_steps", ta.train.steps);
    ta.train.batch_size = cfg.get("apm_batch", ta.train.batch_size);
    ta.train.lr = cfg.get("apm_lr", ta.train.lr);
    ta.train.weight_decay = cfg.get("apm_weight_decay", ta.train.weight_decay);
    ta.train.seed = cfg.get("seed", ta.train.seed);
    int ta_limit = 0;
    auto* c_ta = app.add_subcommand("train-apm", "train the attribute prediction model");
    c_ta->add_option("--data", ta.data, "dataset directory")->required();
    c_ta->add_option("--out", ta.out, "checkpoint output path")->required();
    c_ta->add_option("--priors-out", ta.priors_out, "attribute priors output path");
    c_ta->add_option("--steps", ta.train.steps, "optimizer steps");
    c_ta->add_option("--batch", ta.train.batch_size, "batch size");
    c_ta->add_option("--lr", ta.train.lr, "learning rate");
    c_ta->add_option("--weight-decay", ta.train.weight_decay, "decoupled weight decay");
    c_ta->add_option("--seed", ta.train.seed, "training seed");
    c_ta->add_option("--limit", ta_limit, "cap train scenes (smoke runs)");

    // generate
    GenerateArgs gen;
    gen.count = cfg.get("generate_count", gen.count);
    gen.seed = cfg.get("generate_seed", gen.seed);
    std::string gen_condition = cfg.get<std::string>("condition", "arch");
    std::string gen_mask_file;
    auto* c_gen = app.add_subcommand("generate", "sample semantic layouts from a checkpoint");
    c_gen->add_option("--ckpt", gen.checkpoint, "denoiser checkpoint")->required();
    c_gen->add_option("--data", gen.data, "dataset directory (masks + room types)")->required();
    c_gen->add_option("--out", gen.out, "output directory")->required();
    c_gen->add_option("--count", gen.count, "number of scenes");
    c_gen->add_option("--condition", gen_condition, "none|floor|arch");
    c_gen->add_option("--split", gen.split, "dataset split for masks");
    c_gen->add_option("--seed", gen.seed, "sampling seed");
    c_gen->add_option("--mask-file", gen_mask_file, "condition every sample on one mask file");

    // extract
    ExtractArgs ext;
    auto* c_ext = app.add_subcommand("extract", "extract instances from generated maps");
    c_ext->add_option("--in", ext.in, "generated-scene directory")->required();
    c_ext->add_option("--data", ext.data, "dataset directory (threshold source)")->required();
    c_ext->add_option("--out", ext.out, "output directory")->required();

    // assemble
    AssembleArgs asmb;
    std::string asmb_apm, asmb_priors;
    auto* c_asm = app.add_subcommand("assemble", "retrieve assets and build 3D scenes");
    c_asm->add_option("--in", asmb.in, "generated-scene directory")->required();
    c_asm->add_option("--extract", asmb.extract, "extraction-report directory")->required();
    c_asm->add_option("--data", asmb.data, "dataset directory (catalog source)")->required();
    c_asm->add_option("--out", asmb.out, "output directory")->required();
    c_asm->add_option("--apm", asmb_apm, "APM checkpoint (omit to use heuristics)");
    c_asm->add_option("--priors", asmb_priors, "attribute priors JSON")->required();
    c_asm->add_flag("--rescale", asmb.rescale_to_predicted,
                    "rescale retrieved assets to the predicted size");
    c_asm->add_flag("--obj", asmb.write_obj, "also write OBJ proxies");

    // evaluate
    EvaluateArgs ev;
    std::string ev_gen;
    auto* c_ev = app.add_subcommand("evaluate", "compute the metric report");
    c_ev->add_option("--scenes", ev.scenes, "assembled-scene directory")->required();
    c_ev->add_option("--data", ev.data, "dataset directory (ground truth)")->required();
    c_ev->add_option("--out", ev.out, "report output directory")->required();
    c_ev->add_option("--gen", ev_gen, "generated-scene directory for map-level metrics");

    // render
    RenderArgs render;
    render.palette = cfg.get<std::string>("palette", render.palette);
    auto* c_render = app.add_subcommand("render", "render a map or scene to PNG");
    c_render->add_option("--in", render.in, "map/scene JSON")->required();
    c_render->add_option("--out", render.out, "output PNG")->required();
    c_render->add_option("--palette", render.palette, "palette preset");

    CLI11_PARSE(app, argc, argv);

    if (c_synth->parsed()) {
      cmd_synth(synth);
    } else if (c_td->parsed()) {
      td.train.mode = training_mode_from_string(td_mode);
      td.train.schedule = schedule_kind_from_string(td_schedule);
      if (td_limit > 0) td.limit = td_limit;
      cmd_train_denoiser(td);
    } else if (c_ta->parsed()) {
      if (ta.priors_out.empty()) ta.priors_out = ta.out.string() + ".priors.json";
      if (ta_limit > 0) ta.limit = ta_limit;
      cmd_train_apm(ta);
    } else if (c_gen->parsed()) {
      gen.condition = condition_kind_from_string(gen_condition);
      if (!gen_mask_file.empty()) gen.mask_file = gen_mask_file;
      cmd_generate(gen);
    } else if (c_ext->parsed()) {
      cmd_extract(ext);
    } else if (c_asm->parsed()) {
      if (!asmb_apm.empty()) asmb.apm_checkpoint = asmb_apm;
      asmb.priors = asmb_priors;
      cmd_assemble(asmb);
    } else if (c_ev->parsed()) {
      if (!ev_gen.empty()) ev.gen = ev_gen;
      cmd_evaluate(ev);
    } else if (c_render->parsed()) {
      cmd_render(render);
    }
    return 0;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return kExitCheckpoint;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitData;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
