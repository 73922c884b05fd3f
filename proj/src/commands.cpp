#include "semscene/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "semscene/png_io.hpp"

namespace semscene {

using nlohmann::json;

namespace {

constexpr int kGenSceneVersion = 1;

std::string scene_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%06d", i);
  return buf;
}

void stamp(const std::filesystem::path& dir, const json& resolved) {
  std::filesystem::create_directories(dir);
  save_json_file(dir / "resolved_config.json", resolved);
}

json checkpoint_run_stamp(uint64_t seed, const json& extra) {
  json j = extra;
  j["seed"] = seed;
  return j;
}

}  // namespace

void cmd_synth(const SynthArgs& args) {
  DatasetManifest manifest = build_dataset(args.out, args.dataset);
  json resolved = {{"command", "synth"},
                   {"seed", args.dataset.seed},
                   {"scenes", args.dataset.scenes},
                   {"grammar", args.dataset.grammar.to_json()},
                   {"ratios", {args.dataset.ratio_train, args.dataset.ratio_val,
                               args.dataset.ratio_test}}};
  stamp(args.out, resolved);
  (void)manifest;
}

void cmd_train_denoiser(const TrainDenoiserArgs& args) {
  DatasetManifest manifest = load_manifest(args.data);
  CategoryPalette palette = palette_preset(manifest.palette_preset);
  auto records = load_split(args.data, "train", args.limit);

  DenoiserTrainConfig cfg = args.train;
  cfg.model.K = palette.K();
  cfg.model.room_types = kRoomTypeCount;
  TrainedDenoiser trained = train_denoiser(records, cfg, palette.hash());

  std::filesystem::create_directories(args.out.parent_path().empty() ? "."
                                                                     : args.out.parent_path());
  save_denoiser(args.out, trained.model, trained.schedule);
  write_training_log_csv(args.out.string() + ".log.csv", trained.log);
  json resolved = {{"command", "train-denoiser"},
                   {"data", args.data.string()},
                   {"mode", to_string(cfg.mode)},
                   {"T", cfg.T},
                   {"schedule", to_string(cfg.schedule)},
                   {"steps", cfg.steps},
                   {"batch_size", cfg.batch_size},
                   {"lr", cfg.lr},
                   {"embed_dim", cfg.model.embed_dim},
                   {"hidden_dim", cfg.model.hidden_dim},
                   {"radius", cfg.model.radius}};
  save_json_file(args.out.string() + ".config.json",
                 checkpoint_run_stamp(cfg.seed, resolved));
}

void cmd_train_apm(const TrainApmArgs& args) {
  DatasetManifest manifest = load_manifest(args.data);
  CategoryPalette palette = palette_preset(manifest.palette_preset);
  auto records = load_split(args.data, "train", args.limit);

  ApmTrainConfig cfg = args.train;
  cfg.model.K = palette.K();
  TrainedApm trained = train_apm(records, cfg, palette.hash());
  save_apm(args.out, trained.model);

  AttributePriors priors = compute_attribute_priors(records);
  save_json_file(args.priors_out, priors_to_json(priors));

  json resolved = {{"command", "train-apm"},
                   {"data", args.data.string()},
                   {"steps", cfg.steps},
                   {"batch_size", cfg.batch_size},
                   {"lr", cfg.lr},
                   {"weight_decay", cfg.weight_decay},
                   {"grid_tokens", cfg.model.grid_tokens},
                   {"feat_dim", cfg.model.feat_dim},
                   {"trunk_dim", cfg.model.trunk_dim}};
  save_json_file(args.out.string() + ".config.json", checkpoint_run_stamp(cfg.seed, resolved));
}

void cmd_generate(const GenerateArgs& args) {
  auto [model, sched] = load_denoiser(args.checkpoint);
  DatasetManifest manifest = load_manifest(args.data);
  CategoryPalette palette = palette_preset(manifest.palette_preset);
  if (palette.hash() != model.palette_hash())
    throw CheckpointError("checkpoint palette does not match the dataset palette");
  if (!model.supports(args.condition))
    throw CheckpointError(std::string("checkpoint mode '") + to_string(model.mode()) +
                          "' does not support condition kind '" + to_string(args.condition) +
                          "'");

  std::vector<SceneRecord> sources;
  std::optional<ArchMask> fixed_mask;
  if (args.mask_file) {
    auto j = load_json_file(*args.mask_file);
    fixed_mask = arch_mask_from_json(j.contains("arch_mask") ? j.at("arch_mask") : j);
  } else {
    sources = load_split(args.data, args.split);
  }

  std::filesystem::create_directories(args.out);
  Rng base(args.seed);
  for (int i = 0; i < args.count; ++i) {
    Rng rng = base.derive(static_cast<uint64_t>(i) + 1);
    ConditionSpec cond;
    int source_index = -1;
    if (fixed_mask) {
      cond = make_condition(args.condition, *fixed_mask, i % kRoomTypeCount);
    } else {
      const SceneRecord& src = sources[i % sources.size()];
      source_index = i % static_cast<int>(sources.size());
      if (args.condition == ConditionKind::None) {
        ArchMask zero(manifest.grid, manifest.grid, 0);
        cond = make_condition(ConditionKind::None, zero, src.layout.room_type);
      } else {
        cond = make_condition(args.condition, src.arch, src.layout.room_type);
      }
    }
    SemanticMap map = sample_layout(model, cond, sched, rng, manifest.scale, model.config().K);

    json j;
    j["version"] = kGenSceneVersion;
    j["kind"] = "gen_scene";
    j["condition"] = to_string(cond.kind);
    j["room_type"] = to_string(static_cast<RoomType>(cond.room_type));
    j["map"] = map_to_json(map);
    j["condition_mask"] = arch_mask_to_json(cond.mask);
    j["source_index"] = source_index;
    save_json_file(args.out / (scene_name(i) + ".json"), j);
    write_map_png(args.out / (scene_name(i) + ".png"), map, palette);
  }
  json resolved = {{"command", "generate"},
                   {"checkpoint", args.checkpoint.string()},
                   {"condition", to_string(args.condition)},
                   {"count", args.count},
                   {"split", args.split},
                   {"seed", args.seed}};
  stamp(args.out, resolved);
}

std::vector<GeneratedScene> load_generated(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json" &&
        entry.path().filename().string().starts_with("scene_"))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no generated scenes in " + dir.string());
  std::vector<GeneratedScene> scenes;
  for (const auto& f : files) {
    json j = load_json_file(f);
    if (j.value("kind", "") != "gen_scene")
      throw DataError(f.string() + " is not a generated-scene record");
    GeneratedScene g;
    g.map = map_from_json(j.at("map"));
    g.condition.kind = condition_kind_from_string(j.at("condition").get<std::string>());
    g.condition.mask = arch_mask_from_json(j.at("condition_mask"));
    g.condition.room_type =
        static_cast<int>(room_type_from_string(j.at("room_type").get<std::string>()));
    g.source_index = j.value("source_index", -1);
    scenes.push_back(std::move(g));
  }
  return scenes;
}

double object_pixels_on_void_pct(const std::vector<GeneratedScene>& scenes) {
  long object_pixels = 0, on_void = 0;
  for (const auto& g : scenes) {
    if (g.condition.kind == ConditionKind::None) continue;
    for (size_t p = 0; p < g.map.cells.size(); ++p) {
      if (g.map.cells[p] < kFirstObjectCategory) continue;
      ++object_pixels;
      if (g.condition.mask.cells[p] == kVoid) ++on_void;
    }
  }
  return object_pixels == 0 ? 0.0 : 100.0 * on_void / static_cast<double>(object_pixels);
}

void cmd_extract(const ExtractArgs& args) {
  auto train = load_split(args.data, "train");
  ThresholdTable thresholds = compute_thresholds(train);
  auto scenes = load_generated(args.in);

  std::filesystem::create_directories(args.out);
  save_json_file(args.out / "thresholds.json", thresholds_to_json(thresholds));
  for (size_t i = 0; i < scenes.size(); ++i) {
    auto instances = extract_instances(scenes[i].map, thresholds);
    save_json_file(args.out / ("extract_" + scene_name(static_cast<int>(i)).substr(6) + ".json"),
                   extraction_report_to_json(scenes[i].map, instances));
  }
  json resolved = {{"command", "extract"},
                   {"in", args.in.string()},
                   {"data", args.data.string()},
                   {"scenes", scenes.size()}};
  stamp(args.out, resolved);
}

namespace {

std::vector<ExtractedInstance> instances_from_report(const json& j) {
  std::vector<ExtractedInstance> out;
  int H = j.at("H").get<int>(), W = j.at("W").get<int>();
  for (const auto& ji : j.at("instances")) {
    ExtractedInstance inst;
    inst.mask.height = H;
    inst.mask.width = W;
    inst.mask.category = ji.at("category").get<int>();
    inst.mask.cells.assign(static_cast<size_t>(H) * W, 0);
    inst.mask.min_row = H;
    inst.mask.min_col = W;
    for (const auto& run : ji.at("mask_rle")) {
      size_t start = run.at(0).get<size_t>();
      size_t len = run.at(1).get<size_t>();
      for (size_t p = start; p < start + len; ++p) {
        inst.mask.cells[p] = 1;
        int r = static_cast<int>(p) / W, c = static_cast<int>(p) % W;
        inst.mask.min_row = std::min(inst.mask.min_row, r);
        inst.mask.max_row = std::max(inst.mask.max_row, r);
        inst.mask.min_col = std::min(inst.mask.min_col, c);
        inst.mask.max_col = std::max(inst.mask.max_col, c);
      }
    }
    inst.mask.pixel_count = ji.at("pixels").get<int>();
    inst.center = {ji.at("center").at(0).get<double>(), ji.at("center").at(1).get<double>()};
    inst.footprint_w = ji.at("footprint").at(0).get<double>();
    inst.footprint_l = ji.at("footprint").at(1).get<double>();
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

void cmd_assemble(const AssembleArgs& args) {
  auto scenes = load_generated(args.in);
  auto train = load_split(args.data, "train");
  DatasetManifest manifest = load_manifest(args.data);
  CategoryPalette palette = palette_preset(manifest.palette_preset);
  AssetCatalog catalog = catalog_from_records(train, palette);
  AttributePriors priors = priors_from_json(load_json_file(args.priors));

  std::optional<ApmModel> apm;
  if (args.apm_checkpoint) {
    apm = load_apm(*args.apm_checkpoint);
    if (apm->palette_hash() != palette.hash())
      throw CheckpointError("APM checkpoint palette does not match the dataset palette");
  }

  std::filesystem::create_directories(args.out);
  for (size_t i = 0; i < scenes.size(); ++i) {
    const auto& g = scenes[i];
    json report = load_json_file(
        args.extract / ("extract_" + scene_name(static_cast<int>(i)).substr(6) + ".json"));
    auto instances = instances_from_report(report);

    std::vector<InstanceAttributes> attrs;
    attrs.reserve(instances.size());
    for (const auto& inst : instances) {
      InstanceAttributes a;
      if (apm) {
        AttributePrediction pred = apm->predict(g.map, inst.mask);
        a = {pred.s_y, pred.p_y, pred.orientation};
      } else {
        auto [sy, py] = heuristic_vertical(inst.mask.category, priors);
        a = {sy, py,
             heuristic_orientation(OrientationHeuristic::Inward, inst.mask, g.map, &priors,
                                   nullptr)};
      }
      attrs.push_back(a);
    }

    // Unconditional scenes take their architecture from the generated map.
    ArchMask arch = g.condition.kind == ConditionKind::None ? arch_mask_from_map(g.map)
                                                            : g.condition.mask;
    Scene3D scene = assemble_scene(instances, attrs, catalog, arch, g.map.scale,
                                   g.condition.room_type, {}, args.rescale_to_predicted);
    auto name = scene_name(static_cast<int>(i));
    export_scene_json(args.out / (name + ".json"), scene);
    if (args.write_obj) export_scene_obj(args.out / (name + ".obj"), scene);
  }
  json resolved = {{"command", "assemble"},
                   {"in", args.in.string()},
                   {"apm", args.apm_checkpoint ? args.apm_checkpoint->string() : "heuristic"},
                   {"rescale_to_predicted", args.rescale_to_predicted},
                   {"scenes", scenes.size()}};
  stamp(args.out, resolved);
}

std::map<int, CategoryHistogram> gt_histograms_by_type(const std::vector<SceneRecord>& records) {
  std::map<int, CategoryHistogram> out;
  for (const auto& rec : records)
    for (const auto& inst : rec.layout.instances) out[rec.layout.room_type].add(inst.category);
  return out;
}

void cmd_evaluate(const EvaluateArgs& args) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(args.scenes))
    if (entry.path().extension() == ".json" &&
        entry.path().filename().string().starts_with("scene_"))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no assembled scenes in " + args.scenes.string());
  std::vector<Scene3D> scenes;
  for (const auto& f : files) scenes.push_back(import_scene_json(f));

  auto train = load_split(args.data, "train");
  auto gt = gt_histograms_by_type(train);
  MetricReport report = evaluate_corpus(scenes, gt);

  std::filesystem::create_directories(args.out);
  json j = report_to_json(report);
  if (args.gen) {
    auto generated = load_generated(*args.gen);
    j["object_pixels_on_void_pct"] = object_pixels_on_void_pct(generated);
  }
  save_json_file(args.out / "report.json", j);
  write_report_csv(args.out / "report.csv", report);
  json resolved = {{"command", "evaluate"},
                   {"scenes", args.scenes.string()},
                   {"data", args.data.string()},
                   {"count", scenes.size()}};
  stamp(args.out, resolved);
}

void cmd_render(const RenderArgs& args) {
  CategoryPalette palette = palette_preset(args.palette);
  json j = load_json_file(args.in);

  if (j.contains("map")) {
    // Dataset record or generated scene: render its semantic map.
    write_map_png(args.out, map_from_json(j.at("map")), palette);
    return;
  }
  if (j.contains("K") && j.contains("cells")) {
    write_map_png(args.out, map_from_json(j), palette);
    return;
  }
  if (j.contains("room") && j.contains("placements")) {
    // Assembled scene: top-down footprint raster at 2 cm per pixel.
    Scene3D scene = scene_from_json(j);
    const double cell = 0.02;
    double x1 = 0.0, z1 = 0.0;
    for (const auto& p : scene.room.floor_polygon) {
      x1 = std::max(x1, p.x);
      z1 = std::max(z1, p.z);
    }
    int W = std::max(1, static_cast<int>(std::ceil(x1 / cell))) + 2;
    int H = std::max(1, static_cast<int>(std::ceil(z1 / cell))) + 2;
    std::vector<uint8_t> rgb(static_cast<size_t>(H) * W * 3, 0);
    auto paint = [&](int r, int c, const Rgb& color) {
      if (r < 0 || r >= H || c < 0 || c >= W) return;
      size_t p = (static_cast<size_t>(r) * W + c) * 3;
      rgb[p] = color[0];
      rgb[p + 1] = color[1];
      rgb[p + 2] = color[2];
    };
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c)
        if (point_in_polygon({(c + 0.5) * cell, (r + 0.5) * cell}, scene.room.floor_polygon,
                             1e-9))
          paint(r, c, palette.color(kFloor));
    for (const auto& p : scene.placements) {
      Point2 ext = rotated_extents(p.placed_size.x, p.placed_size.z, p.orientation);
      int c0 = static_cast<int>(std::floor((p.position.x - ext.x / 2) / cell));
      int c1 = static_cast<int>(std::ceil((p.position.x + ext.x / 2) / cell));
      int r0 = static_cast<int>(std::floor((p.position.z - ext.z / 2) / cell));
      int r1 = static_cast<int>(std::ceil((p.position.z + ext.z / 2) / cell));
      const Rgb& color = palette.color(std::min(p.category, palette.K() - 1));
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) paint(r, c, color);
    }
    write_rgb_png(args.out, H, W, rgb);
    return;
  }
  throw DataError("render: unrecognized input format " + args.in.string());
}

}  // namespace semscene
