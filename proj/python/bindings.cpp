#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "semscene/commands.hpp"

namespace py = pybind11;
using namespace semscene;

namespace {

SemanticMap map_from_array(py::array_t<uint8_t, py::array::c_style | py::array::forcecast> arr,
                           double scale, int K) {
  if (arr.ndim() != 2) throw ShapeError("semantic map array must be 2-D");
  SemanticMap map(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), scale, K);
  std::copy(arr.data(), arr.data() + arr.size(), map.cells.begin());
  map.validate();
  return map;
}

py::array_t<uint8_t> map_to_array(const SemanticMap& map) {
  py::array_t<uint8_t> arr({map.height, map.width});
  std::copy(map.cells.begin(), map.cells.end(), arr.mutable_data());
  return arr;
}

CategoricalGrid grid_from_array(
    py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  if (arr.ndim() != 3) throw ShapeError("categorical grid array must be 3-D (H, W, K)");
  CategoricalGrid grid(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                       static_cast<int>(arr.shape(2)));
  std::copy(arr.data(), arr.data() + arr.size(), grid.values.begin());
  return grid;
}

py::array_t<double> grid_to_array(const CategoricalGrid& grid) {
  py::array_t<double> arr({grid.height, grid.width, grid.K});
  std::copy(grid.values.begin(), grid.values.end(), arr.mutable_data());
  return arr;
}

py::dict report_to_dict(const MetricReport& report) {
  auto row_dict = [](const MetricRow& row) {
    py::dict d;
    d["label"] = row.label;
    d["scenes"] = row.scenes;
    d["ckl_x100"] = row.ckl_x100;
    d["oob_scene_pct"] = row.oob_scene_pct;
    d["oob_object_pct"] = row.oob_object_pct;
    d["collision_pct"] = row.collision_pct;
    d["nav_pct"] = row.nav_pct;
    d["mean_objects"] = row.mean_objects;
    return d;
  };
  py::dict d;
  py::list rows;
  for (const auto& row : report.per_type) rows.append(row_dict(row));
  d["per_type"] = rows;
  d["overall"] = row_dict(report.overall);
  d["pooled_ckl_x100"] = report.pooled_ckl_x100;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semantic-map scene synthesis: diffusion kernels, extraction, "
            "metrics, and the file-based pipeline.";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<CheckpointError>(m, "CheckpointError");

  py::class_<NoiseSchedule>(m, "NoiseSchedule")
      .def_readonly("T", &NoiseSchedule::T)
      .def_property_readonly("beta", [](const NoiseSchedule& s) { return s.beta; })
      .def_property_readonly("alpha", [](const NoiseSchedule& s) { return s.alpha; })
      .def_property_readonly("alpha_bar", [](const NoiseSchedule& s) { return s.alpha_bar; });

  m.def("build_schedule",
        [](int T, const std::string& kind) {
          return build_schedule(T, schedule_kind_from_string(kind));
        },
        py::arg("T"), py::arg("kind") = "cosine");

  m.def("palette_names", [](const std::string& preset) {
    return palette_preset(preset).names();
  });
  m.def("palette_colors", [](const std::string& preset) {
    CategoryPalette p = palette_preset(preset);
    py::array_t<uint8_t> arr({p.K(), 3});
    auto* data = arr.mutable_data();
    for (int i = 0; i < p.K(); ++i)
      for (int j = 0; j < 3; ++j) data[i * 3 + j] = p.color(i)[j];
    return arr;
  });

  m.def("one_hot",
        [](py::array_t<uint8_t, py::array::c_style | py::array::forcecast> map_arr, int K) {
          return grid_to_array(one_hot(map_from_array(map_arr, 1.0, K), K));
        },
        py::arg("map"), py::arg("K"));

  m.def("argmax_map", [](py::array arr) {
    auto grid = grid_from_array(arr);
    py::array_t<uint8_t> out({grid.height, grid.width});
    auto cats = grid.argmax();
    std::copy(cats.begin(), cats.end(), out.mutable_data());
    return out;
  });

  m.def("forward_marginal",
        [](py::array x0, int t, const NoiseSchedule& sched) {
          return grid_to_array(forward_marginal(grid_from_array(x0), t, sched));
        },
        py::arg("x0_onehot"), py::arg("t"), py::arg("schedule"));

  m.def("posterior",
        [](py::array xt, py::array x0_dist, int t, const NoiseSchedule& sched) {
          return grid_to_array(posterior(grid_from_array(xt), grid_from_array(x0_dist), t, sched));
        },
        py::arg("xt_onehot"), py::arg("x0_dist"), py::arg("t"), py::arg("schedule"));

  m.def("sample_from",
        [](py::array grid, uint64_t seed) {
          Rng rng(seed);
          return grid_to_array(sample_from(grid_from_array(grid), rng));
        },
        py::arg("grid"), py::arg("seed"));

  m.def("kl_categorical", [](std::vector<double> p, std::vector<double> q) {
    return kl_categorical(p, q);
  });

  m.def("connected_components",
        [](py::array_t<uint8_t, py::array::c_style | py::array::forcecast> map_arr, int K,
           int category) {
          SemanticMap map = map_from_array(map_arr, 1.0, K);
          py::list out;
          for (const auto& comp : connected_components(map, category)) {
            py::array_t<bool> mask({comp.height, comp.width});
            for (size_t i = 0; i < comp.cells.size(); ++i)
              mask.mutable_data()[i] = comp.cells[i] != 0;
            out.append(mask);
          }
          return out;
        },
        py::arg("map"), py::arg("K"), py::arg("category"));

  m.def("extract_instances",
        [](py::array_t<uint8_t, py::array::c_style | py::array::forcecast> map_arr, double scale,
           int K, std::map<int, double> ratios, double fallback) {
          SemanticMap map = map_from_array(map_arr, scale, K);
          ThresholdTable table;
          table.ratios = std::move(ratios);
          table.fallback = fallback;
          py::list out;
          for (const auto& inst : extract_instances(map, table)) {
            py::dict d;
            d["category"] = inst.mask.category;
            d["pixels"] = inst.mask.pixel_count;
            d["center"] = py::make_tuple(inst.center.x, inst.center.z);
            d["footprint"] = py::make_tuple(inst.footprint_w, inst.footprint_l);
            out.append(d);
          }
          return out;
        },
        py::arg("map"), py::arg("scale"), py::arg("K"), py::arg("ratios") = std::map<int, double>{},
        py::arg("fallback") = kFallbackThreshold);

  m.def("ckl", [](std::map<int, long> p_counts, std::map<int, long> q_counts) {
    CategoryHistogram p, q;
    p.counts = std::move(p_counts);
    q.counts = std::move(q_counts);
    return ckl(p, q);
  });

  m.def("scene_metrics", [](const std::filesystem::path& scene_json) {
    Scene3D scene = import_scene_json(scene_json);
    OobResult o = oob(scene);
    py::dict d;
    d["objects"] = scene.placements.size();
    d["oob_object_ratio"] = o.oob_object_ratio;
    d["oob_scene"] = o.scene_flag;
    d["collision_pct"] = collision_rate(scene);
    d["nav_pct"] = navigability(scene);
    return d;
  });

  // File-based pipeline stages.
  m.def("build_dataset",
        [](const std::filesystem::path& out, int scenes, uint64_t seed, int grid, double scale) {
          BuildDatasetConfig cfg;
          cfg.scenes = scenes;
          cfg.seed = seed;
          cfg.grammar.canvas = grid;
          cfg.grammar.scale = scale;
          DatasetManifest manifest = build_dataset(out, cfg);
          py::dict d;
          d["train"] = manifest.count_train;
          d["val"] = manifest.count_val;
          d["test"] = manifest.count_test;
          d["palette_hash"] = manifest.palette_hash;
          return d;
        },
        py::arg("out"), py::arg("scenes"), py::arg("seed") = 1, py::arg("grid") = 32,
        py::arg("scale") = 0.125);

  m.def("train_denoiser",
        [](const std::filesystem::path& data, const std::filesystem::path& out,
           const std::string& mode, int T, int steps, int batch, double lr, uint64_t seed,
           int limit) {
          TrainDenoiserArgs args;
          args.data = data;
          args.out = out;
          args.train.mode = training_mode_from_string(mode);
          args.train.T = T;
          args.train.steps = steps;
          args.train.batch_size = batch;
          args.train.lr = lr;
          args.train.seed = seed;
          if (limit > 0) args.limit = limit;
          cmd_train_denoiser(args);
        },
        py::arg("data"), py::arg("out"), py::arg("mode") = "mixed", py::arg("T") = 100,
        py::arg("steps") = 4000, py::arg("batch") = 8, py::arg("lr") = 2e-3, py::arg("seed") = 1,
        py::arg("limit") = 0);

  m.def("train_apm",
        [](const std::filesystem::path& data, const std::filesystem::path& out,
           const std::filesystem::path& priors_out, int steps, int batch, double lr,
           uint64_t seed, int limit) {
          TrainApmArgs args;
          args.data = data;
          args.out = out;
          args.priors_out = priors_out;
          args.train.steps = steps;
          args.train.batch_size = batch;
          args.train.lr = lr;
          args.train.seed = seed;
          if (limit > 0) args.limit = limit;
          cmd_train_apm(args);
        },
        py::arg("data"), py::arg("out"), py::arg("priors_out"), py::arg("steps") = 3000,
        py::arg("batch") = 16, py::arg("lr") = 1e-3, py::arg("seed") = 1, py::arg("limit") = 0);

  m.def("generate",
        [](const std::filesystem::path& ckpt, const std::filesystem::path& data,
           const std::filesystem::path& out, int count, const std::string& condition,
           uint64_t seed, const std::string& split) {
          GenerateArgs args;
          args.checkpoint = ckpt;
          args.data = data;
          args.out = out;
          args.count = count;
          args.condition = condition_kind_from_string(condition);
          args.seed = seed;
          args.split = split;
          cmd_generate(args);
        },
        py::arg("ckpt"), py::arg("data"), py::arg("out"), py::arg("count"),
        py::arg("condition") = "arch", py::arg("seed") = 7, py::arg("split") = "test");

  m.def("extract",
        [](const std::filesystem::path& in, const std::filesystem::path& data,
           const std::filesystem::path& out) {
          cmd_extract({in, data, out});
        });

  m.def("assemble",
        [](const std::filesystem::path& in, const std::filesystem::path& extract,
           const std::filesystem::path& data, const std::filesystem::path& out,
           const std::filesystem::path& priors, const std::string& apm_ckpt) {
          AssembleArgs args;
          args.in = in;
          args.extract = extract;
          args.data = data;
          args.out = out;
          args.priors = priors;
          if (!apm_ckpt.empty()) args.apm_checkpoint = apm_ckpt;
          cmd_assemble(args);
        },
        py::arg("in_dir"), py::arg("extract"), py::arg("data"), py::arg("out"), py::arg("priors"),
        py::arg("apm_ckpt") = "");

  m.def("evaluate",
        [](const std::filesystem::path& scenes, const std::filesystem::path& data,
           const std::filesystem::path& out, const std::string& gen) {
          EvaluateArgs args;
          args.scenes = scenes;
          args.data = data;
          args.out = out;
          if (!gen.empty()) args.gen = gen;
          cmd_evaluate(args);
          nlohmann::json j = load_json_file(out / "report.json");
          py::dict d;
          d["pooled_ckl_x100"] = j.at("pooled_ckl_x100").get<double>();
          d["overall_oob_object_pct"] = j.at("overall").at("oob_object_pct").get<double>();
          d["overall_collision_pct"] = j.at("overall").at("collision_pct").get<double>();
          d["overall_nav_pct"] = j.at("overall").at("nav_pct").get<double>();
          if (j.contains("object_pixels_on_void_pct"))
            d["object_pixels_on_void_pct"] = j.at("object_pixels_on_void_pct").get<double>();
          return d;
        },
        py::arg("scenes"), py::arg("data"), py::arg("out"), py::arg("gen") = "");
}
