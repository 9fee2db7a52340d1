/* Copyright 2026 The Mono3D Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "mono3d/errors.h"
#include "mono3d/kitti_io.h"
#include "mono3d/maps_io.h"
#include "mono3d/rng.h"
#include "mono3d/unified_frame.h"

namespace mono3d::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// in index order is rethrown after all workers finish.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Sorted stems of regular files with extension `ext` in `dir`.
std::vector<std::string> list_stems(const fs::path& dir,
                                    const std::string& ext) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
  const fs::path probe = dir / ".mono3d_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

void write_json(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

double rate(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassRegistry registry_of(const RunConfig& config) {
  return ClassRegistry(config.classes);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

void RunConfig::validate() const {
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  codec.validate();
  pseudo.validate();
  eval.validate();
  scene.validate();
  ClassRegistry check(classes);
  if (image_width <= 0 || image_height <= 0) {
    throw ConfigError("image size must be positive");
  }
  if (suite != "kitti" && suite != "cityscapes") {
    throw ConfigError("unknown suite: " + suite);
  }
}

json RunConfig::to_json() const {
  json thresholds = json::object();
  for (const auto& [cls, t] : eval.iou_thresholds) thresholds[cls] = t;
  return {
      {"seed", seed},
      {"stride", codec.stride},
      {"fx0", codec.fx0},
      {"top_k", codec.top_k},
      {"score_threshold", codec.score_threshold},
      {"min_overlap", codec.min_overlap},
      {"eps", pseudo.eps},
      {"low_threshold", pseudo.low_score_threshold},
      {"classes", classes},
      {"image_width", image_width},
      {"image_height", image_height},
      {"iou_thresholds", thresholds},
      {"default_iou_threshold", eval.default_iou_threshold},
      {"cityscapes",
       {{"iou_threshold", cityscapes.iou_threshold},
        {"bevcd_max_distance", cityscapes.bevcd_max_distance}}},
      {"scene",
       {{"min_objects", scene.min_objects},
        {"max_objects", scene.max_objects},
        {"min_depth", scene.min_depth},
        {"max_depth", scene.max_depth},
        {"min_fx", scene.min_fx},
        {"max_fx", scene.max_fx}}},
  };
}

void apply_config(RunConfig& config, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "jobs") {
        config.jobs = value.get<int>();
      } else if (key == "seed") {
        config.seed = value.get<uint64_t>();
      } else if (key == "stride") {
        config.codec.stride = value.get<int>();
      } else if (key == "fx0") {
        config.codec.fx0 = value.get<double>();
      } else if (key == "top_k") {
        config.codec.top_k = value.get<int>();
      } else if (key == "score_threshold") {
        config.codec.score_threshold = value.get<double>();
      } else if (key == "min_overlap") {
        config.codec.min_overlap = value.get<double>();
      } else if (key == "eps") {
        config.pseudo.eps = value.get<double>();
      } else if (key == "low_threshold") {
        config.pseudo.low_score_threshold = value.get<double>();
      } else if (key == "classes") {
        config.classes = value.get<std::vector<std::string>>();
      } else if (key == "image_width") {
        config.image_width = value.get<int>();
      } else if (key == "image_height") {
        config.image_height = value.get<int>();
      } else if (key == "suite") {
        config.suite = value.get<std::string>();
      } else if (key == "format") {
        config.format = parse_report_format(value.get<std::string>());
      } else if (key == "iou_thresholds") {
        for (const auto& [cls, t] : value.items()) {
          config.eval.iou_thresholds[cls] = t.get<std::array<double, 3>>();
        }
      } else if (key == "default_iou_threshold") {
        config.eval.default_iou_threshold = value.get<double>();
      } else if (key == "cityscapes") {
        for (const auto& [k, v] : value.items()) {
          if (k == "iou_threshold") {
            config.cityscapes.iou_threshold = v.get<double>();
          } else if (k == "bevcd_max_distance") {
            config.cityscapes.bevcd_max_distance = v.get<double>();
          } else {
            throw ConfigError("unknown cityscapes key: " + k);
          }
        }
      } else if (key == "scene") {
        for (const auto& [k, v] : value.items()) {
          if (k == "min_objects") {
            config.scene.min_objects = v.get<int>();
          } else if (k == "max_objects") {
            config.scene.max_objects = v.get<int>();
          } else if (k == "min_depth") {
            config.scene.min_depth = v.get<double>();
          } else if (k == "max_depth") {
            config.scene.max_depth = v.get<double>();
          } else if (k == "min_fx") {
            config.scene.min_fx = v.get<double>();
          } else if (k == "max_fx") {
            config.scene.max_fx = v.get<double>();
          } else {
            throw ConfigError("unknown scene key: " + k);
          }
        }
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// encode

int cmd_encode(const RunConfig& config, const fs::path& labels_dir,
               const fs::path& calib_dir, const fs::path& out_dir) {
  config.validate();
  const ClassRegistry registry = registry_of(config);
  const std::vector<std::string> ids = list_stems(labels_dir, ".txt");
  if (!fs::is_directory(calib_dir)) {
    throw IoError("not a directory: " + calib_dir.string());
  }
  prepare_out_dir(out_dir);

  struct FrameOut {
    std::optional<DenseDetectionMaps> maps;
    CameraIntrinsics camera;
    int objects = 0;
    int ignored = 0;
    std::vector<int> skipped;
    std::string error;
  };
  std::vector<FrameOut> outs(ids.size());
  parallel_for(static_cast<int>(ids.size()), config.jobs, [&](int i) {
    FrameOut& out = outs[i];
    try {
      const auto anns =
          parse_kitti_labels(read_text_file(labels_dir / (ids[i] + ".txt")));
      out.camera =
          parse_kitti_calib(read_text_file(calib_dir / (ids[i] + ".txt")),
                            config.image_width, config.image_height);
      std::vector<SceneObject> objects;
      for (const ObjectAnnotation& ann : anns) {
        const auto cls = registry.find(ann.type);
        if (!cls || !ann.box3d) {
          ++out.ignored;
          continue;
        }
        objects.push_back({*cls, *ann.box3d});
      }
      out.objects = static_cast<int>(objects.size());
      EncodeResult r =
          encode_frame(objects, out.camera, registry.names(), config.codec);
      out.maps = std::move(r.maps);
      out.skipped = std::move(r.skipped);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  json frames = json::array();
  json errors = json::array();
  int total_objects = 0;
  int total_skipped = 0;
  int total_ignored = 0;
  for (size_t i = 0; i < ids.size(); ++i) {
    const FrameOut& out = outs[i];
    if (!out.error.empty()) {
      spdlog::error("frame {}: {}", ids[i], out.error);
      errors.push_back({{"frame_id", ids[i]}, {"message", out.error}});
      continue;
    }
    save_maps(out_dir / ids[i], *out.maps,
              {{"frame_id", ids[i]},
               {"camera", camera_to_json(out.camera)},
               {"config", config.to_json()}});
    frames.push_back({{"frame_id", ids[i]},
                      {"objects", out.objects},
                      {"encoded", out.objects -
                                      static_cast<int>(out.skipped.size())},
                      {"skipped_objects", out.skipped},
                      {"ignored_annotations", out.ignored}});
    total_objects += out.objects;
    total_skipped += static_cast<int>(out.skipped.size());
    total_ignored += out.ignored;
  }
  write_json(out_dir / "summary.json",
             {{"config", config.to_json()},
              {"frames", frames},
              {"errors", errors},
              {"totals",
               {{"frames", static_cast<int>(ids.size())},
                {"frames_written", static_cast<int>(frames.size())},
                {"objects", total_objects},
                {"skipped_objects", total_skipped},
                {"ignored_annotations", total_ignored}}}});
  spdlog::info("encoded {} of {} frames", frames.size(), ids.size());
  return errors.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// pseudo-label

int cmd_pseudo_label(const RunConfig& config, const fs::path& maps_dir,
                     const fs::path& labels_dir, const fs::path& out_dir) {
  config.validate();
  const std::vector<std::string> map_ids = list_stems(maps_dir, ".mddm");
  const std::vector<std::string> label_ids = list_stems(labels_dir, ".txt");
  prepare_out_dir(out_dir);

  json warnings = json::array();
  if (label_ids.empty()) {
    const std::string msg = "no label files in " + labels_dir.string();
    spdlog::warn("{}", msg);
    warnings.push_back(msg);
  }
  std::vector<std::string> ids;
  std::vector<std::string> maps_only;
  std::vector<std::string> labels_only;
  std::set_intersection(map_ids.begin(), map_ids.end(), label_ids.begin(),
                        label_ids.end(), std::back_inserter(ids));
  std::set_difference(map_ids.begin(), map_ids.end(), label_ids.begin(),
                      label_ids.end(), std::back_inserter(maps_only));
  std::set_difference(label_ids.begin(), label_ids.end(), map_ids.begin(),
                      map_ids.end(), std::back_inserter(labels_only));
  for (const auto& id : maps_only) {
    spdlog::warn("frame {}: maps without labels, skipped", id);
  }
  for (const auto& id : labels_only) {
    spdlog::warn("frame {}: labels without maps, skipped", id);
  }

  struct FrameOut {
    std::string lines;
    json report;
    int gts = 0;
    int decoded = 0;
    int matched = 0;
    int removed = 0;
    int unmatched_gt = 0;
    int unmatched_pred = 0;
    std::string error;
  };
  std::vector<FrameOut> outs(ids.size());
  parallel_for(static_cast<int>(ids.size()), config.jobs, [&](int i) {
    FrameOut& out = outs[i];
    try {
      const LoadedMaps loaded = load_maps(maps_dir / (ids[i] + ".mddm"));
      if (!loaded.sidecar.contains("camera")) {
        throw ParseError("sidecar has no camera", 0);
      }
      const CameraIntrinsics camera =
          camera_from_json(loaded.sidecar.at("camera"));
      const ClassRegistry registry(loaded.maps.class_names);
      std::vector<LabeledBox2D> gts;
      for (const ObjectAnnotation& ann : parse_kitti_labels(
               read_text_file(labels_dir / (ids[i] + ".txt")))) {
        if (const auto cls = registry.find(ann.type)) {
          gts.push_back({*cls, ann.box2d});
        }
      }
      CodecConfig codec = config.codec;
      codec.stride = loaded.maps.stride;
      const PseudoLabelResult r = generate_pseudo_labels(
          loaded.maps, gts, camera, config.pseudo, codec);
      for (const PseudoLabel& label : r.labels) {
        out.lines += pseudo_label_record(ids[i],
                                         registry.names()[label.class_id],
                                         label)
                         .dump() +
                     "\n";
      }
      out.report = r.report.to_json();
      out.report["frame_id"] = ids[i];
      out.gts = static_cast<int>(gts.size());
      out.decoded = static_cast<int>(r.detections.size());
      out.matched = static_cast<int>(r.report.matched.size());
      out.removed = static_cast<int>(r.report.removed_mis_detections.size());
      out.unmatched_gt = static_cast<int>(r.report.unmatched_gt.size());
      out.unmatched_pred = static_cast<int>(r.report.unmatched_pred.size());
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  std::string lines;
  json frames = json::array();
  json errors = json::array();
  int gts = 0, decoded = 0, matched = 0, removed = 0, unmatched_gt = 0,
      unmatched_pred = 0;
  for (size_t i = 0; i < ids.size(); ++i) {
    const FrameOut& out = outs[i];
    if (!out.error.empty()) {
      spdlog::error("frame {}: {}", ids[i], out.error);
      errors.push_back({{"frame_id", ids[i]}, {"message", out.error}});
      continue;
    }
    lines += out.lines;
    frames.push_back(out.report);
    gts += out.gts;
    decoded += out.decoded;
    matched += out.matched;
    removed += out.removed;
    unmatched_gt += out.unmatched_gt;
    unmatched_pred += out.unmatched_pred;
  }
  write_text_file(out_dir / "pseudo_labels.jsonl", lines);
  write_json(
      out_dir / "match_report.json",
      {{"config", config.to_json()},
       {"frames", frames},
       {"errors", errors},
       {"warnings", warnings},
       {"id_mismatches",
        {{"maps_only", maps_only}, {"labels_only", labels_only}}},
       {"totals",
        {{"frames", static_cast<int>(frames.size())},
         {"gt_boxes", gts},
         {"detections", decoded},
         {"matched", matched},
         {"removed_mis_detections", removed},
         {"unmatched_gt", unmatched_gt},
         {"unmatched_pred", unmatched_pred},
         {"match_rate", rate(matched, gts)},
         {"removal_rate", rate(removed, matched + removed)}}}});
  return errors.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// eval

namespace {

using FrameMap = std::map<std::string, UnifiedFrame>;

FrameMap load_frames(const fs::path& path) {
  FrameMap frames;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const std::string& id : list_stems(path, ".txt")) {
      UnifiedFrame f;
      f.frame_id = id;
      f.dataset = "kitti";
      try {
        f.annotations = parse_kitti_labels(read_text_file(path / (id + ".txt")));
      } catch (const ParseError& e) {
        throw ParseError(id + ".txt: " + e.what(), e.line());
      }
      frames.emplace(id, std::move(f));
    }
    return frames;
  }
  if (!fs::exists(path, ec)) throw IoError("no such file: " + path.string());
  for (UnifiedFrame& f : load_unified_frames(path)) {
    const std::string id = f.frame_id;
    if (!frames.emplace(id, std::move(f)).second) {
      throw ParseError("duplicate frame id " + id, 0);
    }
  }
  return frames;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

CityscapesReport components_report(const fs::path& path) {
  std::stringstream in(read_text_file(path));
  std::string line;
  int line_number = 0;
  CityscapesReport report;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (!fields.empty() && fields[0] == "class") continue;
    }
    if (fields.size() != 6) {
      throw ParseError("expected class,ap,bevcd,yawsim,prsim,sizesim",
                       line_number);
    }
    CityscapesRow row;
    row.cls = fields[0];
    double v[5];
    for (int k = 0; k < 5; ++k) {
      try {
        size_t used = 0;
        v[k] = std::stod(fields[k + 1], &used);
        if (used != fields[k + 1].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("bad number '" + fields[k + 1] + "'", line_number);
      }
    }
    row.ap = v[0];
    row.bevcd = v[1];
    row.yawsim = v[2];
    row.prsim = v[3];
    row.sizesim = v[4];
    try {
      row.ds = ds_score(row.ap, row.bevcd, row.yawsim, row.prsim, row.sizesim);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line_number);
    }
    report.rows.push_back(row);
  }
  return report;
}

void emit(const std::optional<fs::path>& out, const std::string& text) {
  if (out) {
    write_text_file(*out, text);
  } else {
    std::cout << text;
    std::cout.flush();
  }
}

}  // namespace

int cmd_eval(const RunConfig& config, const EvalInputs& inputs) {
  config.validate();
  if (inputs.components) {
    if (config.suite != "cityscapes") {
      throw ConfigError("--components requires --suite cityscapes");
    }
    emit(inputs.out, render(components_report(*inputs.components),
                            config.format));
    return kExitOk;
  }
  if (!inputs.predictions || !inputs.ground_truth) {
    throw ConfigError("eval needs predictions and ground truth");
  }
  const FrameMap preds = load_frames(*inputs.predictions);
  const FrameMap gts = load_frames(*inputs.ground_truth);

  std::vector<EvalFrame> frames;
  for (const auto& [id, gt] : gts) {
    EvalFrame f;
    f.frame_id = id;
    f.gts = gt.annotations;
    f.gt_level = gt.annotation_level;
    if (auto it = preds.find(id); it != preds.end()) {
      f.preds = it->second.annotations;
    }
    frames.push_back(std::move(f));
  }
  for (const auto& [id, unused] : preds) {
    if (!gts.count(id)) {
      spdlog::warn("frame {}: predictions without ground truth, ignored", id);
    }
  }

  if (config.suite == "kitti") {
    const KittiReport report = kitti_eval(frames, config.classes, config.eval);
    emit(inputs.out, render(report, config.format));
  } else {
    CityscapesReport report;
    for (const std::string& cls : config.classes) {
      report.rows.push_back(cityscapes_eval(frames, cls, config.cityscapes));
    }
    emit(inputs.out, render(report, config.format));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

namespace {

struct SimFrame {
  std::string frame_id;
  Scene scene;
  std::optional<DenseDetectionMaps> maps;
  std::string label_lines;
  json report;
  json stats;
  std::string gt_line;
  std::string labels_2d;
  int gts = 0;
  int decoded = 0;
  int matched = 0;
  int removed = 0;
  int unmatched_gt = 0;
  int unmatched_pred = 0;
  int recovered = 0;
  int true_rendered = 0;
  int corruptions = 0;
  int corruptions_excluded = 0;
  int labels = 0;
  int labels_from_true = 0;
  int rebuilt_peaks_agreeing = 0;
  double center_error_sum = 0.0;
};

std::string frame_name(int i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

SimFrame simulate_frame(const RunConfig& config, const NoiseConfig& noise,
                        int index, bool keep_maps) {
  SimFrame out;
  out.frame_id = frame_name(index);
  Rng rng(stream_seed(config.seed, static_cast<uint64_t>(index)));
  SceneConfig scene_config = config.scene;
  scene_config.class_names = config.classes;
  out.scene = generate_scene(scene_config, rng);
  const Scene& scene = out.scene;
  const std::vector<std::string>& names = config.classes;

  SimulationResult sim = simulate_detector(scene, names, scene_config, noise,
                                           config.codec, rng);
  const std::vector<LabeledBox2D> gts = scene_boxes2d(scene);
  const PseudoLabelResult r = generate_pseudo_labels(
      sim.maps, gts, scene.camera, config.pseudo, config.codec);
  const RebuildResult rebuilt =
      rebuild_targets(r.labels, names, scene.camera.width, scene.camera.height,
                      config.codec);
  const EncodeResult truth =
      encode_frame(scene.objects, scene.camera, names, config.codec);

  // Decoded detection index of each rendered source, found by class and
  // peak cell.
  const int grid_w = sim.maps.width();
  std::map<std::pair<int, int>, int> by_cell;
  for (size_t d = 0; d < r.detections.size(); ++d) {
    by_cell[{r.detections[d].class_id, r.detections[d].cell_index}] =
        static_cast<int>(d);
  }
  std::vector<int> matched_gt_of_pred(r.detections.size(), -1);
  for (const MatchPair& p : r.report.matched) matched_gt_of_pred[p.pred] = p.gt;

  std::vector<char> label_from_true(gts.size(), 0);
  json rendered = json::array();
  for (const SimulatedDetection& s : sim.rendered) {
    const int cx = static_cast<int>(std::floor(s.center.u / config.codec.stride));
    const int cy = static_cast<int>(std::floor(s.center.v / config.codec.stride));
    const auto it = by_cell.find({s.object.class_id, cy * grid_w + cx});
    const int det = it == by_cell.end() ? -1 : it->second;
    const int matched_to = det >= 0 ? matched_gt_of_pred[det] : -1;
    const char* kind = "true";
    if (s.source == DetectionSource::kTrue) {
      ++out.true_rendered;
      if (matched_to == s.object_index) {
        ++out.recovered;
        label_from_true[matched_to] = 1;
      }
    } else {
      kind = s.source == DetectionSource::kFalsePositive ? "false_positive"
                                                          : "mislocalized";
      ++out.corruptions;
      if (matched_to < 0) ++out.corruptions_excluded;
    }
    rendered.push_back({{"kind", kind},
                        {"class", names[s.object.class_id]},
                        {"object_index", s.object_index},
                        {"score", s.score},
                        {"detection", det},
                        {"labeled_gt", matched_to}});
  }

  for (const PseudoLabel& label : r.labels) {
    out.label_lines +=
        pseudo_label_record(out.frame_id, names[label.class_id], label).dump() +
        "\n";
    if (label_from_true[label.gt_index]) {
      ++out.labels_from_true;
      const PixelPoint truth_center =
          project_point(scene.camera, scene.objects[label.gt_index].box.center);
      out.center_error_sum +=
          std::hypot(label.projected_center.u - truth_center.u,
                     label.projected_center.v - truth_center.v);
    }
  }
  // Rebuilt heatmap peaks that coincide with the ground-truth target peaks.
  const auto& sc = truth.maps.supervised_class;
  for (size_t cell = 0; cell < sc.size(); ++cell) {
    if (sc[cell] >= 0 && rebuilt.maps.supervised_class[cell] == sc[cell]) {
      ++out.rebuilt_peaks_agreeing;
    }
  }

  out.gts = static_cast<int>(gts.size());
  out.decoded = static_cast<int>(r.detections.size());
  out.matched = static_cast<int>(r.report.matched.size());
  out.removed = static_cast<int>(r.report.removed_mis_detections.size());
  out.unmatched_gt = static_cast<int>(r.report.unmatched_gt.size());
  out.unmatched_pred = static_cast<int>(r.report.unmatched_pred.size());
  out.labels = static_cast<int>(r.labels.size());
  out.report = r.report.to_json();
  out.report["frame_id"] = out.frame_id;
  out.stats = {{"frame_id", out.frame_id},
               {"objects", out.gts},
               {"dropped", sim.dropped},
               {"false_positives_requested", sim.false_positives_requested},
               {"rendered", rendered},
               {"recovered", out.recovered},
               {"corruptions", out.corruptions},
               {"corruptions_excluded", out.corruptions_excluded}};
  out.gt_line = frame_to_json(scene_to_frame(scene, out.frame_id, names)).dump();

  if (keep_maps) {
    std::vector<ObjectAnnotation> anns;
    for (const LabeledBox2D& g : gts) {
      ObjectAnnotation a;
      a.type = names[g.class_id];
      a.box2d = g.box;
      anns.push_back(a);
    }
    out.labels_2d = format_kitti_labels(anns);
    out.maps = std::move(sim.maps);
  }
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const SimulateOptions& options) {
  config.validate();
  if (options.scenes < 0) throw ConfigError("--scenes must be >= 0");
  const NoiseConfig noise = noise_profile(options.noise);
  prepare_out_dir(options.out_dir);
  if (options.write_maps) {
    prepare_out_dir(options.out_dir / "maps");
    prepare_out_dir(options.out_dir / "labels_2d");
  }

  std::vector<SimFrame> frames(options.scenes);
  parallel_for(options.scenes, config.jobs, [&](int i) {
    frames[i] = simulate_frame(config, noise, i, options.write_maps);
  });

  std::string label_lines;
  std::string report_lines;
  std::string gt_lines;
  std::string stats_lines;
  int gts = 0, decoded = 0, matched = 0, removed = 0, unmatched_gt = 0,
      unmatched_pred = 0, recovered = 0, true_rendered = 0, corruptions = 0,
      excluded = 0, labels = 0, labels_from_true = 0, agreeing = 0;
  double center_error_sum = 0.0;
  for (const SimFrame& f : frames) {
    label_lines += f.label_lines;
    report_lines += f.report.dump() + "\n";
    gt_lines += f.gt_line + "\n";
    stats_lines += f.stats.dump() + "\n";
    gts += f.gts;
    decoded += f.decoded;
    matched += f.matched;
    removed += f.removed;
    unmatched_gt += f.unmatched_gt;
    unmatched_pred += f.unmatched_pred;
    recovered += f.recovered;
    true_rendered += f.true_rendered;
    corruptions += f.corruptions;
    excluded += f.corruptions_excluded;
    labels += f.labels;
    labels_from_true += f.labels_from_true;
    agreeing += f.rebuilt_peaks_agreeing;
    center_error_sum += f.center_error_sum;
    if (options.write_maps) {
      save_maps(options.out_dir / "maps" / f.frame_id, *f.maps,
                {{"frame_id", f.frame_id},
                 {"camera", camera_to_json(f.scene.camera)}});
      write_text_file(options.out_dir / "labels_2d" / (f.frame_id + ".txt"),
                      f.labels_2d);
    }
  }
  write_text_file(options.out_dir / "pseudo_labels.jsonl", label_lines);
  write_text_file(options.out_dir / "match_reports.jsonl", report_lines);
  write_text_file(options.out_dir / "ground_truth.jsonl", gt_lines);
  write_text_file(options.out_dir / "simulation.jsonl", stats_lines);

  json echo = config.to_json();
  echo["scenes"] = options.scenes;
  echo["noise"] = options.noise;
  write_json(
      options.out_dir / "closure_report.json",
      {{"config", echo},
       {"totals",
        {{"scenes", options.scenes},
         {"gt_objects", gts},
         {"true_detections_rendered", true_rendered},
         {"detections_decoded", decoded},
         {"matched", matched},
         {"removed_mis_detections", removed},
         {"unmatched_gt", unmatched_gt},
         {"unmatched_pred", unmatched_pred},
         {"pseudo_labels", labels},
         {"recovered", recovered},
         {"corruptions_injected", corruptions},
         {"corruptions_excluded", excluded},
         {"rebuilt_peaks_agreeing", agreeing}}},
       {"rates",
        {{"recovery_rate", rate(recovered, gts)},
         {"match_rate", rate(matched, gts)},
         {"removal_rate", rate(removed, matched + removed)},
         {"corruption_exclusion_rate",
          corruptions > 0 ? rate(excluded, corruptions) : 1.0},
         {"label_precision", labels > 0 ? rate(labels_from_true, labels) : 1.0},
         {"rebuilt_peak_agreement", rate(agreeing, gts)},
         {"mean_center_error_px",
          labels_from_true > 0 ? center_error_sum / labels_from_true : 0.0}}}});
  spdlog::info("simulated {} scenes: recovery {}/{}", options.scenes,
               recovered, gts);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Command line.

namespace {

void setup_logging() {
  auto logger = spdlog::get("mono3d");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("mono3d");
    logger->set_pattern("mono3d %l: %v");
  }
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("MONO3D_LOG");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off".
    if (level == spdlog::level::off && std::string(env) != "off") {
      level = spdlog::level::warn;
    }
  }
  spdlog::set_level(level);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  setup_logging();
  CLI::App app{"Monocular 3D detection toolkit"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;
  int jobs = 1;
  uint64_t seed = 0;
  double eps = 0.0, low_threshold = 0.0, fx0 = 0.0;
  int stride = 0;
  std::string suite, format;
  auto* opt_config = app.add_option("--config", config_path, "JSON config");
  auto* opt_jobs = app.add_option("--jobs", jobs, "Worker threads");
  auto* opt_seed = app.add_option("--seed", seed, "Master seed");
  auto* opt_eps = app.add_option("--eps", eps, "Largest accepted 1 - IoU");
  auto* opt_low = app.add_option("--low-threshold", low_threshold,
                                 "Detection score threshold for pseudo labels");
  auto* opt_stride = app.add_option("--stride", stride, "Map stride");
  auto* opt_fx0 = app.add_option("--fx0", fx0, "Reference focal length");
  auto* opt_suite = app.add_option("--suite", suite, "kitti or cityscapes");
  auto* opt_format = app.add_option("--format", format, "json, text or csv");

  std::string labels_dir, calib_dir, out_dir, maps_dir;
  auto* encode = app.add_subcommand("encode", "KITTI labels to dense maps");
  encode->add_option("labels", labels_dir, "Label directory")->required();
  encode->add_option("calib", calib_dir, "Calibration directory")->required();
  encode->add_option("out", out_dir, "Output directory")->required();

  auto* pseudo = app.add_subcommand("pseudo-label",
                                    "Pseudo 3D labels from maps and 2D labels");
  pseudo->add_option("maps", maps_dir, "Map directory")->required();
  pseudo->add_option("labels", labels_dir, "2D label directory")->required();
  pseudo->add_option("out", out_dir, "Output directory")->required();

  std::string pred_path, gt_path, components_path, report_path;
  auto* eval = app.add_subcommand("eval", "Evaluate predictions");
  eval->add_option("predictions", pred_path, "Prediction dir or JSON");
  eval->add_option("ground_truth", gt_path, "Ground-truth dir or JSON");
  eval->add_option("--components", components_path,
                   "Cityscapes components CSV");
  eval->add_option("--out", report_path, "Report file");

  SimulateOptions sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Synthetic pipeline demo");
  simulate->add_option("--scenes", sim.scenes, "Number of scenes");
  simulate->add_option("--noise", sim.noise, "zero, default or corrupt");
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_flag("--write-maps", sim.write_maps,
                     "Also write maps and 2D labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIoOrConfig;
  }

  try {
    if (opt_config->count()) {
      json j;
      try {
        j = json::parse(read_text_file(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      apply_config(config, j);
    }
    if (opt_jobs->count()) config.jobs = jobs;
    if (opt_seed->count()) config.seed = seed;
    if (opt_eps->count()) config.pseudo.eps = eps;
    if (opt_low->count()) config.pseudo.low_score_threshold = low_threshold;
    if (opt_stride->count()) config.codec.stride = stride;
    if (opt_fx0->count()) config.codec.fx0 = fx0;
    if (opt_suite->count()) config.suite = suite;
    if (opt_format->count()) config.format = parse_report_format(format);

    if (*encode) return cmd_encode(config, labels_dir, calib_dir, out_dir);
    if (*pseudo) return cmd_pseudo_label(config, maps_dir, labels_dir, out_dir);
    if (*eval) {
      EvalInputs inputs;
      if (!pred_path.empty()) inputs.predictions = pred_path;
      if (!gt_path.empty()) inputs.ground_truth = gt_path;
      if (!components_path.empty()) inputs.components = components_path;
      if (!report_path.empty()) inputs.out = report_path;
      return cmd_eval(config, inputs);
    }
    if (*simulate) {
      sim.out_dir = sim_out;
      return cmd_simulate(config, sim);
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitIoOrConfig;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIoOrConfig;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitIoOrConfig;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitIoOrConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitIoOrConfig;
}

}  // namespace mono3d::cli
