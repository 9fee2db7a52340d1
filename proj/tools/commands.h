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

// Subcommands of the mono3d tool. Each returns a process exit code:
// 0 on success, 1 for an evaluation or contract failure, 2 for I/O and
// configuration errors.

#ifndef MONO3D_TOOLS_COMMANDS_H_
#define MONO3D_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mono3d/dense_codec.h"
#include "mono3d/metrics.h"
#include "mono3d/pseudo_labeler.h"
#include "mono3d/report.h"
#include "mono3d/synthetic.h"

namespace mono3d::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIoOrConfig = 2;

struct RunConfig {
  int jobs = 1;
  uint64_t seed = 0;
  CodecConfig codec;
  PseudoConfig pseudo;
  EvalConfig eval;
  CityscapesConfig cityscapes;
  SceneConfig scene;
  std::vector<std::string> classes = {"Car", "Pedestrian", "Cyclist"};
  // Image size assumed for KITTI calibration files.
  int image_width = 1242;
  int image_height = 375;
  std::string suite = "kitti";
  ReportFormat format = ReportFormat::kJson;

  void validate() const;
  // Echo written into output artifacts. `jobs` is left out so outputs do
  // not depend on it.
  nlohmann::json to_json() const;
};

// Overrides fields from a JSON config file. Unknown keys are rejected.
// Throws ConfigError.
void apply_config(RunConfig& config, const nlohmann::json& j);

int cmd_encode(const RunConfig& config, const std::filesystem::path& labels_dir,
               const std::filesystem::path& calib_dir,
               const std::filesystem::path& out_dir);

int cmd_pseudo_label(const RunConfig& config,
                     const std::filesystem::path& maps_dir,
                     const std::filesystem::path& labels_dir,
                     const std::filesystem::path& out_dir);

struct EvalInputs {
  // KITTI label directory (16-field rows) or UnifiedFrame JSON file.
  std::optional<std::filesystem::path> predictions;
  // KITTI label directory or UnifiedFrame JSON file.
  std::optional<std::filesystem::path> ground_truth;
  // CSV of precomputed Cityscapes components:
  // class,ap,bevcd,yawsim,prsim,sizesim
  std::optional<std::filesystem::path> components;
  // Report destination; stdout when unset.
  std::optional<std::filesystem::path> out;
};

int cmd_eval(const RunConfig& config, const EvalInputs& inputs);

struct SimulateOptions {
  int scenes = 10;
  std::string noise = "default";
  std::filesystem::path out_dir;
  // Also write per-frame maps (maps/) and 2D-only KITTI labels (labels_2d/)
  // for use with the pseudo-label command.
  bool write_maps = false;
};

int cmd_simulate(const RunConfig& config, const SimulateOptions& options);

// Full command line, as main() receives it. Exceptions are mapped to exit
// codes.
int run_cli(int argc, const char* const* argv);

}  // namespace mono3d::cli

#endif  // MONO3D_TOOLS_COMMANDS_H_
