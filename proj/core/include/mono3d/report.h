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

// Report rendering for evaluation results. Text and CSV tables print
// percentages with two decimals; JSON keeps full precision alongside the
// rounded values.

#ifndef MONO3D_REPORT_H_
#define MONO3D_REPORT_H_

#include <string>

#include <nlohmann/json.hpp>

#include "mono3d/metrics.h"

namespace mono3d {

enum class ReportFormat { kJson, kText, kCsv };

// Accepts "json", "text" and "csv". Throws ConfigError.
ReportFormat parse_report_format(const std::string& name);

nlohmann::json to_json(const KittiReport& report);
nlohmann::json to_json(const CityscapesReport& report);

// Class x metric rows with Easy / Moderate / Hard columns.
std::string to_text(const KittiReport& report);
// Class rows with DS, AP, BEVCD, YawSim, PRSim, SizeSim columns.
std::string to_text(const CityscapesReport& report);

std::string to_csv(const KittiReport& report);
std::string to_csv(const CityscapesReport& report);

template <typename Report>
std::string render(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return to_json(report).dump(2) + "\n";
    case ReportFormat::kText:
      return to_text(report);
    case ReportFormat::kCsv:
      return to_csv(report);
  }
  return {};
}

}  // namespace mono3d

#endif  // MONO3D_REPORT_H_
