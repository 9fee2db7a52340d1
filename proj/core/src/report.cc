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

#include "mono3d/report.h"

#include <cstdio>
#include <sstream>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(v));
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string rpad(const std::string& s, size_t width) {
  return s.size() >= width ? " " + s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "text") return ReportFormat::kText;
  if (name == "csv") return ReportFormat::kCsv;
  throw ConfigError("unknown report format '" + name + "'");
}

nlohmann::json to_json(const KittiReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json bands = nlohmann::json::object();
    for (DifficultyBand band : kAllBands) {
      const ApResult& r = row.bands[static_cast<int>(band)];
      bands[band_name(band)] = {{"ap", r.ap},
                                {"ap_rounded", round2(r.ap)},
                                {"num_gt", r.num_gt},
                                {"tp", r.tp},
                                {"fp", r.fp},
                                {"no_ground_truth", r.no_ground_truth}};
    }
    rows.push_back({{"class", row.cls},
                    {"metric", std::string("AP_") + mode_name(row.mode)},
                    {"bands", bands}});
  }
  return {{"suite", "kitti"},
          {"recall_positions", kRecallPositions},
          {"rows", rows}};
}

nlohmann::json to_json(const CityscapesReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"class", r.cls},
                    {"ds", r.ds},
                    {"ap", r.ap},
                    {"bevcd", r.bevcd},
                    {"yawsim", r.yawsim},
                    {"prsim", r.prsim},
                    {"sizesim", r.sizesim},
                    {"rounded",
                     {{"ds", round2(r.ds)},
                      {"ap", round2(r.ap)},
                      {"bevcd", round2(r.bevcd)},
                      {"yawsim", round2(r.yawsim)},
                      {"prsim", round2(r.prsim)},
                      {"sizesim", round2(r.sizesim)}}},
                    {"num_gt", r.num_gt},
                    {"tp", r.tp},
                    {"no_ground_truth", r.no_ground_truth},
                    {"no_true_positives", r.no_true_positives}});
  }
  return {{"suite", "cityscapes"}, {"rows", rows}};
}

std::string to_text(const KittiReport& report) {
  std::ostringstream out;
  out << pad("Class", 12) << pad("Metric", 8) << rpad("Easy (%)", 10)
      << rpad("Moderate (%)", 14) << rpad("Hard (%)", 10) << "\n";
  for (const auto& row : report.rows) {
    out << pad(row.cls, 12) << pad(std::string("AP_") + mode_name(row.mode), 8);
    out << rpad(fixed2(row.bands[0].ap), 10) << rpad(fixed2(row.bands[1].ap), 14)
        << rpad(fixed2(row.bands[2].ap), 10) << "\n";
  }
  return out.str();
}

std::string to_text(const CityscapesReport& report) {
  std::ostringstream out;
  out << pad("Class", 12);
  for (const char* h : {"DS (%)", "AP (%)", "BEVCD (%)", "YawSim (%)",
                        "PRSim (%)", "SizeSim (%)"}) {
    out << rpad(h, 13);
  }
  out << "\n";
  for (const auto& r : report.rows) {
    out << pad(r.cls, 12);
    for (double v : {r.ds, r.ap, r.bevcd, r.yawsim, r.prsim, r.sizesim}) {
      out << rpad(fixed2(v), 13);
    }
    out << "\n";
  }
  return out.str();
}

std::string to_csv(const KittiReport& report) {
  std::ostringstream out;
  out << "class,metric,easy,moderate,hard\n";
  for (const auto& row : report.rows) {
    out << row.cls << ",AP_" << mode_name(row.mode) << ","
        << fixed2(row.bands[0].ap) << "," << fixed2(row.bands[1].ap) << ","
        << fixed2(row.bands[2].ap) << "\n";
  }
  return out.str();
}

std::string to_csv(const CityscapesReport& report) {
  std::ostringstream out;
  out << "class,ds,ap,bevcd,yawsim,prsim,sizesim\n";
  for (const auto& r : report.rows) {
    out << r.cls;
    for (double v : {r.ds, r.ap, r.bevcd, r.yawsim, r.prsim, r.sizesim}) {
      out << "," << fixed2(v);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace mono3d
