// Copyright 2026 The Semianchor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/geometry.hpp"

namespace semianchor {

struct EvalDetection {
  std::int64_t image_id = 0;
  int category = 0;
  Box box;
  double score = 0.0;
};

struct EvalGroundTruth {
  std::int64_t image_id = 0;
  int category = 0;
  Box box;
};

// Ground-truth area band; boxes outside it are ignored (COCO AP_S/M/L).
struct AreaRange {
  double min_area = 0.0;
  double max_area = 1e10;
};

// AP of one category at one IoU threshold: detections are matched greedily in
// descending score order to the unmatched ground truth of highest IoU in the
// same image, and precision is integrated at 101 recall points after taking
// its upper envelope. nullopt when the category has no ground truth.
std::optional<double> category_average_precision(std::span<const EvalDetection> dets,
                                                 std::span<const EvalGroundTruth> gts,
                                                 int category, double iou_thresh,
                                                 AreaRange area = {});

// Mean of category_average_precision over the categories that have ground
// truth. Throws when no category does.
double average_precision(std::span<const EvalDetection> dets, std::span<const EvalGroundTruth> gts,
                         double iou_thresh);

struct EvalReport {
  double ap = 0.0;    // mean over IoU 0.50:0.05:0.95
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ap_small = -1.0;  // -1 when no ground truth falls in the band
  double ap_medium = -1.0;
  double ap_large = -1.0;
  std::map<int, double> per_category;  // averaged over IoU thresholds
  std::size_t num_gt = 0;
  std::size_t num_detections = 0;
};

std::vector<double> coco_iou_thresholds();

EvalReport map_report(std::span<const EvalDetection> dets, std::span<const EvalGroundTruth> gts);

// Aligned table for terminals.
std::string format_eval_table(const EvalReport& report);
// "key value" lines, one metric per line.
std::string format_eval_text(const EvalReport& report);

struct ImbalanceStats {
  std::uint64_t anchor_positive = 0;
  std::uint64_t anchor_negative = 0;
  std::uint64_t location_positive = 0;
  std::uint64_t location_negative = 0;

  double anchor_positive_fraction() const;
  double location_positive_fraction() const;
  // negatives per positive; infinity when there are no positives
  double anchor_ratio() const;
  double location_ratio() const;

  ImbalanceStats& operator+=(const ImbalanceStats& other);
};

// Anchor counts come from the pre-regression labels, location counts from the
// location targets.
ImbalanceStats imbalance_stats(const AnchorLabels& anchors, std::span<const LocationTarget> locations);

std::string format_imbalance(const ImbalanceStats& stats);

}  // namespace semianchor
