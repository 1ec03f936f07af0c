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

#include <vector>

#include "semianchor/evaluation.hpp"

namespace oracle {

// Brute-force COCO AP. For every score cutoff the matching is redone from
// scratch on the detections above it, giving one (recall, precision) point
// per cutoff; the 101 recall levels are compared with exact integer
// arithmetic and take the best precision at any cutoff reaching them.
// Ordering conventions shared with the library: detections by score
// descending, then image id, then (x1, y1, x2, y2); ties in IoU go to the
// ground truth that sorts first by (x1, y1, x2, y2).
double category_ap(const std::vector<semianchor::EvalDetection>& dets,
                   const std::vector<semianchor::EvalGroundTruth>& gts, int category, double iou_thresh);

struct Summary {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
};

// Means over the categories present in the ground truth, then over the ten
// thresholds 0.50, 0.55, ..., 0.95.
Summary summarize(const std::vector<semianchor::EvalDetection>& dets,
                  const std::vector<semianchor::EvalGroundTruth>& gts);

}  // namespace oracle
