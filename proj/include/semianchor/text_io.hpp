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
#include <string>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/evaluation.hpp"
#include "semianchor/inference.hpp"

namespace semianchor {

// Writes to a temporary file in the same directory and renames it over
// `path`, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// "%.6g" formatting used by every line-oriented dump.
std::string fmt6(double v);

// Target dump, one record per line:
//   L <image> <location> <level> <row> <col> <label> <s_0> ... <s_C>
//   A <image> <location> <anchor> <pre_label> <max_iou> <post_label> <iou> <soft_label> <positive>
// A lines are written for every anchor of a positive location.
std::string format_location_record(std::int64_t image, std::size_t location, const AnchorGrid& grid,
                                   const LocationTarget& t);
std::string format_anchor_record(std::int64_t image, const AnchorTarget& t, double pre_iou);

// Detections, one per line: image_id category_id x y width height score.
std::string format_detections(const std::vector<EvalDetection>& dets);
std::vector<EvalDetection> parse_detections(const std::string& text);
// Also accepts a COCO results array: [{image_id, category_id, bbox, score}].
std::vector<EvalDetection> load_detections(const std::string& path);

// Head outputs for a set of images:
//   # semianchor-heads v1
//   image <id> locations <L> anchors <K> classes <C>
//   loc <i> <p_1> ... <p_C>                      (L lines)
//   anchor <i> <k> <prob> <x1> <y1> <x2> <y2>    (L*K lines)
struct HeadFileImage {
  std::int64_t image_id = 0;
  HeadOutputs heads;
};
std::string format_head_file(const std::vector<HeadFileImage>& images);
std::vector<HeadFileImage> parse_head_file(const std::string& text);

}  // namespace semianchor
