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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "semianchor/geometry.hpp"

namespace semianchor {

struct Detection {
  Box box;
  int label = 0;  // 1..C
  double score = 0.0;
  std::size_t location = 0;
  int anchor = 0;
};

enum class SelectionStrategy { kTopK, kPos };

struct InferenceConfig {
  SelectionStrategy strategy = SelectionStrategy::kTopK;
  int top_k = 1;
  double tau = 0.1;
  double nms_iou_thresh = 0.5;
  double pre_nms_score_thresh = 0.05;
  int max_detections = 100;

  void validate() const;
  static InferenceConfig top(int k);
  static InferenceConfig pos(double tau);
  friend bool operator==(const InferenceConfig&, const InferenceConfig&) = default;
};

// Raw outputs of the three heads for one image.
struct HeadOutputs {
  std::size_t num_locations = 0;
  int anchors_per_location = 0;
  int num_classes = 0;
  std::vector<double> location_probs;  // location x class
  std::vector<double> anchor_probs;    // location x anchor
  BoxArray refined;                    // location x anchor

  void validate() const;
};

// score(i, k, c) = location_prob(i, c) * anchor_prob(i, k), stored with the
// anchor index innermost so that one (location, class) row is contiguous.
class FactorizedScores {
 public:
  FactorizedScores(std::size_t num_locations, int anchors_per_location, int num_classes);

  double at(std::size_t location, int anchor, int label) const {
    return values_[index(location, label) + static_cast<std::size_t>(anchor)];
  }
  std::span<const double> row(std::size_t location, int label) const {
    return std::span<const double>(values_).subspan(index(location, label),
                                                    static_cast<std::size_t>(k_));
  }
  std::span<double> row(std::size_t location, int label) {
    return std::span<double>(values_).subspan(index(location, label), static_cast<std::size_t>(k_));
  }

 private:
  std::size_t index(std::size_t location, int label) const {
    return (location * static_cast<std::size_t>(c_) + static_cast<std::size_t>(label - 1)) *
           static_cast<std::size_t>(k_);
  }
  int k_ = 0;
  int c_ = 0;
  std::vector<double> values_;
};

FactorizedScores factorized_scores(std::span<const double> location_probs,
                                   std::span<const double> anchor_probs, std::size_t num_locations,
                                   int anchors_per_location, int num_classes);

// Pre-NMS candidates. Top-k keeps, per location and class, the k anchors with
// the highest anchor probability (ties to the lower anchor index); Pos keeps
// anchors whose probability is at least tau. Both then drop candidates below
// the pre-NMS score threshold. Output is ordered by (location, class, anchor).
std::vector<Detection> select_anchors(const HeadOutputs& heads, const InferenceConfig& cfg);

// Baseline without an anchor classifier: one uniformly drawn anchor per
// location, scored with the location probability alone.
std::vector<Detection> select_random_anchor(const HeadOutputs& heads, const InferenceConfig& cfg,
                                            std::uint64_t seed);

// Greedy class-wise NMS. Sorted by score descending with ties broken by
// (location, anchor, class) ascending; output truncated to max_detections.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_thresh, int max_detections);

std::vector<Detection> run_inference(const HeadOutputs& heads, const InferenceConfig& cfg);

}  // namespace semianchor
