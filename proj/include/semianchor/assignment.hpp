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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semianchor/geometry.hpp"

namespace semianchor {

// One ground-truth object; label is in 1..C.
struct GtBox {
  Box box;
  int label = 0;
  friend bool operator==(const GtBox&, const GtBox&) = default;
};
using GroundTruth = std::vector<GtBox>;

void validate_ground_truth(const GroundTruth& gt, int num_classes);

struct AnchorThresholds {
  double fg = 0.5;
  double bg = 0.4;
  friend bool operator==(const AnchorThresholds&, const AnchorThresholds&) = default;
};

// Pre-regression anchor labels. The ignore band [bg, fg) is folded into
// background so that per-location histograms stay proper distributions.
struct AnchorLabels {
  std::vector<int> label;
  std::vector<double> max_iou;
  std::vector<int> matched_gt;  // -1 when the image has no ground truth
};

AnchorLabels label_anchors(const AnchorGrid& grid, const GroundTruth& gt,
                           AnchorThresholds thresholds = {});

// Histogram of the K anchor labels at one location divided by K.
std::vector<double> score_location(std::span<const int> anchor_labels, int num_classes);

struct ThresholdMoveResult {
  std::vector<double> rescaled;
  int label = 0;
};

// Background score scaled by gamma, foreground scores by (1 - gamma), then
// argmax. Ties go to the lowest foreground class; background loses ties
// against any foreground class that received at least one anchor.
ThresholdMoveResult threshold_move(std::span<const double> scores, double gamma);

// 0 when every anchor is background, otherwise the most voted foreground
// class (lowest index on ties).
int label_location_simplified(std::span<const double> scores);

struct LocationTarget {
  int label = 0;
  std::vector<double> scores;    // s_i, size C + 1
  std::vector<double> rescaled;  // threshold-moved scores; equals `scores` under the simplified rule
  bool positive() const { return label > 0; }
};

struct LocationRule {
  enum class Kind { kSimplified, kThresholdMoving };
  Kind kind = Kind::kSimplified;
  double gamma = 0.0;

  static LocationRule simplified() { return {}; }
  static LocationRule threshold_moving(double gamma) { return {Kind::kThresholdMoving, gamma}; }
  friend bool operator==(const LocationRule&, const LocationRule&) = default;
};

std::vector<LocationTarget> assign_locations(const AnchorGrid& grid, const AnchorLabels& anchors,
                                             int num_classes,
                                             LocationRule rule = LocationRule::simplified());

// Center-in-box labeling. The box is shrunk about its center by
// `shrink_factor` (1 = plain containment); overlaps go to the smaller box.
std::vector<int> label_locations_fcos(const AnchorGrid& grid, const GroundTruth& gt,
                                      double shrink_factor);
// Wraps plain per-location labels as targets with one-hot scores.
std::vector<LocationTarget> location_targets_from_labels(std::span<const int> labels,
                                                         int num_classes);

struct AnchorTarget {
  std::size_t location = 0;
  int anchor = 0;
  int pre_label = -1;           // pre-regression label when known, else -1
  int post_label = 0;           // label of the refined anchor
  std::optional<int> matched_gt;
  double iou = 0.0;             // post-regression IoU with the matched box
  double soft_label = 0.0;      // (iou / max_k iou)^sigma
  int positive = 0;             // 1 iff post_label equals the location label
};

struct AcTargetParams {
  double iou_thresh = 0.5;
  double sigma = 0.9;
  // Diagnostic limit sigma -> 0: every anchor with iou > 0 gets soft label 1.
  bool unit_soft_labels = false;
  friend bool operator==(const AcTargetParams&, const AcTargetParams&) = default;
};

// Targets for the anchor classifier at every positive location, K per
// location in (location, anchor) order. `refined` holds one box per anchor of
// the grid. Throws when a positive location has no ground truth of its class.
std::vector<AnchorTarget> build_ac_targets(const AnchorGrid& grid, const BoxArray& refined,
                                           std::span<const LocationTarget> locations,
                                           const GroundTruth& gt, AcTargetParams params = {},
                                           std::span<const int> pre_labels = {});

// Soft labels for one location's IoUs.
std::vector<double> soft_labels(std::span<const double> ious, double sigma,
                                bool unit_soft_labels = false);

// Anchors that receive a regression loss: every anchor at a positive location
// that overlaps (pre-regression) some ground truth of the location's class;
// the target is the max-IoU box among them.
struct RegressionTarget {
  std::size_t anchor_index = 0;
  int gt_index = 0;
};
std::vector<RegressionTarget> regression_targets(const AnchorGrid& grid,
                                                 std::span<const LocationTarget> locations,
                                                 const GroundTruth& gt);

struct Prop1Options {
  // Exhaustive enumeration up to this many assignments, sampling beyond.
  std::uint64_t max_exhaustive = std::uint64_t{1} << 22;
  std::uint64_t samples = 200000;
  std::uint64_t seed = 0;
};

struct Prop1Report {
  int num_anchors = 0;
  int num_classes = 0;
  double gamma = 0.0;
  bool exhaustive = true;
  bool passed = true;
  std::uint64_t cases_checked = 0;  // assignments with at least one foreground anchor
  std::vector<int> counterexample;  // anchor labels of the first violation
  std::string failure;
};

// Checks that any location holding a foreground anchor is labeled positive by
// threshold moving, together with the normalized-score bounds
//   s~0 < 1 / (1 + sum_j n_j)   and   s~c > n_c / (1 + sum_j n_j) for n_c > 0.
// The claim needs gamma < 1/K; larger gammas are accepted so that the
// counterexample can be reported.
Prop1Report verify_proposition_1(int num_anchors, int num_classes, double gamma,
                                 Prop1Options options = {});

}  // namespace semianchor
