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

#include "semianchor/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semianchor {

void validate_ground_truth(const GroundTruth& gt, int num_classes) {
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (gt[g].label < 1 || gt[g].label > num_classes) {
      throw std::invalid_argument("ground truth " + std::to_string(g) + " has class " +
                                  std::to_string(gt[g].label) + " outside 1.." +
                                  std::to_string(num_classes));
    }
    if (!gt[g].box.valid()) {
      throw std::invalid_argument("ground truth " + std::to_string(g) + " has an inverted box");
    }
  }
}

AnchorLabels label_anchors(const AnchorGrid& grid, const GroundTruth& gt,
                           AnchorThresholds thresholds) {
  if (!(0.0 <= thresholds.bg && thresholds.bg <= thresholds.fg && thresholds.fg <= 1.0)) {
    throw std::invalid_argument("anchor thresholds must satisfy 0 <= bg <= fg <= 1");
  }
  const std::size_t n = grid.num_anchors();
  AnchorLabels out{std::vector<int>(n, 0), std::vector<double>(n, 0.0), std::vector<int>(n, -1)};
  std::vector<double> ious(n);
  for (std::size_t g = 0; g < gt.size(); ++g) {
    iou_one_to_many(gt[g].box, grid.anchors(), ious);
    for (std::size_t a = 0; a < n; ++a) {
      if (out.matched_gt[a] < 0 || ious[a] > out.max_iou[a]) {
        out.max_iou[a] = ious[a];
        out.matched_gt[a] = static_cast<int>(g);
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (out.matched_gt[a] >= 0 && out.max_iou[a] >= thresholds.fg) {
      out.label[a] = gt[static_cast<std::size_t>(out.matched_gt[a])].label;
    }
  }
  return out;
}

std::vector<double> score_location(std::span<const int> anchor_labels, int num_classes) {
  if (anchor_labels.empty()) throw std::invalid_argument("score_location: no anchors");
  std::vector<int> counts(static_cast<std::size_t>(num_classes) + 1, 0);
  for (int label : anchor_labels) {
    if (label < 0 || label > num_classes) {
      throw std::invalid_argument("anchor label " + std::to_string(label) + " out of range");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  const double k = static_cast<double>(anchor_labels.size());
  std::vector<double> scores(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) scores[c] = counts[c] / k;
  return scores;
}

namespace {

// Lowest-index foreground argmax among classes with a nonzero vote; 0 if none.
int best_foreground(std::span<const double> votes, std::span<const double> ranked) {
  int best = 0;
  for (std::size_t c = 1; c < ranked.size(); ++c) {
    if (!(votes[c] > 0.0)) continue;
    if (best == 0 || ranked[c] > ranked[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

}  // namespace

ThresholdMoveResult threshold_move(std::span<const double> scores, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (scores.empty()) throw std::invalid_argument("threshold_move: empty score vector");
  ThresholdMoveResult out;
  out.rescaled.resize(scores.size());
  out.rescaled[0] = gamma * scores[0];
  for (std::size_t c = 1; c < scores.size(); ++c) out.rescaled[c] = (1.0 - gamma) * scores[c];
  const int fg = best_foreground(scores, out.rescaled);
  out.label = (fg > 0 && out.rescaled[static_cast<std::size_t>(fg)] >= out.rescaled[0]) ? fg : 0;
  return out;
}

int label_location_simplified(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("label_location_simplified: empty scores");
  if (scores[0] == 1.0) return 0;
  return best_foreground(scores, scores);
}

std::vector<LocationTarget> assign_locations(const AnchorGrid& grid, const AnchorLabels& anchors,
                                             int num_classes, LocationRule rule) {
  const std::size_t k = static_cast<std::size_t>(grid.anchors_per_location());
  if (anchors.label.size() != grid.num_anchors()) {
    throw std::invalid_argument("assign_locations: anchor labels do not match the grid");
  }
  std::vector<LocationTarget> out(grid.num_locations());
  const std::span<const int> labels(anchors.label);
  for (std::size_t i = 0; i < out.size(); ++i) {
    LocationTarget& t = out[i];
    t.scores = score_location(labels.subspan(i * k, k), num_classes);
    if (rule.kind == LocationRule::Kind::kThresholdMoving) {
      ThresholdMoveResult moved = threshold_move(t.scores, rule.gamma);
      t.rescaled = std::move(moved.rescaled);
      t.label = moved.label;
    } else {
      t.rescaled = t.scores;
      t.label = label_location_simplified(t.scores);
    }
  }
  return out;
}

std::vector<int> label_locations_fcos(const AnchorGrid& grid, const GroundTruth& gt,
                                      double shrink_factor) {
  if (!(shrink_factor > 0.0 && shrink_factor <= 1.0)) {
    throw std::invalid_argument("shrink_factor must lie in (0, 1]");
  }
  std::vector<int> labels(grid.num_locations(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double cx = grid.center_x(i);
    const double cy = grid.center_y(i);
    double best_area = 0.0;
    int best = -1;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const Box& b = gt[g].box;
      const double hw = 0.5 * shrink_factor * b.width();
      const double hh = 0.5 * shrink_factor * b.height();
      const double mx = b.center_x();
      const double my = b.center_y();
      if (!(cx > mx - hw && cx < mx + hw && cy > my - hh && cy < my + hh)) continue;
      if (best < 0 || b.area() < best_area) {
        best = static_cast<int>(g);
        best_area = b.area();
      }
    }
    if (best >= 0) labels[i] = gt[static_cast<std::size_t>(best)].label;
  }
  return labels;
}

std::vector<LocationTarget> location_targets_from_labels(std::span<const int> labels,
                                                         int num_classes) {
  std::vector<LocationTarget> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] > num_classes) {
      throw std::invalid_argument("location label out of range");
    }
    out[i].label = labels[i];
    out[i].scores.assign(static_cast<std::size_t>(num_classes) + 1, 0.0);
    out[i].scores[static_cast<std::size_t>(labels[i])] = 1.0;
    out[i].rescaled = out[i].scores;
  }
  return out;
}

std::vector<double> soft_labels(std::span<const double> ious, double sigma,
                                bool unit_soft_labels) {
  std::vector<double> out(ious.size(), 0.0);
  double max_iou = 0.0;
  for (double v : ious) max_iou = std::max(max_iou, v);
  if (!(max_iou > 0.0)) return out;
  for (std::size_t k = 0; k < ious.size(); ++k) {
    if (unit_soft_labels) {
      out[k] = ious[k] > 0.0 ? 1.0 : 0.0;
    } else {
      out[k] = std::pow(ious[k] / max_iou, sigma);
    }
  }
  return out;
}

std::vector<AnchorTarget> build_ac_targets(const AnchorGrid& grid, const BoxArray& refined,
                                           std::span<const LocationTarget> locations,
                                           const GroundTruth& gt, AcTargetParams params,
                                           std::span<const int> pre_labels) {
  if (!params.unit_soft_labels && !(params.sigma > 0.0 && params.sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0, 1)");
  }
  if (!(params.iou_thresh >= 0.0 && params.iou_thresh <= 1.0)) {
    throw std::invalid_argument("ac_iou_thresh must lie in [0, 1]");
  }
  if (refined.size() != grid.num_anchors()) {
    throw std::invalid_argument("build_ac_targets: need one refined box per anchor");
  }
  if (locations.size() != grid.num_locations()) {
    throw std::invalid_argument("build_ac_targets: need one location target per location");
  }
  if (!pre_labels.empty() && pre_labels.size() != grid.num_anchors()) {
    throw std::invalid_argument("build_ac_targets: pre-regression labels do not match the grid");
  }

  const int k_count = grid.anchors_per_location();
  std::vector<AnchorTarget> out;
  std::vector<double> ious(static_cast<std::size_t>(k_count));
  for (std::size_t i = 0; i < locations.size(); ++i) {
    const int y = locations[i].label;
    if (y <= 0) continue;

    bool has_class = false;
    for (const GtBox& g : gt) has_class = has_class || g.label == y;
    if (!has_class) {
      throw std::invalid_argument("positive location " + std::to_string(i) + " has class " +
                                  std::to_string(y) + " but no ground truth of that class");
    }

    const std::size_t first = out.size();
    for (int k = 0; k < k_count; ++k) {
      const std::size_t a = grid.anchor_index(i, k);
      const Box box = refined[a];
      AnchorTarget t;
      t.location = i;
      t.anchor = k;
      if (!pre_labels.empty()) t.pre_label = pre_labels[a];
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt[g].label != y) continue;
        const double v = iou(box, gt[g].box);
        if (!t.matched_gt || v > t.iou) {
          t.iou = v;
          t.matched_gt = static_cast<int>(g);
        }
      }
      t.post_label = t.iou >= params.iou_thresh ? y : 0;
      ious[static_cast<std::size_t>(k)] = t.iou;
      out.push_back(t);
    }

    const std::vector<double> soft = soft_labels(ious, params.sigma, params.unit_soft_labels);
    double max_iou = 0.0;
    for (double v : ious) max_iou = std::max(max_iou, v);
    for (int k = 0; k < k_count; ++k) {
      AnchorTarget& t = out[first + static_cast<std::size_t>(k)];
      t.soft_label = soft[static_cast<std::size_t>(k)];
      t.positive = (max_iou > 0.0 && t.post_label == y) ? 1 : 0;
    }
  }
  return out;
}

std::vector<RegressionTarget> regression_targets(const AnchorGrid& grid,
                                                 std::span<const LocationTarget> locations,
                                                 const GroundTruth& gt) {
  std::vector<RegressionTarget> out;
  const int k_count = grid.anchors_per_location();
  for (std::size_t i = 0; i < locations.size(); ++i) {
    const int y = locations[i].label;
    if (y <= 0) continue;
    for (int k = 0; k < k_count; ++k) {
      const std::size_t a = grid.anchor_index(i, k);
      const Box anchor = grid.anchors()[a];
      double best = 0.0;
      int best_gt = -1;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt[g].label != y) continue;
        const double v = iou(anchor, gt[g].box);
        if (v > best) {
          best = v;
          best_gt = static_cast<int>(g);
        }
      }
      if (best_gt >= 0) out.push_back({a, best_gt});
    }
  }
  return out;
}

}  // namespace semianchor
