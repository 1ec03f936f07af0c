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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/geometry.hpp"

namespace semianchor {

enum class IouLossKind { kNegLog, kLinear };

struct LossConfig {
  double alpha_loc = 0.25;
  double beta_loc = 1.0;
  double alpha_ac = 0.25;
  double beta_ac = 2.0;
  double sigma = 0.9;
  double lambda_reg = 2.0;
  double lambda_ac = 1.0;
  double prob_eps = 1e-7;
  double iou_eps = 1e-7;
  IouLossKind iou_loss = IouLossKind::kNegLog;

  void validate() const;
  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

// Loss value and derivative with respect to the scalar input.
struct ScalarLoss {
  double value = 0.0;
  double grad = 0.0;
};

// Binary focal loss on a probability:
//   y = 1: -alpha (1 - p)^beta log p
//   y = 0: -(1 - alpha) p^beta log(1 - p)
// p is clamped to [eps, 1 - eps]; the derivative is that of the formula at the
// clamped point. Throws for p outside [0, 1].
ScalarLoss focal_loss(double p, int y, double alpha, double beta, double eps = 1e-7);

// Focal loss with a soft positive target:
//   positive: -alpha |t - p|^beta t log p
//   negative: identical to the focal negative branch.
// The derivative of |t - p|^beta at p = t is taken as 0.
ScalarLoss smoothed_focal_loss(double p, double soft_label, int positive, double alpha,
                               double beta, double eps = 1e-7);

struct BoxLoss {
  double value = 0.0;
  double iou = 0.0;
  std::array<double, 4> grad{};  // d loss / d (x1, y1, x2, y2) of the prediction
};

// -log(max(IoU, eps)) or 1 - IoU. Gradients follow the intersection and union
// areas piecewise; they vanish once the IoU is clamped.
BoxLoss iou_loss(const Box& pred, const Box& target, double eps = 1e-7,
                 IouLossKind kind = IouLossKind::kNegLog);

struct LossWithGrad {
  double value = 0.0;
  std::vector<double> grad;  // same layout as the prediction input
  int num_positive = 0;      // raw count before flooring
};

// Focal loss over all locations and the C foreground outputs per location
// (row-major, location x class), divided by max(1, #positive locations).
LossWithGrad location_cls_loss(std::span<const double> probs,
                               std::span<const LocationTarget> targets, int num_classes,
                               const LossConfig& cfg);

// Smoothed focal loss over the anchor targets (one prediction per target, in
// the same order) divided by max(1, #anchors with positive == 1).
LossWithGrad anchor_cls_loss(std::span<const double> probs, std::span<const AnchorTarget> targets,
                             const LossConfig& cfg);

struct LossReport {
  double cls = 0.0;
  double reg = 0.0;
  double ac = 0.0;
  double total = 0.0;
  int num_positive_locations = 0;
  int num_positive_anchors = 0;
};

// total = cls + lambda_reg * reg + lambda_ac * ac. Throws on non-finite input.
LossReport total_loss(double cls, double reg, double ac, const LossConfig& cfg);

// One structured line: "step=<n> cls=<v> reg=<v> ac=<v> total=<v> pos_loc=<n> pos_anchor=<n>".
std::string format_loss_report(int step, const LossReport& report);

}  // namespace semianchor
