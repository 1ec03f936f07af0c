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

#include "semianchor/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace semianchor {

void LossConfig::validate() const {
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_open_unit(alpha_loc) || !in_open_unit(alpha_ac)) {
    throw std::invalid_argument("focal alpha must lie in (0, 1)");
  }
  if (!(beta_loc >= 0.0) || !(beta_ac >= 0.0)) throw std::invalid_argument("focal beta must be >= 0");
  if (!in_open_unit(sigma)) throw std::invalid_argument("sigma must lie in (0, 1)");
  if (!(lambda_reg >= 0.0) || !(lambda_ac >= 0.0)) throw std::invalid_argument("loss weights must be >= 0");
  if (!(prob_eps > 0.0 && prob_eps < 0.5) || !(iou_eps > 0.0 && iou_eps < 1.0)) {
    throw std::invalid_argument("clamp epsilons must be positive");
  }
}

namespace {

double clamp_probability(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
  return std::clamp(p, eps, 1.0 - eps);
}

// beta * x^(beta - 1), with the beta = 0 case contributing nothing.
double power_slope(double x, double beta) { return beta == 0.0 ? 0.0 : beta * std::pow(x, beta - 1.0); }

ScalarLoss negative_branch(double p, double alpha, double beta) {
  const double log_q = std::log1p(-p);
  const double w = 1.0 - alpha;
  const double p_beta = std::pow(p, beta);
  return {-w * p_beta * log_q, -w * (power_slope(p, beta) * log_q - p_beta / (1.0 - p))};
}

}  // namespace

ScalarLoss focal_loss(double p, int y, double alpha, double beta, double eps) {
  if (y != 0 && y != 1) throw std::invalid_argument("focal_loss: label must be 0 or 1");
  p = clamp_probability(p, eps);
  if (y == 0) return negative_branch(p, alpha, beta);
  const double log_p = std::log(p);
  const double q = 1.0 - p;
  const double q_beta = std::pow(q, beta);
  return {-alpha * q_beta * log_p, alpha * (power_slope(q, beta) * log_p - q_beta / p)};
}

ScalarLoss smoothed_focal_loss(double p, double soft_label, int positive, double alpha,
                               double beta, double eps) {
  if (positive != 0 && positive != 1) {
    throw std::invalid_argument("smoothed_focal_loss: positive flag must be 0 or 1");
  }
  if (!(soft_label >= 0.0 && soft_label <= 1.0)) {
    throw std::invalid_argument("smoothed_focal_loss: soft label outside [0, 1]");
  }
  p = clamp_probability(p, eps);
  if (positive == 0) return negative_branch(p, alpha, beta);
  const double log_p = std::log(p);
  const double diff = soft_label - p;
  const double gap = std::abs(diff);
  const double modulator = std::pow(gap, beta);
  // d|t - p|^beta / dp = -beta |t - p|^(beta - 1) sign(t - p); zero at the kink.
  const double modulator_slope =
      diff == 0.0 ? 0.0 : -power_slope(gap, beta) * (diff > 0.0 ? 1.0 : -1.0);
  const double value = -alpha * modulator * soft_label * log_p;
  const double grad = -alpha * soft_label * (modulator_slope * log_p + modulator / p);
  return {value, grad};
}

BoxLoss iou_loss(const Box& pred, const Box& target, double eps, IouLossKind kind) {
  if (!(target.area() > 0.0)) throw std::invalid_argument("iou_loss: target must have positive area");
  if (!pred.valid()) throw std::invalid_argument("iou_loss: predicted box is inverted");

  const double lo_x = std::max(pred.x1, target.x1);
  const double hi_x = std::min(pred.x2, target.x2);
  const double lo_y = std::max(pred.y1, target.y1);
  const double hi_y = std::min(pred.y2, target.y2);
  const double iw = std::max(0.0, hi_x - lo_x);
  const double ih = std::max(0.0, hi_y - lo_y);
  const double inter = iw * ih;
  const double pw = pred.width();
  const double ph = pred.height();
  const double uni = (pred.area() + target.area()) - inter;
  const double overlap = uni > 0.0 ? inter / uni : 0.0;

  BoxLoss out;
  out.iou = overlap;
  if (kind == IouLossKind::kNegLog) {
    out.value = -std::log(std::max(overlap, eps));
    if (overlap < eps) return out;
  } else {
    out.value = 1.0 - overlap;
    if (!(inter > 0.0)) return out;
  }

  // Partial derivatives of the intersection w.r.t. (x1, y1, x2, y2); a
  // coordinate only moves the intersection while it is the binding edge.
  std::array<double, 4> d_inter{};
  if (iw > 0.0 && ih > 0.0) {
    d_inter[0] = pred.x1 > target.x1 ? -ih : 0.0;
    d_inter[1] = pred.y1 > target.y1 ? -iw : 0.0;
    d_inter[2] = pred.x2 < target.x2 ? ih : 0.0;
    d_inter[3] = pred.y2 < target.y2 ? iw : 0.0;
  }
  const std::array<double, 4> d_area{-ph, -pw, ph, pw};

  const double uni_sq = uni * uni;
  for (int j = 0; j < 4; ++j) {
    const double d_uni = d_area[j] - d_inter[j];
    const double d_iou = (d_inter[j] * uni - inter * d_uni) / uni_sq;
    out.grad[j] = kind == IouLossKind::kNegLog ? -d_iou / overlap : -d_iou;
  }
  return out;
}

LossWithGrad location_cls_loss(std::span<const double> probs,
                               std::span<const LocationTarget> targets, int num_classes,
                               const LossConfig& cfg) {
  const std::size_t c_count = static_cast<std::size_t>(num_classes);
  if (probs.size() != targets.size() * c_count) {
    throw std::invalid_argument("location_cls_loss: expected one probability per location and class");
  }
  LossWithGrad out;
  out.grad.assign(probs.size(), 0.0);
  for (const LocationTarget& t : targets) out.num_positive += t.positive() ? 1 : 0;
  const double norm = std::max(1, out.num_positive);

  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t c = 0; c < c_count; ++c) {
      const int y = targets[i].label == static_cast<int>(c) + 1 ? 1 : 0;
      const ScalarLoss l =
          focal_loss(probs[i * c_count + c], y, cfg.alpha_loc, cfg.beta_loc, cfg.prob_eps);
      sum += l.value;
      out.grad[i * c_count + c] = l.grad / norm;
    }
  }
  out.value = sum / norm;
  return out;
}

LossWithGrad anchor_cls_loss(std::span<const double> probs, std::span<const AnchorTarget> targets,
                             const LossConfig& cfg) {
  if (probs.size() != targets.size()) {
    throw std::invalid_argument("anchor_cls_loss: expected one probability per anchor target");
  }
  LossWithGrad out;
  out.grad.assign(probs.size(), 0.0);
  for (const AnchorTarget& t : targets) out.num_positive += t.positive;
  const double norm = std::max(1, out.num_positive);

  double sum = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const AnchorTarget& t = targets[j];
    const ScalarLoss l = smoothed_focal_loss(probs[j], t.soft_label, t.positive, cfg.alpha_ac,
                                             cfg.beta_ac, cfg.prob_eps);
    sum += l.value;
    out.grad[j] = l.grad / norm;
  }
  out.value = sum / norm;
  return out;
}

LossReport total_loss(double cls, double reg, double ac, const LossConfig& cfg) {
  if (!std::isfinite(cls) || !std::isfinite(reg) || !std::isfinite(ac)) {
    throw std::domain_error("loss component is not finite");
  }
  LossReport r;
  r.cls = cls;
  r.reg = reg;
  r.ac = ac;
  r.total = cls + cfg.lambda_reg * reg + cfg.lambda_ac * ac;
  return r;
}

std::string format_loss_report(int step, const LossReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "step=%d cls=%.6g reg=%.6g ac=%.6g total=%.6g pos_loc=%d pos_anchor=%d",
                step, r.cls, r.reg, r.ac, r.total, r.num_positive_locations,
                r.num_positive_anchors);
  return buf;
}

}  // namespace semianchor
