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

#include "semianchor/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "semianchor/kernels.hpp"

namespace semianchor {

void InferenceConfig::validate() const {
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(tau)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (!unit(nms_iou_thresh)) throw std::invalid_argument("nms_iou_thresh must lie in [0, 1]");
  if (!unit(pre_nms_score_thresh)) {
    throw std::invalid_argument("pre_nms_score_thresh must lie in [0, 1]");
  }
  if (max_detections < 1) throw std::invalid_argument("max_detections must be >= 1");
}

InferenceConfig InferenceConfig::top(int k) {
  InferenceConfig cfg;
  cfg.strategy = SelectionStrategy::kTopK;
  cfg.top_k = k;
  return cfg;
}

InferenceConfig InferenceConfig::pos(double tau) {
  InferenceConfig cfg;
  cfg.strategy = SelectionStrategy::kPos;
  cfg.tau = tau;
  return cfg;
}

void HeadOutputs::validate() const {
  const std::size_t anchors = num_locations * static_cast<std::size_t>(anchors_per_location);
  if (anchors_per_location < 1 || num_classes < 1) {
    throw std::invalid_argument("head outputs need K >= 1 and C >= 1");
  }
  if (location_probs.size() != num_locations * static_cast<std::size_t>(num_classes)) {
    throw std::invalid_argument("location_probs must hold locations x classes values");
  }
  if (anchor_probs.size() != anchors || refined.size() != anchors) {
    throw std::invalid_argument("anchor outputs must hold locations x anchors values");
  }
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!std::all_of(location_probs.begin(), location_probs.end(), is_prob) ||
      !std::all_of(anchor_probs.begin(), anchor_probs.end(), is_prob)) {
    throw std::invalid_argument("head probabilities must lie in [0, 1]");
  }
}

FactorizedScores::FactorizedScores(std::size_t num_locations, int anchors_per_location,
                                   int num_classes)
    : k_(anchors_per_location),
      c_(num_classes),
      values_(num_locations * static_cast<std::size_t>(anchors_per_location) *
              static_cast<std::size_t>(num_classes)) {}

FactorizedScores factorized_scores(std::span<const double> location_probs,
                                   std::span<const double> anchor_probs, std::size_t num_locations,
                                   int anchors_per_location, int num_classes) {
  const std::size_t k = static_cast<std::size_t>(anchors_per_location);
  const std::size_t c = static_cast<std::size_t>(num_classes);
  if (location_probs.size() != num_locations * c || anchor_probs.size() != num_locations * k) {
    throw std::invalid_argument("factorized_scores: input sizes do not match");
  }
  FactorizedScores scores(num_locations, anchors_per_location, num_classes);
  for (std::size_t i = 0; i < num_locations; ++i) {
    const double* anchors = anchor_probs.data() + i * k;
    for (int label = 1; label <= num_classes; ++label) {
      std::span<double> row = scores.row(i, label);
      kernels::scale(location_probs[i * c + static_cast<std::size_t>(label - 1)], anchors,
                     row.data(), k);
    }
  }
  return scores;
}

std::vector<Detection> select_anchors(const HeadOutputs& heads, const InferenceConfig& cfg) {
  heads.validate();
  cfg.validate();
  const std::size_t k_count = static_cast<std::size_t>(heads.anchors_per_location);
  const FactorizedScores scores =
      factorized_scores(heads.location_probs, heads.anchor_probs, heads.num_locations,
                        heads.anchors_per_location, heads.num_classes);

  std::vector<Detection> out;
  std::vector<int> order(k_count);
  for (std::size_t i = 0; i < heads.num_locations; ++i) {
    const double* probs = heads.anchor_probs.data() + i * k_count;
    std::vector<int> kept;
    if (cfg.strategy == SelectionStrategy::kTopK) {
      std::iota(order.begin(), order.end(), 0);
      // The ranking depends only on the anchor probability, so it is shared
      // by every class at this location.
      std::stable_sort(order.begin(), order.end(),
                       [probs](int a, int b) { return probs[a] > probs[b]; });
      const std::size_t keep = std::min(k_count, static_cast<std::size_t>(cfg.top_k));
      kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
      std::sort(kept.begin(), kept.end());
    } else {
      for (std::size_t k = 0; k < k_count; ++k) {
        if (probs[k] >= cfg.tau) kept.push_back(static_cast<int>(k));
      }
    }
    for (int label = 1; label <= heads.num_classes; ++label) {
      for (int k : kept) {
        const double score = scores.at(i, k, label);
        if (score < cfg.pre_nms_score_thresh) continue;
        out.push_back({heads.refined[i * k_count + static_cast<std::size_t>(k)], label, score, i, k});
      }
    }
  }
  return out;
}

std::vector<Detection> select_random_anchor(const HeadOutputs& heads, const InferenceConfig& cfg,
                                            std::uint64_t seed) {
  heads.validate();
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, heads.anchors_per_location - 1);
  const std::size_t k_count = static_cast<std::size_t>(heads.anchors_per_location);
  const std::size_t c_count = static_cast<std::size_t>(heads.num_classes);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < heads.num_locations; ++i) {
    const int k = pick(rng);
    for (int label = 1; label <= heads.num_classes; ++label) {
      const double score = heads.location_probs[i * c_count + static_cast<std::size_t>(label - 1)];
      if (score < cfg.pre_nms_score_thresh) continue;
      out.push_back({heads.refined[i * k_count + static_cast<std::size_t>(k)], label, score, i, k});
    }
  }
  return out;
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_thresh, int max_detections) {
  for (const Detection& d : dets) {
    if (!std::isfinite(d.score)) throw std::invalid_argument("nms: non-finite detection score");
  }
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.location != b.location) return a.location < b.location;
    if (a.anchor != b.anchor) return a.anchor < b.anchor;
    return a.label < b.label;
  });
  std::vector<Detection> kept;
  const std::size_t limit = max_detections > 0 ? static_cast<std::size_t>(max_detections) : 0;
  for (const Detection& d : dets) {
    if (kept.size() >= limit) break;
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.label == d.label && iou(k.box, d.box) >= iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> run_inference(const HeadOutputs& heads, const InferenceConfig& cfg) {
  return nms(select_anchors(heads, cfg), cfg.nms_iou_thresh, cfg.max_detections);
}

}  // namespace semianchor
