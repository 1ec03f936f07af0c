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

#include "oracles/ap_oracle.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "oracles/loss_oracle.hpp"

namespace oracle {
namespace {

using semianchor::EvalDetection;
using semianchor::EvalGroundTruth;

double iou_of(const semianchor::Box& a, const semianchor::Box& b) {
  const double pa[4] = {a.x1, a.y1, a.x2, a.y2};
  const double pb[4] = {b.x1, b.y1, b.x2, b.y2};
  return box_iou(pa, pb);
}

auto key(const semianchor::Box& b) { return std::make_tuple(b.x1, b.y1, b.x2, b.y2); }

// True positives among the first n detections.
int true_positives(const std::vector<EvalDetection>& ordered, std::size_t n,
                   const std::vector<EvalGroundTruth>& gts, double thresh) {
  std::vector<bool> used(gts.size(), false);
  int tp = 0;
  for (std::size_t d = 0; d < n; ++d) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image_id != ordered[d].image_id) continue;
      const double v = iou_of(ordered[d].box, gts[g].box);
      if (v < thresh) continue;
      if (v > best_iou || (v == best_iou && key(gts[g].box) < key(gts[static_cast<std::size_t>(best)].box))) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      ++tp;
    }
  }
  return tp;
}

}  // namespace

double category_ap(const std::vector<EvalDetection>& dets, const std::vector<EvalGroundTruth>& gts,
                   int category, double iou_thresh) {
  std::vector<EvalDetection> ordered;
  for (const auto& d : dets) {
    if (d.category == category) ordered.push_back(d);
  }
  std::vector<EvalGroundTruth> own;
  for (const auto& g : gts) {
    if (g.category == category) own.push_back(g);
  }
  std::sort(ordered.begin(), ordered.end(), [](const EvalDetection& a, const EvalDetection& b) {
    return std::make_tuple(-a.score, a.image_id, key(a.box)) < std::make_tuple(-b.score, b.image_id, key(b.box));
  });
  const long long total = static_cast<long long>(own.size());

  std::vector<long long> tps;
  std::vector<double> precisions;
  for (std::size_t n = 1; n <= ordered.size(); ++n) {
    const int tp = true_positives(ordered, n, own, iou_thresh);
    tps.push_back(tp);
    precisions.push_back(static_cast<double>(tp) / static_cast<double>(n));
  }
  double sum = 0.0;
  for (long long r = 0; r <= 100; ++r) {
    double best = 0.0;
    for (std::size_t j = 0; j < tps.size(); ++j) {
      if (100 * tps[j] >= r * total) best = std::max(best, precisions[j]);
    }
    sum += best;
  }
  return sum / 101.0;
}

Summary summarize(const std::vector<EvalDetection>& dets, const std::vector<EvalGroundTruth>& gts) {
  std::set<int> cats;
  for (const auto& g : gts) cats.insert(g.category);
  auto mean_at = [&](double t) {
    double s = 0.0;
    for (int c : cats) s += category_ap(dets, gts, c, t);
    return s / static_cast<double>(cats.size());
  };
  Summary out;
  double total = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double t = (50 + 5 * i) / 100.0;
    const double v = mean_at(t);
    total += v;
    if (i == 0) out.ap50 = v;
    if (i == 5) out.ap75 = v;
  }
  out.ap = total / 10.0;
  return out;
}

}  // namespace oracle
