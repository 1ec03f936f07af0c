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

#include "semianchor/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace semianchor {
namespace {

auto box_key(const Box& b) { return std::make_tuple(b.x1, b.y1, b.x2, b.y2); }

// Canonical detection order: score descending, then image and coordinates, so
// that the result does not depend on the input order.
bool detection_before(const EvalDetection& a, const EvalDetection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return box_key(a.box) < box_key(b.box);
}

constexpr int kRecallPoints = 101;

}  // namespace

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  // (50 + 5i) / 100 rounds once, so each threshold is the double nearest its decimal value.
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

std::optional<double> category_average_precision(std::span<const EvalDetection> dets,
                                                 std::span<const EvalGroundTruth> gts,
                                                 int category, double iou_thresh, AreaRange area) {
  auto outside = [&](const Box& b) { return b.area() < area.min_area || b.area() > area.max_area; };

  // Ground truth per image, non-ignored first, then canonical box order.
  struct Gt {
    Box box;
    bool ignored;
    bool matched;
  };
  std::map<std::int64_t, std::vector<Gt>> gt_by_image;
  std::size_t num_counted = 0;
  for (const EvalGroundTruth& g : gts) {
    if (g.category != category) continue;
    const bool ignored = outside(g.box);
    num_counted += ignored ? 0 : 1;
    gt_by_image[g.image_id].push_back({g.box, ignored, false});
  }
  if (num_counted == 0) return std::nullopt;
  for (auto& [image, list] : gt_by_image) {
    std::sort(list.begin(), list.end(), [](const Gt& a, const Gt& b) {
      if (a.ignored != b.ignored) return !a.ignored;
      return box_key(a.box) < box_key(b.box);
    });
  }

  std::vector<EvalDetection> ordered;
  for (const EvalDetection& d : dets) {
    if (d.category == category) ordered.push_back(d);
  }
  std::sort(ordered.begin(), ordered.end(), detection_before);

  // Greedy matching; processing in global score order visits every image's
  // detections in its own score order as well.
  std::vector<int> outcome;  // 1 = true positive, 0 = false positive
  outcome.reserve(ordered.size());
  for (const EvalDetection& d : ordered) {
    auto it = gt_by_image.find(d.image_id);
    int match = -1;
    double best = iou_thresh;
    if (it != gt_by_image.end()) {
      std::vector<Gt>& list = it->second;
      for (std::size_t g = 0; g < list.size(); ++g) {
        if (list[g].matched) continue;
        // Once a counted box is matched, ignored boxes cannot take over.
        if (match >= 0 && !list[static_cast<std::size_t>(match)].ignored && list[g].ignored) break;
        const double v = iou(d.box, list[g].box);
        if (v < best || (match >= 0 && v == best)) continue;
        best = v;
        match = static_cast<int>(g);
      }
    }
    if (match >= 0) {
      Gt& g = it->second[static_cast<std::size_t>(match)];
      g.matched = true;
      if (!g.ignored) outcome.push_back(1);
    } else if (!outside(d.box)) {
      outcome.push_back(0);
    }
  }

  const std::size_t n = outcome.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    tp += outcome[j];
    fp += 1 - outcome[j];
    recall[j] = tp / static_cast<double>(num_counted);
    precision[j] = tp / (tp + fp);
  }
  for (std::size_t j = n; j-- > 1;) precision[j - 1] = std::max(precision[j - 1], precision[j]);

  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double threshold = r / 100.0;
    const auto pos = std::lower_bound(recall.begin(), recall.end(), threshold);
    if (pos != recall.end()) sum += precision[static_cast<std::size_t>(pos - recall.begin())];
  }
  return sum / kRecallPoints;
}

namespace {

std::set<int> gt_categories(std::span<const EvalGroundTruth> gts) {
  std::set<int> cats;
  for (const EvalGroundTruth& g : gts) cats.insert(g.category);
  return cats;
}

// Mean over categories with counted ground truth; nullopt if there are none.
std::optional<double> mean_over_categories(std::span<const EvalDetection> dets,
                                           std::span<const EvalGroundTruth> gts,
                                           const std::set<int>& cats, double iou_thresh,
                                           AreaRange area) {
  double sum = 0.0;
  int count = 0;
  for (int c : cats) {
    if (auto ap = category_average_precision(dets, gts, c, iou_thresh, area)) {
      sum += *ap;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

double banded_ap(std::span<const EvalDetection> dets, std::span<const EvalGroundTruth> gts,
                 const std::set<int>& cats, AreaRange area) {
  double sum = 0.0;
  for (double t : coco_iou_thresholds()) {
    auto ap = mean_over_categories(dets, gts, cats, t, area);
    if (!ap) return -1.0;
    sum += *ap;
  }
  return sum / 10.0;
}

}  // namespace

double average_precision(std::span<const EvalDetection> dets, std::span<const EvalGroundTruth> gts,
                         double iou_thresh) {
  auto ap = mean_over_categories(dets, gts, gt_categories(gts), iou_thresh, {});
  if (!ap) throw std::invalid_argument("average_precision: no ground truth to evaluate against");
  return *ap;
}

EvalReport map_report(std::span<const EvalDetection> dets, std::span<const EvalGroundTruth> gts) {
  if (gts.empty()) throw std::invalid_argument("map_report: the dataset has no ground truth");
  const std::set<int> cats = gt_categories(gts);
  const std::vector<double> thresholds = coco_iou_thresholds();

  EvalReport report;
  report.num_gt = gts.size();
  report.num_detections = dets.size();
  for (int c : cats) report.per_category[c] = 0.0;
  double ap_sum = 0.0;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    double mean = 0.0;
    for (int c : cats) {
      const double ap = *category_average_precision(dets, gts, c, thresholds[t]);
      report.per_category[c] += ap / static_cast<double>(thresholds.size());
      mean += ap;
    }
    mean /= static_cast<double>(cats.size());
    ap_sum += mean;
    if (t == 0) report.ap50 = mean;
    if (t == 5) report.ap75 = mean;
  }
  report.ap = ap_sum / static_cast<double>(thresholds.size());
  report.ap_small = banded_ap(dets, gts, cats, {0.0, 32.0 * 32.0});
  report.ap_medium = banded_ap(dets, gts, cats, {32.0 * 32.0, 96.0 * 96.0});
  report.ap_large = banded_ap(dets, gts, cats, {96.0 * 96.0, 1e10});
  return report;
}

std::string format_eval_table(const EvalReport& r) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s\n", "metric", "value");
  os << line;
  auto row = [&](const char* name, double v) {
    if (v < 0.0) {
      std::snprintf(line, sizeof(line), "%-10s %8s\n", name, "n/a");
    } else {
      std::snprintf(line, sizeof(line), "%-10s %8.4f\n", name, v);
    }
    os << line;
  };
  row("AP", r.ap);
  row("AP50", r.ap50);
  row("AP75", r.ap75);
  row("AP_S", r.ap_small);
  row("AP_M", r.ap_medium);
  row("AP_L", r.ap_large);
  for (const auto& [c, v] : r.per_category) {
    const std::string name = "AP[" + std::to_string(c) + "]";
    row(name.c_str(), v);
  }
  std::snprintf(line, sizeof(line), "%-10s %8zu\n%-10s %8zu\n", "num_gt", r.num_gt, "num_det",
                r.num_detections);
  os << line;
  return os.str();
}

std::string format_eval_text(const EvalReport& r) {
  std::ostringstream os;
  char line[96];
  auto put = [&](const std::string& key, double v) {
    std::snprintf(line, sizeof(line), "%s %.6g\n", key.c_str(), v);
    os << line;
  };
  put("ap", r.ap);
  put("ap50", r.ap50);
  put("ap75", r.ap75);
  put("ap_small", r.ap_small);
  put("ap_medium", r.ap_medium);
  put("ap_large", r.ap_large);
  for (const auto& [c, v] : r.per_category) put("ap_category_" + std::to_string(c), v);
  os << "num_gt " << r.num_gt << "\nnum_detections " << r.num_detections << "\n";
  return os.str();
}

double ImbalanceStats::anchor_positive_fraction() const {
  const auto total = anchor_positive + anchor_negative;
  return total == 0 ? 0.0 : static_cast<double>(anchor_positive) / static_cast<double>(total);
}

double ImbalanceStats::location_positive_fraction() const {
  const auto total = location_positive + location_negative;
  return total == 0 ? 0.0 : static_cast<double>(location_positive) / static_cast<double>(total);
}

double ImbalanceStats::anchor_ratio() const {
  if (anchor_positive == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(anchor_negative) / static_cast<double>(anchor_positive);
}

double ImbalanceStats::location_ratio() const {
  if (location_positive == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(location_negative) / static_cast<double>(location_positive);
}

ImbalanceStats& ImbalanceStats::operator+=(const ImbalanceStats& o) {
  anchor_positive += o.anchor_positive;
  anchor_negative += o.anchor_negative;
  location_positive += o.location_positive;
  location_negative += o.location_negative;
  return *this;
}

ImbalanceStats imbalance_stats(const AnchorLabels& anchors,
                               std::span<const LocationTarget> locations) {
  ImbalanceStats s;
  for (int l : anchors.label) (l > 0 ? s.anchor_positive : s.anchor_negative) += 1;
  for (const LocationTarget& t : locations) (t.positive() ? s.location_positive : s.location_negative) += 1;
  return s;
}

std::string format_imbalance(const ImbalanceStats& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "anchor_positive %llu\nanchor_negative %llu\nanchor_ratio 1:%.6g\n"
                "location_positive %llu\nlocation_negative %llu\nlocation_ratio 1:%.6g\n",
                static_cast<unsigned long long>(s.anchor_positive),
                static_cast<unsigned long long>(s.anchor_negative), s.anchor_ratio(),
                static_cast<unsigned long long>(s.location_positive),
                static_cast<unsigned long long>(s.location_negative), s.location_ratio());
  return buf;
}

}  // namespace semianchor
