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

#include "semianchor/ablation.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace semianchor {
namespace {

struct Setting {
  std::string name;
  TrainConfig cfg;
};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<Setting> settings_for(AblationAxis axis, const TrainConfig& base) {
  std::vector<Setting> out;
  switch (axis) {
    case AblationAxis::kAcHead: {
      TrainConfig on = base;
      on.ac_head = true;
      on.inference = InferenceConfig::top(1);
      TrainConfig off = base;
      off.ac_head = false;
      out.push_back({"ac_head", on});
      out.push_back({"no_ac_best_of_10", off});
      break;
    }
    case AblationAxis::kSigma: {
      TrainConfig unit = base;
      unit.unit_soft_labels = true;
      out.push_back({"unit", unit});
      for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        TrainConfig c = base;
        c.loss.sigma = s;
        out.push_back({"sigma" + fixed(s), c});
      }
      break;
    }
    case AblationAxis::kGamma: {
      TrainConfig simple = base;
      simple.location_rule = LocationRule::simplified();
      out.push_back({"simplified", simple});
      const double k = base.anchors.anchors_per_location();
      for (double g : {1.0 / (k + 1.0), 0.1, 0.2}) {
        TrainConfig c = base;
        c.location_rule = LocationRule::threshold_moving(g);
        out.push_back({"gamma" + fixed(g), c});
      }
      break;
    }
    case AblationAxis::kAnchors: {
      for (int n : {1, 3, 5}) {
        TrainConfig c = base;
        c.anchors.num_scales = n;
        c.anchors.num_aspects = n;
        out.push_back({"K" + std::to_string(n * n), c});
      }
      break;
    }
    case AblationAxis::kStrategy:
      break;
  }
  return out;
}

}  // namespace

const char* axis_name(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kAcHead:
      return "ac_head";
    case AblationAxis::kStrategy:
      return "strategy";
    case AblationAxis::kSigma:
      return "sigma";
    case AblationAxis::kGamma:
      return "gamma";
    case AblationAxis::kAnchors:
      return "K";
  }
  return "?";
}

std::optional<AblationAxis> parse_axis(const std::string& name) {
  if (name == "ac_head" || name == "ac") return AblationAxis::kAcHead;
  if (name == "strategy") return AblationAxis::kStrategy;
  if (name == "sigma") return AblationAxis::kSigma;
  if (name == "gamma") return AblationAxis::kGamma;
  if (name == "K" || name == "k" || name == "anchors") return AblationAxis::kAnchors;
  return std::nullopt;
}

double AblationRow::mean_ap() const {
  double s = 0.0;
  for (const EvalReport& r : reports) s += r.ap;
  return reports.empty() ? 0.0 : s / static_cast<double>(reports.size());
}

double AblationRow::mean_ap50() const {
  double s = 0.0;
  for (const EvalReport& r : reports) s += r.ap50;
  return reports.empty() ? 0.0 : s / static_cast<double>(reports.size());
}

const AblationRow& AblationTable::row(const std::string& setting) const {
  for (const AblationRow& r : rows) {
    if (r.setting == setting) return r;
  }
  throw std::out_of_range("ablation table has no setting " + setting);
}

AblationTable run_ablation(AblationAxis axis, const TrainConfig& base,
                           std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_ablation: no seeds");
  base.validate();
  AblationTable table;
  table.axis = axis;
  table.seeds.assign(seeds.begin(), seeds.end());

  if (axis == AblationAxis::kStrategy) {
    const std::vector<std::pair<std::string, InferenceConfig>> decoders = {
        {"top1", InferenceConfig::top(1)},   {"top2", InferenceConfig::top(2)},
        {"top5", InferenceConfig::top(5)},   {"pos0.1", InferenceConfig::pos(0.1)},
        {"pos0.5", InferenceConfig::pos(0.5)}, {"pos0", InferenceConfig::pos(0.0)}};
    for (const auto& d : decoders) table.rows.push_back({d.first, {}});
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.seed = seed;
      cfg.ac_head = true;
      const TrainResult trained = train(cfg, training_scenes(cfg));
      const auto test = test_scenes(cfg);
      const AnchorGrid grid = grid_for_scene(cfg.anchors, cfg.scene);
      for (std::size_t n = 0; n < decoders.size(); ++n) {
        InferenceConfig ic = decoders[n].second;
        ic.nms_iou_thresh = base.inference.nms_iou_thresh;
        ic.pre_nms_score_thresh = base.inference.pre_nms_score_thresh;
        ic.max_detections = base.inference.max_detections;
        table.rows[n].reports.push_back(evaluate_model(trained.model, test, grid, cfg.scene, {ic, true, 0}));
      }
    }
    return table;
  }

  for (const Setting& s : settings_for(axis, base)) {
    AblationRow row{s.name, {}};
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = s.cfg;
      cfg.seed = seed;
      row.reports.push_back(run_experiment(cfg).eval);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_ablation(const AblationTable& table) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "axis %s seeds", axis_name(table.axis));
  os << line;
  for (std::uint64_t s : table.seeds) os << ' ' << s;
  os << '\n';
  std::snprintf(line, sizeof(line), "%-18s %8s %8s %8s  %s\n", "setting", "AP", "AP50", "AP75", "AP per seed");
  os << line;
  for (const AblationRow& r : table.rows) {
    double ap75 = 0.0;
    for (const EvalReport& e : r.reports) ap75 += e.ap75;
    ap75 /= static_cast<double>(r.reports.size());
    std::snprintf(line, sizeof(line), "%-18s %8.4f %8.4f %8.4f ", r.setting.c_str(), r.mean_ap(), r.mean_ap50(), ap75);
    os << line;
    for (const EvalReport& e : r.reports) {
      std::snprintf(line, sizeof(line), " %.4f", e.ap);
      os << line;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace semianchor
