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

#include "semianchor/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "semianchor/kernels.hpp"

namespace semianchor {

const char* assigner_name(Assigner a) {
  switch (a) {
    case Assigner::kSemiAnchored:
      return "semi_anchored";
    case Assigner::kFcos:
      return "fcos";
    case Assigner::kFcosShrink:
      return "fcos_shrink";
  }
  return "?";
}

std::optional<Assigner> parse_assigner(const std::string& name) {
  if (name == "semi_anchored" || name == "semi-anchored") return Assigner::kSemiAnchored;
  if (name == "fcos") return Assigner::kFcos;
  if (name == "fcos_shrink" || name == "fcos-shrink") return Assigner::kFcosShrink;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(grad_clip >= 0.0)) throw std::invalid_argument("grad_clip must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (num_train_images < 1 || num_test_images < 1) {
    throw std::invalid_argument("image counts must be >= 1");
  }
  if (!(fcos_shrink > 0.0 && fcos_shrink <= 1.0)) throw std::invalid_argument("fcos_shrink must lie in (0, 1]");
  if (ac_iou_thresh < 0.0 || ac_iou_thresh > 1.0) throw std::invalid_argument("ac_iou_thresh must lie in [0, 1]");
  if (!(thresholds.bg >= 0.0 && thresholds.bg <= thresholds.fg && thresholds.fg <= 1.0)) {
    throw std::invalid_argument("anchor thresholds must satisfy 0 <= bg <= fg <= 1");
  }
  if (location_rule.kind == LocationRule::Kind::kThresholdMoving &&
      !(location_rule.gamma >= 0.0 && location_rule.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be non-negative");
  anchors.validate();
  loss.validate();
  scene.validate();
  inference.validate();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

enum Stream : std::uint64_t { kTrainData = 1, kTestData = 2, kInit = 3, kShuffle = 4, kRandomAnchor = 5 };

// Rescales one head's gradient to norm at most `clip`.
void clip_head(std::vector<double>& w, std::vector<double>& b, double clip) {
  const double sq = kernels::dot(w.data(), w.data(), w.size()) + kernels::dot(b.data(), b.data(), b.size());
  const double norm = std::sqrt(sq);
  if (!(norm > clip)) return;
  kernels::scale(clip / norm, w.data(), w.data(), w.size());
  kernels::scale(clip / norm, b.data(), b.data(), b.size());
}

}  // namespace

AnchorGrid grid_for_scene(const AnchorSpec& spec, const SceneConfig& scene) {
  const auto dims = level_dims_for_image(spec, scene.image_size, scene.image_size);
  return build_anchor_grid(spec, dims);
}

std::vector<LocationTarget> location_targets(const TrainConfig& cfg, const AnchorGrid& grid,
                                             const GroundTruth& gt, const AnchorLabels& labels) {
  const int c = cfg.scene.num_classes;
  switch (cfg.assigner) {
    case Assigner::kSemiAnchored:
      return assign_locations(grid, labels, c, cfg.location_rule);
    case Assigner::kFcos:
      return location_targets_from_labels(label_locations_fcos(grid, gt, 1.0), c);
    case Assigner::kFcosShrink:
      return location_targets_from_labels(label_locations_fcos(grid, gt, cfg.fcos_shrink), c);
  }
  throw std::logic_error("unknown assigner");
}

PreparedImage prepare_image(const SyntheticScene& scene, const AnchorGrid& grid,
                            const TrainConfig& cfg) {
  PreparedImage p;
  p.scene = &scene;
  p.features = build_features(scene, grid, cfg.scene);
  p.anchor_labels = label_anchors(grid, scene.gt, cfg.thresholds);
  p.locations = location_targets(cfg, grid, scene.gt, p.anchor_labels);
  p.regression = regression_targets(grid, p.locations, scene.gt);
  return p;
}

LossReport train_step(ToyModel& model, Momentum& state, std::span<const PreparedImage* const> batch,
                      const AnchorGrid& grid, const TrainConfig& cfg) {
  const LossEvaluation eval = evaluate_objective(model, batch, grid, cfg.objective());
  if (!std::isfinite(eval.report.total)) throw std::domain_error("train_step: non-finite loss");
  if (state.velocity.num_parameters() != model.num_parameters()) {
    state.velocity = ToyModel::zeros(model.num_classes, model.location_dim, model.anchor_dim);
  }
  ToyModel grad = eval.grad;
  if (cfg.grad_clip > 0.0) {
    clip_head(grad.cls_w, grad.cls_b, cfg.grad_clip);
    clip_head(grad.reg_w, grad.reg_b, cfg.grad_clip);
    clip_head(grad.ac_w, grad.ac_b, cfg.grad_clip);
  }
  const std::vector<double> g = grad.flatten();
  std::vector<double> v = state.velocity.flatten();
  std::vector<double> w = model.flatten();
  kernels::scale(cfg.momentum, v.data(), v.data(), v.size());
  kernels::axpy(1.0, g.data(), v.data(), v.size());
  kernels::axpy(-cfg.lr, v.data(), w.data(), w.size());
  state.velocity.assign(v);
  model.assign(w);
  if (!model.finite()) throw std::domain_error("train_step: parameters became non-finite");
  return eval.report;
}

TrainResult train(const TrainConfig& cfg, const std::vector<SyntheticScene>& scenes,
                  const StepCallback& on_step) {
  cfg.validate();
  if (scenes.empty()) throw std::invalid_argument("train: no training scenes");
  const AnchorGrid grid = grid_for_scene(cfg.anchors, cfg.scene);
  std::vector<PreparedImage> prepared;
  prepared.reserve(scenes.size());
  for (const SyntheticScene& s : scenes) prepared.push_back(prepare_image(s, grid, cfg));

  const int c = cfg.scene.num_classes;
  TrainResult result;
  result.model = ToyModel::initial(c, location_feature_dim(c), anchor_feature_dim(c),
                                   derive_seed(cfg.seed, kInit), cfg.init_scale);
  Momentum state;

  std::mt19937_64 rng(derive_seed(cfg.seed, kShuffle));
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();
  const std::size_t batch_size = std::min(order.size(), static_cast<std::size_t>(cfg.batch_size));
  std::vector<const PreparedImage*> batch;
  for (int step = 0; step < cfg.steps; ++step) {
    batch.clear();
    while (batch.size() < batch_size) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(&prepared[order[cursor++]]);
    }
    const LossReport report = train_step(result.model, state, batch, grid, cfg);
    result.history.push_back(report);
    if (on_step) on_step(step, report);
  }
  return result;
}

std::vector<EvalDetection> detect(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                                  const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                  const EvalOptions& options) {
  std::vector<EvalDetection> out;
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    const SceneFeatures features = build_features(scenes[n], grid, scene_cfg);
    const HeadOutputs heads = head_outputs(forward(model, features, grid), grid, model.num_classes);
    std::vector<Detection> dets;
    if (options.use_ac_head) {
      dets = run_inference(heads, options.inference);
    } else {
      dets = nms(select_random_anchor(heads, options.inference, derive_seed(options.random_seed, n)),
                 options.inference.nms_iou_thresh, options.inference.max_detections);
    }
    for (const Detection& d : dets) {
      out.push_back({static_cast<std::int64_t>(n), d.label, d.box, d.score});
    }
  }
  return out;
}

std::vector<EvalGroundTruth> ground_truth_of(const std::vector<SyntheticScene>& scenes) {
  std::vector<EvalGroundTruth> out;
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    for (const GtBox& g : scenes[n].gt) out.push_back({static_cast<std::int64_t>(n), g.label, g.box});
  }
  return out;
}

EvalReport evaluate_model(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                          const AnchorGrid& grid, const SceneConfig& scene_cfg,
                          const EvalOptions& options) {
  const auto dets = detect(model, scenes, grid, scene_cfg, options);
  const auto gts = ground_truth_of(scenes);
  return map_report(dets, gts);
}

RandomAnchorEval evaluate_random_anchor(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                                        const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                        const InferenceConfig& inference, std::uint64_t seed,
                                        int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  const auto gts = ground_truth_of(scenes);
  RandomAnchorEval best;
  for (int r = 0; r < repetitions; ++r) {
    EvalOptions opts{inference, false, derive_seed(seed, static_cast<std::uint64_t>(r))};
    auto dets = detect(model, scenes, grid, scene_cfg, opts);
    EvalReport rep = map_report(dets, gts);
    if (r == 0 || rep.ap > best.report.ap) best = {std::move(rep), std::move(dets)};
  }
  return best;
}

EvalReport evaluate_random_anchor_best(const ToyModel& model,
                                       const std::vector<SyntheticScene>& scenes,
                                       const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                       const InferenceConfig& inference, std::uint64_t seed,
                                       int repetitions) {
  return evaluate_random_anchor(model, scenes, grid, scene_cfg, inference, seed, repetitions).report;
}

std::vector<SyntheticScene> training_scenes(const TrainConfig& cfg) {
  return generate_dataset(derive_seed(cfg.seed, kTrainData), cfg.num_train_images, cfg.scene);
}

std::vector<SyntheticScene> test_scenes(const TrainConfig& cfg) {
  return generate_dataset(derive_seed(cfg.seed, kTestData), cfg.num_test_images, cfg.scene);
}

Experiment run_experiment(const TrainConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  const auto train_set = training_scenes(cfg);
  const auto test_set = test_scenes(cfg);
  Experiment e;
  e.training = train(cfg, train_set, on_step);
  const AnchorGrid grid = grid_for_scene(cfg.anchors, cfg.scene);
  if (cfg.ac_head) {
    e.detections = detect(e.training.model, test_set, grid, cfg.scene, {cfg.inference, true, 0});
    e.eval = map_report(e.detections, ground_truth_of(test_set));
  } else {
    RandomAnchorEval best = evaluate_random_anchor(e.training.model, test_set, grid, cfg.scene, cfg.inference,
                                                   derive_seed(cfg.seed, kRandomAnchor));
    e.eval = std::move(best.report);
    e.detections = std::move(best.detections);
  }
  return e;
}

}  // namespace semianchor
