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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semianchor/evaluation.hpp"
#include "semianchor/inference.hpp"
#include "semianchor/toy_model.hpp"

namespace semianchor {

enum class Assigner { kSemiAnchored, kFcos, kFcosShrink };

const char* assigner_name(Assigner a);
std::optional<Assigner> parse_assigner(const std::string& name);

struct TrainConfig {
  std::uint64_t seed = 1;
  int steps = 3000;
  double lr = 0.02;
  double momentum = 0.9;
  // Gradient-norm clip applied to each head separately; 0 disables it.
  double grad_clip = 1.0;
  int batch_size = 8;
  AnchorSpec anchors;  // 5 scales x 5 aspects, stride 8
  AnchorThresholds thresholds;
  LocationRule location_rule;
  Assigner assigner = Assigner::kSemiAnchored;
  double fcos_shrink = 0.5;  // used by kFcosShrink
  LossConfig loss;           // loss.sigma is the soft-label exponent
  double ac_iou_thresh = 0.5;
  bool unit_soft_labels = false;
  bool ac_head = true;
  int num_train_images = 64;
  int num_test_images = 32;
  SceneConfig scene;
  double init_scale = 0.01;
  InferenceConfig inference;

  void validate() const;
  AcTargetParams ac_params() const { return {ac_iou_thresh, loss.sigma, unit_soft_labels}; }
  ObjectiveOptions objective() const { return {loss, ac_params(), ac_head}; }
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Independent streams derived from the run seed. Datasets depend only on the
// seed, so configurations trained with the same seed see the same scenes.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

AnchorGrid grid_for_scene(const AnchorSpec& spec, const SceneConfig& scene);

std::vector<LocationTarget> location_targets(const TrainConfig& cfg, const AnchorGrid& grid,
                                             const GroundTruth& gt, const AnchorLabels& labels);

PreparedImage prepare_image(const SyntheticScene& scene, const AnchorGrid& grid,
                            const TrainConfig& cfg);

struct Momentum {
  ToyModel velocity;
};

// One SGD step with momentum on `batch`; returns the loss before the update.
// Throws std::domain_error when the loss is not finite.
LossReport train_step(ToyModel& model, Momentum& state, std::span<const PreparedImage* const> batch,
                      const AnchorGrid& grid, const TrainConfig& cfg);

using StepCallback = std::function<void(int step, const LossReport&)>;

struct TrainResult {
  ToyModel model;
  std::vector<LossReport> history;
};

TrainResult train(const TrainConfig& cfg, const std::vector<SyntheticScene>& scenes,
                  const StepCallback& on_step = {});

// Detections for every scene. With the anchor classifier disabled, each
// location contributes one uniformly drawn anchor scored by its location
// probability (seeded by `random_seed` and the scene index).
struct EvalOptions {
  InferenceConfig inference;
  bool use_ac_head = true;
  std::uint64_t random_seed = 0;
};

std::vector<EvalDetection> detect(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                                  const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                  const EvalOptions& options);

std::vector<EvalGroundTruth> ground_truth_of(const std::vector<SyntheticScene>& scenes);

EvalReport evaluate_model(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                          const AnchorGrid& grid, const SceneConfig& scene_cfg,
                          const EvalOptions& options);

// Best AP over `repetitions` random-anchor draws, as reported for a detector
// trained without the anchor classifier.
EvalReport evaluate_random_anchor_best(const ToyModel& model,
                                       const std::vector<SyntheticScene>& scenes,
                                       const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                       const InferenceConfig& inference, std::uint64_t seed,
                                       int repetitions = 10);

// Best AP over `repetitions` random-anchor draws together with the detections
// of the winning draw.
struct RandomAnchorEval {
  EvalReport report;
  std::vector<EvalDetection> detections;
};
RandomAnchorEval evaluate_random_anchor(const ToyModel& model, const std::vector<SyntheticScene>& scenes,
                                        const AnchorGrid& grid, const SceneConfig& scene_cfg,
                                        const InferenceConfig& inference, std::uint64_t seed,
                                        int repetitions = 10);

struct Experiment {
  TrainResult training;
  EvalReport eval;
  std::vector<EvalDetection> detections;  // the test-set detections behind `eval`
};

// Train on the seed's training scenes and evaluate on its test scenes.
Experiment run_experiment(const TrainConfig& cfg, const StepCallback& on_step = {});

std::vector<SyntheticScene> training_scenes(const TrainConfig& cfg);
std::vector<SyntheticScene> test_scenes(const TrainConfig& cfg);

}  // namespace semianchor
