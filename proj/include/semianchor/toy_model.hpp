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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/inference.hpp"
#include "semianchor/losses.hpp"
#include "semianchor/synthetic.hpp"

namespace semianchor {

// Three linear heads with logistic links where probabilities are needed:
//   location classifier  p_{i,c} = sigmoid(w_c . x_i + b_c)
//   box regressor        o_{i,k} = W z_{i,k} + b  (4 corner offsets in anchor units)
//   anchor classifier    p_{i,k} = sigmoid(u . z_{i,k} + c)
struct ToyModel {
  int num_classes = 0;
  int location_dim = 0;
  int anchor_dim = 0;
  std::vector<double> cls_w, cls_b;  // C x Dx, C
  std::vector<double> reg_w, reg_b;  // 4 x Dz, 4
  std::vector<double> ac_w, ac_b;    // Dz, 1

  static ToyModel zeros(int num_classes, int location_dim, int anchor_dim);
  // Small Gaussian weights, zero biases except the location prior bias.
  static ToyModel initial(int num_classes, int location_dim, int anchor_dim, std::uint64_t seed,
                          double scale = 0.01);

  std::size_t num_parameters() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool finite() const;
};

// Smallest width/height a refined box may have.
inline constexpr double kMinBoxExtent = 1e-3;

struct ForwardResult {
  std::vector<double> location_logits;  // locations x C
  std::vector<double> location_probs;
  std::vector<double> offsets;          // anchors x 4
  BoxArray refined;
  std::vector<unsigned char> clamped_x, clamped_y;  // extent clamp hit, per anchor
  std::vector<double> anchor_logits;
  std::vector<double> anchor_probs;
};

ForwardResult forward(const ToyModel& model, const SceneFeatures& features, const AnchorGrid& grid);

// Refined box from an anchor and corner offsets in anchor units; enforces the
// minimum extent by moving the far corner.
Box apply_offsets(const Box& anchor, const double* offsets, bool* clamped_x, bool* clamped_y);

HeadOutputs head_outputs(const ForwardResult& fwd, const AnchorGrid& grid, int num_classes);

// Everything about one training image that does not depend on the model.
struct PreparedImage {
  const SyntheticScene* scene = nullptr;
  SceneFeatures features;
  AnchorLabels anchor_labels;
  std::vector<LocationTarget> locations;
  std::vector<RegressionTarget> regression;
};

struct LossEvaluation {
  LossReport report;
  ToyModel grad;  // same shapes as the model
  std::vector<std::vector<AnchorTarget>> ac_targets;  // per image, as used
};

struct ObjectiveOptions {
  LossConfig loss;
  AcTargetParams ac;
  bool ac_head = true;
};

// Total loss over a batch and its gradient with respect to every parameter.
// Anchor-classifier targets are rebuilt from the current refined boxes unless
// `frozen_ac_targets` is supplied; either way they are constants for the
// derivative. Normalizers are taken over the whole batch.
LossEvaluation evaluate_objective(const ToyModel& model, std::span<const PreparedImage* const> batch,
                                  const AnchorGrid& grid, const ObjectiveOptions& options,
                                  const std::vector<std::vector<AnchorTarget>>* frozen_ac_targets = nullptr);

// Text checkpoint: a version header, the dimensions, then one parameter per
// line printed with 17 significant digits.
void write_checkpoint(const ToyModel& model, std::ostream& os);
ToyModel read_checkpoint(std::istream& is);

}  // namespace semianchor
