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
#include <map>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/geometry.hpp"

namespace semianchor {

// Synthetic detection scenes. Object classes are shape categories: the class
// fixes the aspect-ratio band of the box (1: square, 2: wide, 3: tall,
// 4: mildly wide, 5: mildly tall).
struct SceneConfig {
  int image_size = 96;
  int num_classes = 3;
  // 0: one object at the image center; 1: 1-3 objects; 2: 1-6 objects.
  int difficulty = 1;
  double min_object_size = 16.0;  // square root of the box area
  double max_object_size = 56.0;
  double max_pair_iou = 0.3;
  double feature_noise = 0.05;
  // Anchor-local box evidence is observed with noise of standard deviation
  // evidence_noise + mismatch_noise * (1 - IoU(anchor, object)).
  double evidence_noise = 0.04;
  double mismatch_noise = 0.0;
  // Corner evidence saturates at this many anchor widths/heights, so an anchor
  // far from the object's shape cannot see where its corners are.
  double evidence_reach = 0.3;

  void validate() const;
  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

struct SyntheticScene {
  int width = 0;
  int height = 0;
  GroundTruth gt;
  std::uint64_t noise_seed = 0;
};

std::vector<SyntheticScene> generate_dataset(std::uint64_t seed, int num_images,
                                             const SceneConfig& cfg);

struct DatasetSummary {
  double mean_objects = 0.0;
  std::map<int, int> class_histogram;
  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};
DatasetSummary summarize(const std::vector<SyntheticScene>& scenes);

// Dense features of one scene on one anchor grid.
//   location features x_i (dimension 2C + 2):
//     [0, C)      class-c indicator of the object whose box holds the location
//     [C, 2C)     class-c centerness of that object
//     2C + 0..1   log object width and height / base size
//   anchor features z_{i,k} (dimension 2C + 11): x_i, then
//     log anchor width and height / base size,
//     the object's corners relative to the anchor's (noisy, scaled by the
//     anchor extent), |log| width and height ratios object/anchor, and the
//     anchor-object IoU.
// Every entry carries Gaussian noise drawn from the scene's noise seed.
struct SceneFeatures {
  int location_dim = 0;
  int anchor_dim = 0;
  std::vector<double> location;  // locations x location_dim
  std::vector<double> anchor;    // anchors x anchor_dim
  std::vector<int> owner;        // object index per location, -1 for none

  const double* location_row(std::size_t i) const {
    return location.data() + i * static_cast<std::size_t>(location_dim);
  }
  const double* anchor_row(std::size_t a) const {
    return anchor.data() + a * static_cast<std::size_t>(anchor_dim);
  }
};

int location_feature_dim(int num_classes);
int anchor_feature_dim(int num_classes);

SceneFeatures build_features(const SyntheticScene& scene, const AnchorGrid& grid,
                             const SceneConfig& cfg);

}  // namespace semianchor
