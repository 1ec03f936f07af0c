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

#include "semianchor/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace semianchor {
namespace {

struct AspectBand {
  double lo;
  double hi;
};

// height / width band per class.
AspectBand aspect_band(int label) {
  switch (label) {
    case 1:
      return {0.8, 1.25};
    case 2:
      return {1.0 / 3.0, 0.5};
    case 3:
      return {2.0, 3.0};
    case 4:
      return {0.5, 0.8};
    default:
      return {1.25, 2.0};
  }
}

GtBox sample_object(std::mt19937_64& rng, const SceneConfig& cfg, bool centered) {
  std::uniform_int_distribution<int> class_dist(1, cfg.num_classes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w_img = cfg.image_size;
  for (;;) {
    const int label = class_dist(rng);
    const AspectBand band = aspect_band(label);
    const double ratio = std::exp(std::log(band.lo) + unit(rng) * (std::log(band.hi) - std::log(band.lo)));
    const double size = cfg.min_object_size + unit(rng) * (cfg.max_object_size - cfg.min_object_size);
    const double w = size / std::sqrt(ratio);
    const double h = size * std::sqrt(ratio);
    if (w >= w_img - 2.0 || h >= w_img - 2.0) continue;
    double cx = 0.5 * w_img;
    double cy = 0.5 * w_img;
    if (!centered) {
      cx = 0.5 * w + unit(rng) * (w_img - w);
      cy = 0.5 * h + unit(rng) * (w_img - h);
    }
    return {{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h}, label};
  }
}

}  // namespace

void SceneConfig::validate() const {
  if (image_size < 16) throw std::invalid_argument("image_size must be at least 16");
  if (num_classes < 1 || num_classes > 5) throw std::invalid_argument("num_classes must lie in 1..5");
  if (difficulty < 0 || difficulty > 2) throw std::invalid_argument("difficulty must lie in 0..2");
  if (!(min_object_size > 0.0 && min_object_size <= max_object_size)) {
    throw std::invalid_argument("object size range is empty");
  }
  if (feature_noise < 0.0 || evidence_noise < 0.0 || mismatch_noise < 0.0) {
    throw std::invalid_argument("noise levels must be non-negative");
  }
}

std::vector<SyntheticScene> generate_dataset(std::uint64_t seed, int num_images,
                                             const SceneConfig& cfg) {
  if (num_images < 1) throw std::invalid_argument("num_images must be >= 1");
  cfg.validate();
  std::mt19937_64 rng(seed);
  const int max_objects = cfg.difficulty == 2 ? 6 : 3;
  std::vector<SyntheticScene> scenes;
  scenes.reserve(static_cast<std::size_t>(num_images));
  for (int n = 0; n < num_images; ++n) {
    SyntheticScene scene;
    scene.width = cfg.image_size;
    scene.height = cfg.image_size;
    scene.noise_seed = rng();
    if (cfg.difficulty == 0) {
      scene.gt.push_back(sample_object(rng, cfg, true));
    } else {
      const int target = std::uniform_int_distribution<int>(1, max_objects)(rng);
      for (int attempt = 0; attempt < 50 * target && static_cast<int>(scene.gt.size()) < target; ++attempt) {
        const GtBox candidate = sample_object(rng, cfg, false);
        bool clear = true;
        for (const GtBox& g : scene.gt) clear = clear && iou(g.box, candidate.box) <= cfg.max_pair_iou;
        if (clear) scene.gt.push_back(candidate);
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

DatasetSummary summarize(const std::vector<SyntheticScene>& scenes) {
  DatasetSummary s;
  std::size_t objects = 0;
  for (const SyntheticScene& scene : scenes) {
    objects += scene.gt.size();
    for (const GtBox& g : scene.gt) ++s.class_histogram[g.label];
  }
  s.mean_objects = scenes.empty() ? 0.0 : static_cast<double>(objects) / static_cast<double>(scenes.size());
  return s;
}

int location_feature_dim(int num_classes) { return 2 * num_classes + 2; }
int anchor_feature_dim(int num_classes) { return location_feature_dim(num_classes) + 9; }

SceneFeatures build_features(const SyntheticScene& scene, const AnchorGrid& grid,
                             const SceneConfig& cfg) {
  const int c_count = cfg.num_classes;
  validate_ground_truth(scene.gt, c_count);
  SceneFeatures f;
  f.location_dim = location_feature_dim(c_count);
  f.anchor_dim = anchor_feature_dim(c_count);
  const std::size_t dx = static_cast<std::size_t>(f.location_dim);
  const std::size_t dz = static_cast<std::size_t>(f.anchor_dim);
  const std::size_t num_locations = grid.num_locations();
  const int k_count = grid.anchors_per_location();
  f.location.assign(num_locations * dx, 0.0);
  f.anchor.assign(grid.num_anchors() * dz, 0.0);
  f.owner.assign(num_locations, -1);

  std::mt19937_64 rng(scene.noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t i = 0; i < num_locations; ++i) {
    const double cx = grid.center_x(i);
    const double cy = grid.center_y(i);
    const double norm = grid.levels()[grid.cell(i).level].base_size;

    int owner = -1;
    double best = 0.0;
    for (std::size_t g = 0; g < scene.gt.size(); ++g) {
      const Box& b = scene.gt[g].box;
      if (!(cx > b.x1 && cx < b.x2 && cy > b.y1 && cy < b.y2)) continue;
      const double u = (cx - b.center_x()) / b.width();
      const double v = (cy - b.center_y()) / b.height();
      const double d = u * u + v * v;
      if (owner < 0 || d < best) {
        owner = static_cast<int>(g);
        best = d;
      }
    }
    f.owner[i] = owner;

    double* x = f.location.data() + i * dx;
    if (owner >= 0) {
      const GtBox& g = scene.gt[static_cast<std::size_t>(owner)];
      const Box& b = g.box;
      const double l = cx - b.x1, r = b.x2 - cx, t = cy - b.y1, bt = b.y2 - cy;
      const double centerness = std::sqrt((std::min(l, r) / std::max(l, r)) * (std::min(t, bt) / std::max(t, bt)));
      x[g.label - 1] = 1.0;
      x[c_count + g.label - 1] = centerness;
      const std::size_t o = 2 * static_cast<std::size_t>(c_count);
      x[o + 0] = std::log(b.width() / norm);
      x[o + 1] = std::log(b.height() / norm);
    }
    for (std::size_t j = 0; j < dx; ++j) x[j] += cfg.feature_noise * normal(rng);

    for (int k = 0; k < k_count; ++k) {
      const std::size_t a = grid.anchor_index(i, k);
      const Box anchor = grid.anchors()[a];
      double* z = f.anchor.data() + a * dz;
      std::copy(x, x + dx, z);
      double* extra = z + dx;
      extra[0] = std::log(anchor.width() / norm);
      extra[1] = std::log(anchor.height() / norm);
      if (owner >= 0) {
        const Box& b = scene.gt[static_cast<std::size_t>(owner)].box;
        const double spread = cfg.evidence_noise + cfg.mismatch_noise * (1.0 - iou(anchor, b));
        const double r = cfg.evidence_reach;
        extra[2] = std::clamp((b.x1 - anchor.x1) / anchor.width(), -r, r) + spread * normal(rng);
        extra[3] = std::clamp((b.y1 - anchor.y1) / anchor.height(), -r, r) + spread * normal(rng);
        extra[4] = std::clamp((b.x2 - anchor.x2) / anchor.width(), -r, r) + spread * normal(rng);
        extra[5] = std::clamp((b.y2 - anchor.y2) / anchor.height(), -r, r) + spread * normal(rng);
        extra[6] = std::abs(std::log(b.width() / anchor.width())) + cfg.feature_noise * normal(rng);
        extra[7] = std::abs(std::log(b.height() / anchor.height())) + cfg.feature_noise * normal(rng);
        extra[8] = iou(anchor, b) + cfg.feature_noise * normal(rng);
      } else {
        for (int j = 2; j < 9; ++j) extra[j] = cfg.feature_noise * normal(rng);
      }
    }
  }
  return f;
}

}  // namespace semianchor
