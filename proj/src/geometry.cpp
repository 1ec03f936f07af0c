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

#include "semianchor/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semianchor/kernels.hpp"

namespace semianchor {

double iou(const Box& a, const Box& b) {
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = iw * ih;
  const double uni = (a.area() + b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void iou_one_to_many(const Box& query, const BoxArray& boxes, std::span<double> out) {
  if (out.size() != boxes.size()) throw std::invalid_argument("iou_one_to_many: size mismatch");
  kernels::active().iou_one_to_many(query.x1, query.y1, query.x2, query.y2, boxes.x1().data(),
                                    boxes.y1().data(), boxes.x2().data(), boxes.y2().data(),
                                    boxes.size(), out.data());
}

std::vector<double> aspect_ratios(int num_aspects) {
  switch (num_aspects) {
    case 1:
      return {1.0};
    case 3:
      return {0.5, 1.0, 2.0};
    case 5:
      return {1.0 / 3.0, 0.5, 1.0, 2.0, 3.0};
    default:
      throw std::invalid_argument("unsupported aspect count " + std::to_string(num_aspects) +
                                  " (expected 1, 3 or 5)");
  }
}

std::vector<double> scale_sizes(double base_size, int num_scales) {
  std::vector<double> sizes;
  sizes.reserve(static_cast<std::size_t>(num_scales));
  for (int j = 0; j < num_scales; ++j) {
    sizes.push_back(base_size * std::exp2(static_cast<double>(j) / num_scales));
  }
  return sizes;
}

void AnchorSpec::validate() const {
  if (num_scales < 1) throw std::invalid_argument("num_scales must be >= 1");
  aspect_ratios(num_aspects);
  if (strides.empty()) throw std::invalid_argument("at least one level stride is required");
  if (base_sizes.size() != strides.size()) {
    throw std::invalid_argument("base_sizes and strides must have one entry per level");
  }
  for (std::size_t l = 0; l < strides.size(); ++l) {
    if (!(strides[l] > 0.0)) throw std::invalid_argument("strides must be positive");
    if (!(base_sizes[l] > 0.0)) throw std::invalid_argument("base sizes must be positive");
    if (l > 0 && !(strides[l] > strides[l - 1])) {
      throw std::invalid_argument("strides must be strictly increasing");
    }
  }
}

AnchorSpec AnchorSpec::single_level(int num_scales, int num_aspects, double stride,
                                    double base_size) {
  AnchorSpec spec;
  spec.num_scales = num_scales;
  spec.num_aspects = num_aspects;
  spec.strides = {stride};
  spec.base_sizes = {base_size};
  return spec;
}

AnchorSpec AnchorSpec::pyramid(int num_scales, int num_aspects) {
  AnchorSpec spec;
  spec.num_scales = num_scales;
  spec.num_aspects = num_aspects;
  spec.strides = {8.0, 16.0, 32.0, 64.0, 128.0};
  spec.base_sizes = {32.0, 64.0, 128.0, 256.0, 512.0};
  return spec;
}

AnchorGrid::AnchorGrid(std::vector<GridLevel> levels, int anchors_per_location, BoxArray anchors)
    : levels_(std::move(levels)), k_(anchors_per_location), anchors_(std::move(anchors)) {
  for (const auto& level : levels_) num_locations_ += level.num_locations();
}

AnchorGrid::Cell AnchorGrid::cell(std::size_t location) const {
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const GridLevel& level = levels_[l];
    if (location < level.first_location + level.num_locations()) {
      const std::size_t local = location - level.first_location;
      return {l, static_cast<int>(local / static_cast<std::size_t>(level.width)),
              static_cast<int>(local % static_cast<std::size_t>(level.width))};
    }
  }
  throw std::out_of_range("location index " + std::to_string(location) + " outside grid");
}

double AnchorGrid::center_x(std::size_t location) const {
  const Cell c = cell(location);
  return (c.col + 0.5) * levels_[c.level].stride;
}

double AnchorGrid::center_y(std::size_t location) const {
  const Cell c = cell(location);
  return (c.row + 0.5) * levels_[c.level].stride;
}

AnchorGrid build_anchor_grid(const AnchorSpec& spec, std::span<const LevelDims> level_dims) {
  spec.validate();
  if (level_dims.size() != spec.strides.size()) {
    throw std::invalid_argument("level_dims must match the number of configured levels");
  }
  const std::vector<double> ratios = aspect_ratios(spec.num_aspects);
  const int k = spec.anchors_per_location();

  std::vector<GridLevel> levels;
  std::size_t total_locations = 0;
  for (std::size_t l = 0; l < level_dims.size(); ++l) {
    if (level_dims[l].width <= 0 || level_dims[l].height <= 0) {
      throw std::invalid_argument("feature map at level " + std::to_string(l) + " is empty");
    }
    GridLevel level{level_dims[l].width, level_dims[l].height, spec.strides[l],
                    spec.base_sizes[l], total_locations};
    total_locations += level.num_locations();
    levels.push_back(level);
  }

  BoxArray anchors;
  anchors.reserve(total_locations * static_cast<std::size_t>(k));
  for (const GridLevel& level : levels) {
    // Half-extents per anchor shape; aspect redistributes width and height at
    // constant area size^2.
    std::vector<std::pair<double, double>> half_extents;
    for (double size : scale_sizes(level.base_size, spec.num_scales)) {
      for (double ratio : ratios) {
        const double root = std::sqrt(ratio);
        half_extents.emplace_back(0.5 * size / root, 0.5 * size * root);
      }
    }
    for (int row = 0; row < level.height; ++row) {
      for (int col = 0; col < level.width; ++col) {
        const double cx = (col + 0.5) * level.stride;
        const double cy = (row + 0.5) * level.stride;
        for (const auto& [hw, hh] : half_extents) {
          anchors.push_back({cx - hw, cy - hh, cx + hw, cy + hh});
        }
      }
    }
  }
  return AnchorGrid(std::move(levels), k, std::move(anchors));
}

std::vector<LevelDims> level_dims_for_image(const AnchorSpec& spec, int image_width,
                                            int image_height) {
  if (image_width <= 0 || image_height <= 0) throw std::invalid_argument("image size must be positive");
  std::vector<LevelDims> dims;
  for (double stride : spec.strides) {
    dims.push_back({static_cast<int>(std::ceil(image_width / stride)),
                    static_cast<int>(std::ceil(image_height / stride))});
  }
  return dims;
}

}  // namespace semianchor
