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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace semianchor {

// Axis-aligned box in continuous image coordinates (corner convention, no +1).
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return (x2 - x1) * (y2 - y1); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x1 <= x2 && y1 <= y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

// Intersection over union; 0 when the union is empty.
double iou(const Box& a, const Box& b);

// Structure-of-arrays box storage. The SIMD kernels read the coordinate
// columns directly.
class BoxArray {
 public:
  BoxArray() = default;
  explicit BoxArray(std::size_t n) : x1_(n), y1_(n), x2_(n), y2_(n) {}

  std::size_t size() const { return x1_.size(); }
  bool empty() const { return x1_.empty(); }

  Box operator[](std::size_t i) const { return {x1_[i], y1_[i], x2_[i], y2_[i]}; }
  void set(std::size_t i, const Box& b) {
    x1_[i] = b.x1;
    y1_[i] = b.y1;
    x2_[i] = b.x2;
    y2_[i] = b.y2;
  }
  void push_back(const Box& b) {
    x1_.push_back(b.x1);
    y1_.push_back(b.y1);
    x2_.push_back(b.x2);
    y2_.push_back(b.y2);
  }
  void reserve(std::size_t n) {
    x1_.reserve(n);
    y1_.reserve(n);
    x2_.reserve(n);
    y2_.reserve(n);
  }

  std::span<const double> x1() const { return x1_; }
  std::span<const double> y1() const { return y1_; }
  std::span<const double> x2() const { return x2_; }
  std::span<const double> y2() const { return y2_; }

 private:
  std::vector<double> x1_, y1_, x2_, y2_;
};

// IoU of `query` against every box in `boxes`, written to `out`.
void iou_one_to_many(const Box& query, const BoxArray& boxes, std::span<double> out);

struct AnchorSpec {
  int num_scales = 5;
  int num_aspects = 5;
  std::vector<double> base_sizes{32.0};  // one per level
  std::vector<double> strides{8.0};      // one per level, strictly increasing

  int anchors_per_location() const { return num_scales * num_aspects; }

  // Throws std::invalid_argument when the spec is not buildable.
  void validate() const;

  static AnchorSpec single_level(int num_scales, int num_aspects, double stride = 8.0,
                                 double base_size = 32.0);
  // Five levels, strides 8..128 with base sizes 32..512.
  static AnchorSpec pyramid(int num_scales, int num_aspects);
  friend bool operator==(const AnchorSpec&, const AnchorSpec&) = default;
};

// height/width ratios for a given aspect count: 1, 3 or 5.
std::vector<double> aspect_ratios(int num_aspects);
// base_size * 2^(j/num_scales), j = 0..num_scales-1.
std::vector<double> scale_sizes(double base_size, int num_scales);

struct LevelDims {
  int width = 0;
  int height = 0;
};

struct GridLevel {
  int width = 0;
  int height = 0;
  double stride = 0.0;
  double base_size = 0.0;
  std::size_t first_location = 0;

  std::size_t num_locations() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

// Anchors are stored flat: anchor index = location * K + k, with k running
// scale-major (k = scale * num_aspects + aspect).
class AnchorGrid {
 public:
  AnchorGrid() = default;
  AnchorGrid(std::vector<GridLevel> levels, int anchors_per_location, BoxArray anchors);

  int anchors_per_location() const { return k_; }
  std::size_t num_locations() const { return num_locations_; }
  std::size_t num_anchors() const { return anchors_.size(); }
  const std::vector<GridLevel>& levels() const { return levels_; }
  const BoxArray& anchors() const { return anchors_; }

  Box anchor(std::size_t location, int k) const {
    return anchors_[location * static_cast<std::size_t>(k_) + static_cast<std::size_t>(k)];
  }
  std::size_t anchor_index(std::size_t location, int k) const {
    return location * static_cast<std::size_t>(k_) + static_cast<std::size_t>(k);
  }

  struct Cell {
    std::size_t level = 0;
    int row = 0;
    int col = 0;
  };
  Cell cell(std::size_t location) const;
  double center_x(std::size_t location) const;
  double center_y(std::size_t location) const;
  double stride(std::size_t location) const { return levels_[cell(location).level].stride; }

 private:
  std::vector<GridLevel> levels_;
  int k_ = 0;
  std::size_t num_locations_ = 0;
  BoxArray anchors_;
};

AnchorGrid build_anchor_grid(const AnchorSpec& spec, std::span<const LevelDims> level_dims);

// Feature-map sizes for an image: ceil(size / stride) per level.
std::vector<LevelDims> level_dims_for_image(const AnchorSpec& spec, int image_width,
                                            int image_height);

}  // namespace semianchor
