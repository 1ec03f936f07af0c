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
#include <stdexcept>
#include <string>
#include <vector>

#include "semianchor/assignment.hpp"
#include "semianchor/evaluation.hpp"
#include "semianchor/synthetic.hpp"

namespace semianchor {

struct ImageInfo {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct Category {
  int id = 0;
  std::string name;
  int label = 0;  // contiguous 1..C in ascending id order
  friend bool operator==(const Category&, const Category&) = default;
};

struct Annotation {
  std::int64_t image_id = 0;
  int category_id = 0;
  Box box;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Contents are kept in canonical order (images and categories by id,
// annotations by image, category, then box), so that permuted input files load
// to identical sets.
struct AnnotationSet {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::vector<Annotation> annotations;
  std::size_t dropped = 0;  // boxes with non-positive width or height

  int num_classes() const { return static_cast<int>(categories.size()); }
  int label_of(int category_id) const;     // throws for unknown ids
  int category_of(int label) const;
  const ImageInfo& image(std::int64_t id) const;
  GroundTruth ground_truth(std::int64_t image_id) const;  // contiguous labels
  std::vector<EvalGroundTruth> eval_ground_truth() const;  // original category ids

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Subset of the COCO instances schema:
//   images[].{id, width, height}
//   annotations[].{image_id, category_id, bbox: [x, y, width, height]}
//   categories[].{id, name}
// Other fields are ignored. Errors name the first offending record.
AnnotationSet parse_annotations(const std::string& json_text);
AnnotationSet load_annotations(const std::string& path);

std::string annotations_to_json(const AnnotationSet& set);

// Synthetic scenes as an annotation set: image ids 0..n-1, category ids 1..C.
AnnotationSet annotations_from_scenes(const std::vector<SyntheticScene>& scenes, int num_classes);

}  // namespace semianchor
