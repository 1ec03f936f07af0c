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

#include <gtest/gtest.h>

#include "semianchor/annotations.hpp"

namespace semianchor {
namespace {

const char* kSample = R"({
  "images": [{"id": 7, "width": 64, "height": 48, "file_name": "b.png"},
             {"id": 3, "width": 32, "height": 32}],
  "categories": [{"id": 18, "name": "dog"}, {"id": 1, "name": "person"}],
  "annotations": [
    {"image_id": 7, "category_id": 18, "bbox": [10, 5, 20, 10], "area": 200},
    {"image_id": 3, "category_id": 1, "bbox": [0, 0, 8, 16]},
    {"image_id": 7, "category_id": 1, "bbox": [4, 4, 0, 3]}
  ]
})";

TEST(Annotations, ParsesAndCanonicalizes) {
  const AnnotationSet s = parse_annotations(kSample);
  ASSERT_EQ(s.images.size(), 2u);
  EXPECT_EQ(s.images[0].id, 3);
  EXPECT_EQ(s.num_classes(), 2);
  EXPECT_EQ(s.label_of(1), 1);
  EXPECT_EQ(s.label_of(18), 2);
  EXPECT_EQ(s.category_of(2), 18);
  EXPECT_EQ(s.dropped, 1u);
  ASSERT_EQ(s.annotations.size(), 2u);
  EXPECT_EQ(s.annotations[1].box, (Box{10, 5, 30, 15}));
  const GroundTruth gt = s.ground_truth(7);
  ASSERT_EQ(gt.size(), 1u);
  EXPECT_EQ(gt[0].label, 2);
  EXPECT_EQ(s.eval_ground_truth()[1].category, 18);
  EXPECT_THROW(s.label_of(5), AnnotationError);
  EXPECT_THROW(s.image(99), AnnotationError);
}

TEST(Annotations, JsonRoundTrip) {
  const AnnotationSet s = parse_annotations(kSample);
  AnnotationSet back = parse_annotations(annotations_to_json(s));
  back.dropped = s.dropped;
  EXPECT_EQ(back, s);
}

TEST(Annotations, MalformedInputIsReported) {
  EXPECT_THROW(parse_annotations("{"), AnnotationError);
  EXPECT_THROW(parse_annotations(R"({"images": [], "categories": [], "annotations": [{"image_id": 1}]})"),
               AnnotationError);
  EXPECT_THROW(parse_annotations(R"({"images": [{"id": 1, "width": 4, "height": 4}],
      "categories": [{"id": 1, "name": "a"}],
      "annotations": [{"image_id": 1, "category_id": 2, "bbox": [0, 0, 1, 1]}]})"),
               AnnotationError);
  EXPECT_THROW(load_annotations("/nonexistent/file.json"), AnnotationError);
}

TEST(Annotations, FromScenes) {
  SceneConfig cfg;
  const auto scenes = generate_dataset(5, 4, cfg);
  const AnnotationSet s = annotations_from_scenes(scenes, cfg.num_classes);
  EXPECT_EQ(s.images.size(), 4u);
  EXPECT_EQ(s.num_classes(), cfg.num_classes);
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    const GroundTruth gt = s.ground_truth(static_cast<std::int64_t>(n));
    ASSERT_EQ(gt.size(), scenes[n].gt.size());
  }
}

}  // namespace
}  // namespace semianchor
