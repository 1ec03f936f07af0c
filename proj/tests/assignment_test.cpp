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

#include <cmath>
#include <random>

#include "semianchor/assignment.hpp"
#include "semianchor/synthetic.hpp"

namespace semianchor {
namespace {

AnchorGrid one_cell_grid(int scales, int aspects) {
  const AnchorSpec spec = AnchorSpec::single_level(scales, aspects, 8.0, 32.0);
  const std::vector<LevelDims> dims{{1, 1}};
  return build_anchor_grid(spec, dims);
}

TEST(LabelAnchors, IdenticalBoxTakesItsClass) {
  const AnchorGrid grid = one_cell_grid(1, 1);
  const GroundTruth gt{{grid.anchor(0, 0), 3}};
  const AnchorLabels l = label_anchors(grid, gt);
  EXPECT_EQ(l.label[0], 3);
  EXPECT_DOUBLE_EQ(l.max_iou[0], 1.0);
  EXPECT_EQ(l.matched_gt[0], 0);
}

TEST(LabelAnchors, DisjointIsBackground) {
  const AnchorGrid grid = one_cell_grid(1, 1);
  const AnchorLabels l = label_anchors(grid, {{{100, 100, 120, 120}, 1}});
  EXPECT_EQ(l.label[0], 0);
}

TEST(LabelAnchors, IgnoreBandFoldsIntoBackground) {
  const AnchorGrid grid = one_cell_grid(1, 1);  // anchor (-12, -12, 20, 20)
  // Same height, width w from x1 = -12: IoU = w / 32 = 0.45.
  const Box b{-12.0, -12.0, -12.0 + 0.45 * 32.0, 20.0};
  ASSERT_NEAR(iou(grid.anchor(0, 0), b), 0.45, 1e-12);
  const AnchorLabels l = label_anchors(grid, {{b, 2}}, {0.5, 0.4});
  EXPECT_EQ(l.label[0], 0);
}

TEST(LabelAnchors, EmptyGroundTruth) {
  const AnchorGrid grid = one_cell_grid(5, 5);
  const AnchorLabels l = label_anchors(grid, {});
  for (int v : l.label) EXPECT_EQ(v, 0);
  for (int g : l.matched_gt) EXPECT_EQ(g, -1);
}

TEST(ScoreLocation, AllBackground) {
  const std::vector<int> labels(25, 0);
  const auto s = score_location(labels, 3);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1] + s[2] + s[3], 0.0);
}

TEST(ScoreLocation, CountsOverK) {
  std::vector<int> labels(25, 0);
  labels[7] = 2;
  const auto s = score_location(labels, 3);
  EXPECT_DOUBLE_EQ(s[0], 24.0 / 25.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0 / 25.0);
  const auto two = score_location(std::vector<int>{1, 2}, 2);
  EXPECT_DOUBLE_EQ(two[1], 0.5);
  EXPECT_DOUBLE_EQ(two[2], 0.5);
}

TEST(ThresholdMove, SmallGammaFlipsToForeground) {
  std::vector<int> labels(25, 0);
  labels[0] = 1;
  const auto s = score_location(labels, 1);
  const auto r = threshold_move(s, 1.0 / 26.0);
  EXPECT_NEAR(r.rescaled[0], 24.0 / 650.0, 1e-15);
  EXPECT_NEAR(r.rescaled[1], 25.0 / 650.0, 1e-15);
  EXPECT_EQ(r.label, 1);
}

TEST(ThresholdMove, LargeGammaKeepsBackground) {
  std::vector<int> labels(25, 0);
  labels[0] = 1;
  const auto r = threshold_move(score_location(labels, 1), 0.2);
  EXPECT_NEAR(r.rescaled[0], 0.192, 1e-15);
  EXPECT_NEAR(r.rescaled[1], 0.032, 1e-15);
  EXPECT_EQ(r.label, 0);
}

TEST(ThresholdMove, AllBackgroundAnyGamma) {
  const std::vector<double> s{1.0, 0.0, 0.0};
  for (double g : {0.0, 0.1, 0.5, 1.0}) EXPECT_EQ(threshold_move(s, g).label, 0);
}

TEST(Simplified, RuleAndTieBreak) {
  EXPECT_EQ(label_location_simplified(std::vector<double>{1.0, 0.0, 0.0}), 0);
  EXPECT_EQ(label_location_simplified(std::vector<double>{23.0 / 25, 1.0 / 25, 1.0 / 25}), 1);
  EXPECT_EQ(label_location_simplified(std::vector<double>{0.5, 0.1, 0.4}), 2);
}

TEST(Simplified, AgreesWithThresholdMovingBelowOneOverK) {
  std::mt19937_64 rng(21);
  for (int k = 1; k <= 9; ++k) {
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<int> labels(static_cast<std::size_t>(k));
      for (int& l : labels) l = std::uniform_int_distribution<int>(0, 3)(rng);
      const auto s = score_location(labels, 3);
      const double gamma = std::uniform_real_distribution<double>(0.0, 1.0 / k)(rng) * 0.999;
      ASSERT_EQ(label_location_simplified(s), threshold_move(s, gamma).label);
    }
  }
}

TEST(Fcos, CenterContainmentAndShrink) {
  const AnchorSpec spec = AnchorSpec::single_level(1, 1, 8.0, 32.0);
  const std::vector<LevelDims> dims{{4, 4}};
  const AnchorGrid grid = build_anchor_grid(spec, dims);
  // Location (row 0, col 0) has center (4, 4).
  const GroundTruth gt{{{0.0, 0.0, 20.0, 20.0}, 2}};
  EXPECT_EQ(label_locations_fcos(grid, gt, 1.0)[0], 2);
  // Shrunk by 0.2 about (10, 10): (8, 8, 12, 12), which misses (4, 4).
  EXPECT_EQ(label_locations_fcos(grid, gt, 0.2)[0], 0);
}

TEST(Fcos, OverlapGoesToSmallerBox) {
  const AnchorSpec spec = AnchorSpec::single_level(1, 1, 8.0, 32.0);
  const std::vector<LevelDims> dims{{2, 2}};
  const AnchorGrid grid = build_anchor_grid(spec, dims);
  const GroundTruth gt{{{0, 0, 16, 16}, 1}, {{2, 2, 7, 7}, 2}};
  EXPECT_EQ(label_locations_fcos(grid, gt, 1.0)[0], 2);
}

TEST(AcTargets, PerfectRegressionIsPositiveWithUnitSoftLabel) {
  const AnchorGrid grid = one_cell_grid(1, 1);
  const GroundTruth gt{{grid.anchor(0, 0), 1}};
  const AnchorLabels labels = label_anchors(grid, gt);
  const auto locs = assign_locations(grid, labels, 1);
  ASSERT_EQ(locs[0].label, 1);
  const auto t = build_ac_targets(grid, grid.anchors(), locs, gt);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].iou, 1.0);
  EXPECT_DOUBLE_EQ(t[0].soft_label, 1.0);
  EXPECT_EQ(t[0].positive, 1);
}

TEST(SoftLabels, NormalizedPower) {
  const auto s = soft_labels(std::vector<double>{0.8, 0.4}, 0.9);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_NEAR(s[1], std::pow(0.5, 0.9), 1e-15);
  EXPECT_NEAR(s[1], 0.53589, 1e-5);
  const auto u = soft_labels(std::vector<double>{0.8, 0.4, 0.0}, 0.9, true);
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  EXPECT_DOUBLE_EQ(u[1], 1.0);
}

TEST(SoftLabels, RangeAndMonotoneInIou) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ious(7);
    for (double& v : ious) v = u(rng);
    const double sigma = 0.05 + 0.9 * u(rng);
    const auto s = soft_labels(ious, sigma);
    for (std::size_t i = 0; i < ious.size(); ++i) {
      ASSERT_GE(s[i], 0.0);
      ASSERT_LE(s[i], 1.0);
      for (std::size_t j = 0; j < ious.size(); ++j) {
        if (ious[i] < ious[j]) { ASSERT_LE(s[i], s[j]); }
      }
    }
  }
}

TEST(AcTargets, PostLabelFollowsRefinedBox) {
  const AnchorGrid grid = one_cell_grid(1, 3);
  const GroundTruth gt{{grid.anchor(0, 1), 2}};
  const AnchorLabels labels = label_anchors(grid, gt);
  const auto locs = assign_locations(grid, labels, 2);
  ASSERT_EQ(locs[0].label, 2);
  BoxArray refined = grid.anchors();
  refined.set(0, gt[0].box);  // anchor 0 regresses onto the object
  refined.set(2, {200, 200, 210, 210});
  const auto t = build_ac_targets(grid, refined, locs, gt, {}, labels.label);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].positive, 1);
  EXPECT_EQ(t[0].pre_label, labels.label[0]);
  EXPECT_EQ(t[1].positive, 1);
  EXPECT_EQ(t[2].positive, 0);
  EXPECT_EQ(t[2].post_label, 0);
}

TEST(Locations, EveryPositiveAnchorMakesItsLocationPositive) {
  SceneConfig cfg;
  cfg.difficulty = 2;
  const auto scenes = generate_dataset(17, 20, cfg);
  const AnchorSpec spec = AnchorSpec::single_level(5, 5);
  const AnchorGrid grid = build_anchor_grid(spec, level_dims_for_image(spec, 96, 96));
  for (const auto& s : scenes) {
    const AnchorLabels labels = label_anchors(grid, s.gt);
    const auto locs = assign_locations(grid, labels, cfg.num_classes);
    for (std::size_t i = 0; i < grid.num_locations(); ++i) {
      bool any = false;
      for (int k = 0; k < 25; ++k) any = any || labels.label[grid.anchor_index(i, k)] > 0;
      ASSERT_EQ(any, locs[i].positive());
    }
  }
}

TEST(RegressionTargets, OnlyOverlappingAnchorsOfPositiveLocations) {
  const AnchorGrid grid = one_cell_grid(1, 3);
  const GroundTruth gt{{grid.anchor(0, 1), 1}};
  const auto locs = assign_locations(grid, label_anchors(grid, gt), 1);
  const auto reg = regression_targets(grid, locs, gt);
  EXPECT_EQ(reg.size(), 3u);  // all three aspect variants overlap the square
  for (const auto& r : reg) EXPECT_EQ(r.gt_index, 0);
  const auto none = regression_targets(grid, assign_locations(grid, label_anchors(grid, {}), 1), {});
  EXPECT_TRUE(none.empty());
}

}  // namespace
}  // namespace semianchor
