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

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "semianchor/inference.hpp"

namespace semianchor {
namespace {

HeadOutputs make_heads(std::size_t locations, int k, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), pos(0.0, 40.0), ext(2.0, 20.0);
  HeadOutputs h;
  h.num_locations = locations;
  h.anchors_per_location = k;
  h.num_classes = c;
  for (std::size_t i = 0; i < locations * static_cast<std::size_t>(c); ++i) h.location_probs.push_back(u(rng));
  for (std::size_t i = 0; i < locations * static_cast<std::size_t>(k); ++i) {
    h.anchor_probs.push_back(u(rng));
    const double x = pos(rng), y = pos(rng);
    h.refined.push_back({x, y, x + ext(rng), y + ext(rng)});
  }
  return h;
}

HeadOutputs single_location(std::vector<double> anchor_probs) {
  HeadOutputs h;
  h.num_locations = 1;
  h.anchors_per_location = static_cast<int>(anchor_probs.size());
  h.num_classes = 1;
  h.location_probs = {0.8};
  h.anchor_probs = std::move(anchor_probs);
  for (int k = 0; k < h.anchors_per_location; ++k) h.refined.push_back({10.0 * k, 0, 10.0 * k + 5, 5});
  return h;
}

TEST(FactorizedScores, Product) {
  const std::vector<double> loc{0.8, 0.0}, anc{0.5, 1.0};
  const FactorizedScores s = factorized_scores(loc, anc, 1, 2, 2);
  EXPECT_DOUBLE_EQ(s.at(0, 0, 1), 0.4);
  EXPECT_DOUBLE_EQ(s.at(0, 1, 1), 0.8);
  EXPECT_EQ(s.at(0, 0, 2), 0.0);
  EXPECT_EQ(s.at(0, 1, 2), 0.0);
}

TEST(FactorizedScores, NeverExceedsLocationProbability) {
  const HeadOutputs h = make_heads(30, 4, 3, 1);
  const FactorizedScores s =
      factorized_scores(h.location_probs, h.anchor_probs, h.num_locations, h.anchors_per_location, h.num_classes);
  for (std::size_t i = 0; i < 30; ++i) {
    for (int k = 0; k < 4; ++k) {
      for (int c = 1; c <= 3; ++c) ASSERT_LE(s.at(i, k, c), h.location_probs[i * 3 + static_cast<std::size_t>(c - 1)]);
    }
  }
}

TEST(Selection, TopOneKeepsArgmax) {
  InferenceConfig cfg = InferenceConfig::top(1);
  cfg.pre_nms_score_thresh = 0.0;
  const auto d = select_anchors(single_location({0.9, 0.2, 0.1}), cfg);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].anchor, 0);
  EXPECT_DOUBLE_EQ(d[0].score, 0.72);
}

TEST(Selection, PosKeepsEverythingAtOrAboveTau) {
  InferenceConfig cfg = InferenceConfig::pos(0.1);
  cfg.pre_nms_score_thresh = 0.0;
  EXPECT_EQ(select_anchors(single_location({0.9, 0.2, 0.1}), cfg).size(), 3u);
  cfg.tau = 0.15;
  EXPECT_EQ(select_anchors(single_location({0.9, 0.2, 0.1}), cfg).size(), 2u);
}

TEST(Selection, PreNmsThresholdAppliesToProduct) {
  InferenceConfig cfg = InferenceConfig::pos(0.0);
  cfg.pre_nms_score_thresh = 0.1;
  // products 0.72, 0.16, 0.08
  EXPECT_EQ(select_anchors(single_location({0.9, 0.2, 0.1}), cfg).size(), 2u);
}

TEST(Selection, TopKIsSubsetOfPosZero) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const HeadOutputs h = make_heads(20, 6, 3, seed);
    InferenceConfig pos = InferenceConfig::pos(0.0);
    std::set<std::tuple<std::size_t, int, int>> all;
    for (const Detection& d : select_anchors(h, pos)) all.insert({d.location, d.anchor, d.label});
    for (int k = 1; k <= 6; ++k) {
      for (const Detection& d : select_anchors(h, InferenceConfig::top(k))) {
        ASSERT_TRUE(all.count({d.location, d.anchor, d.label}));
      }
    }
  }
}

TEST(Selection, RankingByAnchorProbMatchesRankingByProduct) {
  // Within one (location, class) the location factor is shared.
  const HeadOutputs h = make_heads(15, 5, 2, 77);
  InferenceConfig cfg = InferenceConfig::top(2);
  cfg.pre_nms_score_thresh = 0.0;
  const auto d = select_anchors(h, cfg);
  ASSERT_EQ(d.size(), 15u * 2u * 2u);
  for (std::size_t j = 0; j + 1 < d.size(); j += 2) {
    ASSERT_EQ(d[j].location, d[j + 1].location);
    ASSERT_EQ(d[j].label, d[j + 1].label);
    const double best = std::max(d[j].score, d[j + 1].score);
    for (int k = 0; k < 5; ++k) {
      if (k == d[j].anchor || k == d[j + 1].anchor) continue;
      const double other = h.location_probs[d[j].location * 2 + static_cast<std::size_t>(d[j].label - 1)] *
                           h.anchor_probs[d[j].location * 5 + static_cast<std::size_t>(k)];
      ASSERT_LE(other, best);
    }
  }
}

TEST(Selection, RandomAnchorUsesLocationScore) {
  const HeadOutputs h = make_heads(10, 4, 2, 3);
  InferenceConfig cfg = InferenceConfig::top(1);
  cfg.pre_nms_score_thresh = 0.0;
  const auto a = select_random_anchor(h, cfg, 9);
  const auto b = select_random_anchor(h, cfg, 9);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].anchor, b[j].anchor);
    EXPECT_DOUBLE_EQ(a[j].score, h.location_probs[a[j].location * 2 + static_cast<std::size_t>(a[j].label - 1)]);
  }
}

TEST(Nms, SingleDetection) {
  const std::vector<Detection> one{{{0, 0, 10, 10}, 1, 0.5, 0, 0}};
  EXPECT_EQ(nms(one, 0.5, 100).size(), 1u);
}

TEST(Nms, IdenticalBoxesSameClass) {
  const std::vector<Detection> d{{{0, 0, 10, 10}, 1, 0.8, 1, 0}, {{0, 0, 10, 10}, 1, 0.9, 0, 0}};
  const auto kept = nms(d, 0.5, 100);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
}

TEST(Nms, IdenticalBoxesDifferentClass) {
  const std::vector<Detection> d{{{0, 0, 10, 10}, 1, 0.8, 1, 0}, {{0, 0, 10, 10}, 2, 0.9, 0, 0}};
  EXPECT_EQ(nms(d, 0.5, 100).size(), 2u);
}

TEST(Nms, TiesBrokenByLocationThenAnchor) {
  const std::vector<Detection> d{{{0, 0, 10, 10}, 1, 0.5, 3, 1}, {{0, 0, 10, 10}, 1, 0.5, 3, 0},
                                 {{0, 0, 10, 10}, 1, 0.5, 7, 0}};
  const auto kept = nms(d, 0.5, 100);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].location, 3u);
  EXPECT_EQ(kept[0].anchor, 0);
}

TEST(Nms, TruncatesToMaxDetections) {
  std::vector<Detection> d;
  for (int i = 0; i < 10; ++i) d.push_back({{20.0 * i, 0, 20.0 * i + 10, 10}, 1, 0.1 * i, static_cast<std::size_t>(i), 0});
  const auto kept = nms(d, 0.5, 4);
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
}

TEST(Nms, RandomInvariants) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 500; ++trial) {
    const HeadOutputs h = make_heads(12, 3, 2, rng());
    InferenceConfig cfg = InferenceConfig::pos(0.0);
    cfg.pre_nms_score_thresh = 0.0;
    const auto kept = nms(select_anchors(h, cfg), 0.5, 100);
    for (std::size_t a = 0; a < kept.size(); ++a) {
      if (a > 0) { ASSERT_GE(kept[a - 1].score, kept[a].score); }
      for (std::size_t b = a + 1; b < kept.size(); ++b) {
        if (kept[a].label == kept[b].label) { ASSERT_LT(iou(kept[a].box, kept[b].box), 0.5); }
      }
    }
    const auto again = nms(kept, 0.5, 100);
    ASSERT_EQ(again.size(), kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) ASSERT_EQ(again[a].box, kept[a].box);
  }
}

TEST(Nms, RejectsNonFiniteScores) {
  const std::vector<Detection> d{{{0, 0, 1, 1}, 1, std::nan(""), 0, 0}};
  EXPECT_THROW(nms(d, 0.5, 10), std::invalid_argument);
}

TEST(InferenceConfig, Validation) {
  EXPECT_NO_THROW(InferenceConfig{}.validate());
  InferenceConfig c = InferenceConfig::top(0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = InferenceConfig::pos(1.5);
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunInference, DeterministicAndBounded) {
  const HeadOutputs h = make_heads(40, 5, 3, 5);
  const auto a = run_inference(h, InferenceConfig::top(1));
  const auto b = run_inference(h, InferenceConfig::top(1));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE(a.size(), 100u);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].box, b[j].box);
    EXPECT_GE(a[j].score, 0.0);
    EXPECT_LE(a[j].score, 1.0);
  }
}

}  // namespace
}  // namespace semianchor
