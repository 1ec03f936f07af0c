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
#include <sstream>

#include "semianchor/toy_model.hpp"
#include "semianchor/trainer.hpp"

namespace semianchor {
namespace {

struct Fixture {
  SceneConfig scene;
  AnchorGrid grid;
  std::vector<SyntheticScene> scenes;
  TrainConfig cfg;

  explicit Fixture(int difficulty = 1, int images = 4) {
    scene.difficulty = difficulty;
    cfg.scene = scene;
    cfg.anchors = AnchorSpec::single_level(3, 3);
    grid = grid_for_scene(cfg.anchors, scene);
    scenes = generate_dataset(12, images, scene);
  }
};

TEST(ToyModel, ZeroModelIsNeutral) {
  Fixture fx;
  const SceneFeatures f = build_features(fx.scenes[0], fx.grid, fx.scene);
  const ToyModel m = ToyModel::zeros(fx.scene.num_classes, f.location_dim, f.anchor_dim);
  const ForwardResult r = forward(m, f, fx.grid);
  ASSERT_EQ(r.location_probs.size(), fx.grid.num_locations() * 3);
  ASSERT_EQ(r.offsets.size(), fx.grid.num_anchors() * 4);
  ASSERT_EQ(r.anchor_probs.size(), fx.grid.num_anchors());
  for (double p : r.location_probs) ASSERT_EQ(p, 0.5);
  for (double p : r.anchor_probs) ASSERT_EQ(p, 0.5);
  for (std::size_t a = 0; a < fx.grid.num_anchors(); ++a) ASSERT_EQ(r.refined[a], fx.grid.anchors()[a]);
}

TEST(ToyModel, HandcraftedWeightsFindTheObject) {
  Fixture fx(0, 3);
  const int c = fx.scene.num_classes;
  ToyModel m = ToyModel::zeros(c, location_feature_dim(c), anchor_feature_dim(c));
  // Class indicator features carry the signal.
  for (int k = 0; k < c; ++k) {
    m.cls_w[static_cast<std::size_t>(k * m.location_dim + k)] = 20.0;
    m.cls_b[static_cast<std::size_t>(k)] = -10.0;
  }
  for (const auto& s : fx.scenes) {
    const PreparedImage p = prepare_image(s, fx.grid, fx.cfg);
    const ForwardResult r = forward(m, p.features, fx.grid);
    int positives = 0;
    for (std::size_t i = 0; i < p.locations.size(); ++i) {
      if (!p.locations[i].positive()) continue;
      ++positives;
      const int label = p.locations[i].label;
      ASSERT_GT(r.location_probs[i * static_cast<std::size_t>(c) + static_cast<std::size_t>(label - 1)], 0.9);
    }
    EXPECT_GT(positives, 0);
  }
}

TEST(ApplyOffsets, AnchorUnitsAndMinimumExtent) {
  const Box anchor{0, 0, 10, 20};
  const double off[4] = {0.1, -0.1, 0.2, 0.5};
  bool cx = false, cy = false;
  const Box b = apply_offsets(anchor, off, &cx, &cy);
  EXPECT_DOUBLE_EQ(b.x1, 1.0);
  EXPECT_DOUBLE_EQ(b.y1, -2.0);
  EXPECT_DOUBLE_EQ(b.x2, 12.0);
  EXPECT_DOUBLE_EQ(b.y2, 30.0);
  EXPECT_FALSE(cx || cy);
  const double crush[4] = {0.8, 0.0, -0.8, 0.0};
  const Box c = apply_offsets(anchor, crush, &cx, &cy);
  EXPECT_TRUE(cx);
  EXPECT_FALSE(cy);
  EXPECT_NEAR(c.width(), kMinBoxExtent, 1e-12);
}

TEST(ToyModel, FlattenAssignRoundTrip) {
  const ToyModel m = ToyModel::initial(3, 8, 17, 4, 0.5);
  ToyModel z = ToyModel::zeros(3, 8, 17);
  z.assign(m.flatten());
  EXPECT_EQ(z.flatten(), m.flatten());
  EXPECT_EQ(m.num_parameters(), 3u * 8 + 3 + 4 * 17 + 4 + 17 + 1);
  EXPECT_THROW(z.assign(std::vector<double>(5)), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsExact) {
  const ToyModel m = ToyModel::initial(2, 6, 15, 99, 0.7);
  std::stringstream ss;
  write_checkpoint(m, ss);
  const ToyModel back = read_checkpoint(ss);
  EXPECT_EQ(back.flatten(), m.flatten());
  EXPECT_EQ(back.num_classes, 2);
}

TEST(Checkpoint, RejectsWrongHeaderAndTruncation) {
  std::stringstream bad("not a checkpoint\n");
  EXPECT_THROW(read_checkpoint(bad), std::runtime_error);
  const ToyModel m = ToyModel::initial(2, 6, 15, 1);
  std::stringstream ss;
  write_checkpoint(m, ss);
  std::string text = ss.str();
  text.resize(text.size() / 2);
  std::stringstream cut(text);
  EXPECT_THROW(read_checkpoint(cut), std::runtime_error);
}

TEST(Objective, FrozenTargetsReproduceDynamicOnes) {
  Fixture fx;
  std::vector<PreparedImage> prep;
  for (const auto& s : fx.scenes) prep.push_back(prepare_image(s, fx.grid, fx.cfg));
  std::vector<const PreparedImage*> batch;
  for (const auto& p : prep) batch.push_back(&p);
  const ToyModel m = ToyModel::initial(3, location_feature_dim(3), anchor_feature_dim(3), 2, 0.1);
  const LossEvaluation dyn = evaluate_objective(m, batch, fx.grid, fx.cfg.objective());
  const LossEvaluation frz = evaluate_objective(m, batch, fx.grid, fx.cfg.objective(), &dyn.ac_targets);
  EXPECT_EQ(dyn.report.total, frz.report.total);
  EXPECT_EQ(dyn.grad.flatten(), frz.grad.flatten());
  EXPECT_GT(dyn.report.num_positive_locations, 0);
  EXPECT_GT(dyn.report.num_positive_anchors, 0);
}

TEST(Objective, WithoutAcHeadTheAnchorClassifierIsUntouched) {
  Fixture fx;
  const PreparedImage p = prepare_image(fx.scenes[0], fx.grid, fx.cfg);
  const PreparedImage* batch[] = {&p};
  ObjectiveOptions opts = fx.cfg.objective();
  opts.ac_head = false;
  const ToyModel m = ToyModel::initial(3, location_feature_dim(3), anchor_feature_dim(3), 2, 0.1);
  const LossEvaluation e = evaluate_objective(m, batch, fx.grid, opts);
  EXPECT_EQ(e.report.ac, 0.0);
  for (double g : e.grad.ac_w) EXPECT_EQ(g, 0.0);
  EXPECT_NEAR(e.report.total, e.report.cls + opts.loss.lambda_reg * e.report.reg, 1e-12);
}

TEST(Objective, FullBatchDescentLowersTheLoss) {
  Fixture fx(1, 3);
  std::vector<PreparedImage> prep;
  for (const auto& s : fx.scenes) prep.push_back(prepare_image(s, fx.grid, fx.cfg));
  std::vector<const PreparedImage*> batch;
  for (const auto& p : prep) batch.push_back(&p);
  TrainConfig cfg = fx.cfg;
  cfg.lr = 0.02;
  ToyModel m = ToyModel::initial(3, location_feature_dim(3), anchor_feature_dim(3), 7);
  Momentum state;
  const double first = train_step(m, state, batch, fx.grid, cfg).total;
  double last = first;
  for (int i = 1; i < 50; ++i) last = train_step(m, state, batch, fx.grid, cfg).total;
  EXPECT_LT(last, 0.7 * first);
}

}  // namespace
}  // namespace semianchor
