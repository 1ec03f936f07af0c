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

#include "semianchor/gradcheck.hpp"

namespace semianchor {
namespace {

TEST(RelativeError, ScaledByLargestEntry) {
  EXPECT_DOUBLE_EQ(relative_error({1.0, 2.0}, {1.0, 2.0}), 0.0);
  EXPECT_DOUBLE_EQ(relative_error({1.0, 4.0}, {1.5, 4.0}), 0.125);
  EXPECT_DOUBLE_EQ(relative_error({0.0}, {0.0}), 0.0);
}

TEST(GradCheckProblem, ExercisesEveryLossTerm) {
  GradCheckProblem p = make_gradcheck_problem(1);
  EXPECT_EQ(p.grid.num_locations(), 4u);
  EXPECT_EQ(p.grid.anchors_per_location(), 2);
  int positive = 0;
  for (const auto& l : p.image.locations) positive += l.positive();
  EXPECT_GT(positive, 0);
  EXPECT_FALSE(p.image.regression.empty());
}

TEST(GradientSuite, AllChecksPass) {
  for (const GradCheckResult& r : run_gradient_suite(3, 100)) {
    EXPECT_TRUE(r.passed()) << format_gradcheck(r);
    EXPECT_EQ(r.points, 100);
  }
}

TEST(GradientSuite, DetectsABrokenGradient) {
  // A coarse step near p = 0.01 leaves a large truncation error.
  const GradCheckResult r = check_focal_grad(1, 100, 0.009);
  EXPECT_FALSE(r.passed());
}

}  // namespace
}  // namespace semianchor
