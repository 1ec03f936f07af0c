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
#include <string>
#include <vector>

#include "semianchor/toy_model.hpp"

namespace semianchor {

// Central finite differences against the analytic gradients. The error of one
// point is max_j |analytic_j - numeric_j| / max(max_j |analytic_j|,
// max_j |numeric_j|, 1e-8), i.e. relative to the largest gradient entry.
struct GradCheckResult {
  std::string name;
  int points = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return points > 0 && max_rel_error <= tolerance; }
};

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

// Probabilities drawn from [0.01, 0.99], both labels, alpha and beta varied.
GradCheckResult check_focal_grad(std::uint64_t seed, int points = 100, double step = 1e-6);
// As above with soft labels, keeping |p - soft label| >= 1e-3.
GradCheckResult check_smoothed_focal_grad(std::uint64_t seed, int points = 100, double step = 1e-6);
// Overlapping box pairs with IoU in [0.05, 0.95] and no edges within 1e-3 of
// each other; gradients with respect to the four predicted corners.
GradCheckResult check_iou_loss_grad(std::uint64_t seed, int points = 100, double step = 1e-6);

// A small fixed problem for end-to-end checks: one 16x16 image, a 2x2 grid
// with K = 2 anchors per location and one object per class.
struct GradCheckProblem {
  SyntheticScene scene;
  AnchorGrid grid;
  PreparedImage image;
  ObjectiveOptions options;
};
GradCheckProblem make_gradcheck_problem(std::uint64_t seed);

// Full L_total gradient over every parameter at random parameter vectors, with
// the anchor-classifier targets of each point frozen.
GradCheckResult check_model_grad(std::uint64_t seed, int points = 100, double step = 1e-6);

std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, int points = 100);

std::string format_gradcheck(const GradCheckResult& r);

}  // namespace semianchor
