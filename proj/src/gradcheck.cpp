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

#include "semianchor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace semianchor {
namespace {

constexpr double kLossTolerance = 1e-5;
constexpr double kModelTolerance = 1e-4;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0;
  for (std::size_t j = 0; j < analytic.size(); ++j) diff = std::max(diff, std::abs(analytic[j] - numeric[j]));
  return diff / std::max({max_abs(analytic), max_abs(numeric), 1e-8});
}

GradCheckResult check_focal_grad(std::uint64_t seed, int points, double step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> prob(0.01, 0.99), alpha(0.05, 0.95), beta(0.0, 3.0);
  GradCheckResult r{"focal_loss", 0, 0.0, kLossTolerance};
  for (int n = 0; n < points; ++n) {
    const double p = prob(rng), a = alpha(rng), b = beta(rng);
    const int y = n % 2;
    const double numeric = (focal_loss(p + step, y, a, b).value - focal_loss(p - step, y, a, b).value) / (2 * step);
    r.max_rel_error = std::max(r.max_rel_error, relative_error({focal_loss(p, y, a, b).grad}, {numeric}));
    ++r.points;
  }
  return r;
}

GradCheckResult check_smoothed_focal_grad(std::uint64_t seed, int points, double step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> prob(0.01, 0.99), soft(0.0, 1.0), alpha(0.05, 0.95), beta(1.0, 3.0);
  GradCheckResult r{"smoothed_focal_loss", 0, 0.0, kLossTolerance};
  while (r.points < points) {
    const double p = prob(rng), t = soft(rng), a = alpha(rng), b = beta(rng);
    const int pos = r.points % 4 == 3 ? 0 : 1;
    if (pos == 1 && std::abs(p - t) < 1e-3) continue;
    auto f = [&](double q) { return smoothed_focal_loss(q, t, pos, a, b).value; };
    const double numeric = (f(p + step) - f(p - step)) / (2 * step);
    r.max_rel_error =
        std::max(r.max_rel_error, relative_error({smoothed_focal_loss(p, t, pos, a, b).grad}, {numeric}));
    ++r.points;
  }
  return r;
}

GradCheckResult check_iou_loss_grad(std::uint64_t seed, int points, double step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 40.0), extent(4.0, 30.0);
  GradCheckResult r{"iou_loss", 0, 0.0, kLossTolerance};
  auto separated = [](const Box& a, const Box& b) {
    const double xs[4] = {a.x1, a.x2, b.x1, b.x2};
    const double ys[4] = {a.y1, a.y2, b.y1, b.y2};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (std::abs(xs[i] - xs[j]) < 1e-3 || std::abs(ys[i] - ys[j]) < 1e-3) return false;
      }
    }
    return true;
  };
  while (r.points < points) {
    const double tx = coord(rng), ty = coord(rng);
    const Box target{tx, ty, tx + extent(rng), ty + extent(rng)};
    const double px = target.x1 + (coord(rng) - 20.0) * 0.5, py = target.y1 + (coord(rng) - 20.0) * 0.5;
    const Box pred{px, py, px + extent(rng), py + extent(rng)};
    const double v = iou(pred, target);
    if (v < 0.05 || v > 0.95 || !separated(pred, target)) continue;
    const IouLossKind kind = r.points % 2 ? IouLossKind::kLinear : IouLossKind::kNegLog;
    const BoxLoss analytic = iou_loss(pred, target, 1e-7, kind);
    std::vector<double> numeric(4);
    for (int j = 0; j < 4; ++j) {
      Box plus = pred, minus = pred;
      double* cp = j == 0 ? &plus.x1 : j == 1 ? &plus.y1 : j == 2 ? &plus.x2 : &plus.y2;
      double* cm = j == 0 ? &minus.x1 : j == 1 ? &minus.y1 : j == 2 ? &minus.x2 : &minus.y2;
      *cp += step;
      *cm -= step;
      numeric[static_cast<std::size_t>(j)] =
          (iou_loss(plus, target, 1e-7, kind).value - iou_loss(minus, target, 1e-7, kind).value) / (2 * step);
    }
    r.max_rel_error = std::max(r.max_rel_error,
                               relative_error({analytic.grad.begin(), analytic.grad.end()}, numeric));
    ++r.points;
  }
  return r;
}

GradCheckProblem make_gradcheck_problem(std::uint64_t seed) {
  GradCheckProblem p;
  SceneConfig scene_cfg;
  scene_cfg.image_size = 16;
  scene_cfg.num_classes = 2;
  p.scene.width = 16;
  p.scene.height = 16;
  p.scene.noise_seed = seed;
  p.scene.gt = {{{0.0, 0.0, 11.0, 11.0}, 1}, {{7.0, 6.0, 16.0, 16.0}, 2}};
  const AnchorSpec spec = AnchorSpec::single_level(2, 1, 8.0, 12.0);
  const std::vector<LevelDims> dims{{2, 2}};
  p.grid = build_anchor_grid(spec, dims);
  p.image.scene = &p.scene;
  p.image.features = build_features(p.scene, p.grid, scene_cfg);
  p.image.anchor_labels = label_anchors(p.grid, p.scene.gt);
  p.image.locations = assign_locations(p.grid, p.image.anchor_labels, 2);
  p.image.regression = regression_targets(p.grid, p.image.locations, p.scene.gt);
  return p;
}

GradCheckResult check_model_grad(std::uint64_t seed, int points, double step) {
  GradCheckProblem prob = make_gradcheck_problem(seed);
  // The image refers to its own scene; rebind after the copy out of the factory.
  prob.image.scene = &prob.scene;
  const PreparedImage* batch[] = {&prob.image};
  const int c = prob.scene.gt.empty() ? 1 : 2;
  GradCheckResult r{"toy_model_total_loss", 0, 0.0, kModelTolerance};
  for (int n = 0; n < points; ++n) {
    ToyModel model = ToyModel::initial(c, prob.image.features.location_dim, prob.image.features.anchor_dim,
                                       seed * 1000003ULL + static_cast<std::uint64_t>(n), 0.3);
    const LossEvaluation base = evaluate_objective(model, batch, prob.grid, prob.options);
    const std::vector<double> theta = model.flatten();
    std::vector<double> numeric(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
      std::vector<double> t = theta;
      t[j] = theta[j] + step;
      model.assign(t);
      const double plus = evaluate_objective(model, batch, prob.grid, prob.options, &base.ac_targets).report.total;
      t[j] = theta[j] - step;
      model.assign(t);
      const double minus = evaluate_objective(model, batch, prob.grid, prob.options, &base.ac_targets).report.total;
      numeric[j] = (plus - minus) / (2 * step);
    }
    r.max_rel_error = std::max(r.max_rel_error, relative_error(base.grad.flatten(), numeric));
    ++r.points;
  }
  return r;
}

std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, int points) {
  return {check_focal_grad(seed, points), check_smoothed_focal_grad(seed + 1, points),
          check_iou_loss_grad(seed + 2, points), check_model_grad(seed + 3, points)};
}

std::string format_gradcheck(const GradCheckResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-22s points=%d max_rel_error=%.3g tolerance=%.0e %s", r.name.c_str(), r.points,
                r.max_rel_error, r.tolerance, r.passed() ? "PASS" : "FAIL");
  return buf;
}

}  // namespace semianchor
