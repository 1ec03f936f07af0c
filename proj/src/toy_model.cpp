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

#include "semianchor/toy_model.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "semianchor/kernels.hpp"

namespace semianchor {
namespace {

constexpr const char* kCheckpointHeader = "semianchor-toy-checkpoint v1";

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename F>
void for_each_block(ToyModel& m, F&& f) {
  f(m.cls_w);
  f(m.cls_b);
  f(m.reg_w);
  f(m.reg_b);
  f(m.ac_w);
  f(m.ac_b);
}

template <typename F>
void for_each_block(const ToyModel& m, F&& f) {
  f(m.cls_w);
  f(m.cls_b);
  f(m.reg_w);
  f(m.reg_b);
  f(m.ac_w);
  f(m.ac_b);
}

}  // namespace

ToyModel ToyModel::zeros(int num_classes, int location_dim, int anchor_dim) {
  if (num_classes < 1 || location_dim < 1 || anchor_dim < 1) {
    throw std::invalid_argument("ToyModel: dimensions must be positive");
  }
  ToyModel m;
  m.num_classes = num_classes;
  m.location_dim = location_dim;
  m.anchor_dim = anchor_dim;
  const auto c = static_cast<std::size_t>(num_classes);
  const auto dx = static_cast<std::size_t>(location_dim);
  const auto dz = static_cast<std::size_t>(anchor_dim);
  m.cls_w.assign(c * dx, 0.0);
  m.cls_b.assign(c, 0.0);
  m.reg_w.assign(4 * dz, 0.0);
  m.reg_b.assign(4, 0.0);
  m.ac_w.assign(dz, 0.0);
  m.ac_b.assign(1, 0.0);
  return m;
}

ToyModel ToyModel::initial(int num_classes, int location_dim, int anchor_dim, std::uint64_t seed,
                           double scale) {
  ToyModel m = zeros(num_classes, location_dim, anchor_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& w : m.cls_w) w = normal(rng);
  for (double& w : m.reg_w) w = normal(rng);
  for (double& w : m.ac_w) w = normal(rng);
  // Prior probability 0.01 for every class.
  for (double& b : m.cls_b) b = -std::log(99.0);
  return m;
}

std::size_t ToyModel::num_parameters() const {
  std::size_t n = 0;
  for_each_block(*this, [&](const std::vector<double>& v) { n += v.size(); });
  return n;
}

std::vector<double> ToyModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(num_parameters());
  for_each_block(*this, [&](const std::vector<double>& v) { flat.insert(flat.end(), v.begin(), v.end()); });
  return flat;
}

void ToyModel::assign(std::span<const double> flat) {
  if (flat.size() != num_parameters()) throw std::invalid_argument("ToyModel::assign: size mismatch");
  std::size_t pos = 0;
  for_each_block(*this, [&](std::vector<double>& v) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + v.size()), v.begin());
    pos += v.size();
  });
}

bool ToyModel::finite() const {
  bool ok = true;
  for_each_block(*this, [&](const std::vector<double>& v) {
    for (double x : v) ok = ok && std::isfinite(x);
  });
  return ok;
}

Box apply_offsets(const Box& anchor, const double* o, bool* clamped_x, bool* clamped_y) {
  const double w = anchor.width();
  const double h = anchor.height();
  Box b{anchor.x1 + w * o[0], anchor.y1 + h * o[1], anchor.x2 + w * o[2], anchor.y2 + h * o[3]};
  *clamped_x = b.x2 < b.x1 + kMinBoxExtent;
  *clamped_y = b.y2 < b.y1 + kMinBoxExtent;
  if (*clamped_x) b.x2 = b.x1 + kMinBoxExtent;
  if (*clamped_y) b.y2 = b.y1 + kMinBoxExtent;
  return b;
}

ForwardResult forward(const ToyModel& model, const SceneFeatures& features, const AnchorGrid& grid) {
  if (features.location_dim != model.location_dim || features.anchor_dim != model.anchor_dim) {
    throw std::invalid_argument("forward: feature dimensions do not match the model");
  }
  const std::size_t num_locations = grid.num_locations();
  const std::size_t num_anchors = grid.num_anchors();
  if (features.location.size() != num_locations * static_cast<std::size_t>(model.location_dim) ||
      features.anchor.size() != num_anchors * static_cast<std::size_t>(model.anchor_dim)) {
    throw std::invalid_argument("forward: features were built for a different grid");
  }
  const auto c_count = static_cast<std::size_t>(model.num_classes);
  const auto dx = static_cast<std::size_t>(model.location_dim);
  const auto dz = static_cast<std::size_t>(model.anchor_dim);

  ForwardResult r;
  r.location_logits.resize(num_locations * c_count);
  r.location_probs.resize(num_locations * c_count);
  for (std::size_t i = 0; i < num_locations; ++i) {
    const double* x = features.location_row(i);
    for (std::size_t c = 0; c < c_count; ++c) {
      const double z = kernels::dot(model.cls_w.data() + c * dx, x, dx) + model.cls_b[c];
      r.location_logits[i * c_count + c] = z;
      r.location_probs[i * c_count + c] = sigmoid(z);
    }
  }

  r.offsets.resize(num_anchors * 4);
  r.refined = BoxArray(num_anchors);
  r.clamped_x.assign(num_anchors, 0);
  r.clamped_y.assign(num_anchors, 0);
  r.anchor_logits.resize(num_anchors);
  r.anchor_probs.resize(num_anchors);
  for (std::size_t a = 0; a < num_anchors; ++a) {
    const double* z = features.anchor_row(a);
    double* o = r.offsets.data() + 4 * a;
    for (std::size_t j = 0; j < 4; ++j) o[j] = kernels::dot(model.reg_w.data() + j * dz, z, dz) + model.reg_b[j];
    bool cx = false;
    bool cy = false;
    r.refined.set(a, apply_offsets(grid.anchors()[a], o, &cx, &cy));
    r.clamped_x[a] = cx;
    r.clamped_y[a] = cy;
    const double logit = kernels::dot(model.ac_w.data(), z, dz) + model.ac_b[0];
    r.anchor_logits[a] = logit;
    r.anchor_probs[a] = sigmoid(logit);
  }
  return r;
}

HeadOutputs head_outputs(const ForwardResult& fwd, const AnchorGrid& grid, int num_classes) {
  HeadOutputs h;
  h.num_locations = grid.num_locations();
  h.anchors_per_location = grid.anchors_per_location();
  h.num_classes = num_classes;
  h.location_probs = fwd.location_probs;
  h.anchor_probs = fwd.anchor_probs;
  h.refined = fwd.refined;
  return h;
}

LossEvaluation evaluate_objective(const ToyModel& model, std::span<const PreparedImage* const> batch,
                                  const AnchorGrid& grid, const ObjectiveOptions& options,
                                  const std::vector<std::vector<AnchorTarget>>* frozen_ac_targets) {
  if (batch.empty()) throw std::invalid_argument("evaluate_objective: empty batch");
  if (frozen_ac_targets && frozen_ac_targets->size() != batch.size()) {
    throw std::invalid_argument("evaluate_objective: frozen targets do not match the batch");
  }
  const LossConfig& cfg = options.loss;
  const auto c_count = static_cast<std::size_t>(model.num_classes);
  const auto dx = static_cast<std::size_t>(model.location_dim);
  const auto dz = static_cast<std::size_t>(model.anchor_dim);
  const std::size_t num_locations = grid.num_locations();

  LossEvaluation out;
  out.grad = ToyModel::zeros(model.num_classes, model.location_dim, model.anchor_dim);
  out.ac_targets.resize(batch.size());

  std::vector<ForwardResult> fwd;
  fwd.reserve(batch.size());
  for (const PreparedImage* img : batch) fwd.push_back(forward(model, img->features, grid));

  // Location classification over the whole batch.
  std::vector<double> loc_probs;
  std::vector<LocationTarget> loc_targets;
  loc_probs.reserve(batch.size() * num_locations * c_count);
  loc_targets.reserve(batch.size() * num_locations);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    loc_probs.insert(loc_probs.end(), fwd[b].location_probs.begin(), fwd[b].location_probs.end());
    loc_targets.insert(loc_targets.end(), batch[b]->locations.begin(), batch[b]->locations.end());
  }
  const LossWithGrad cls = location_cls_loss(loc_probs, loc_targets, model.num_classes, cfg);

  // Regression over the anchors selected at preparation time.
  double reg_sum = 0.0;
  std::size_t reg_count = 0;
  for (const PreparedImage* img : batch) reg_count += img->regression.size();
  const double reg_scale = cfg.lambda_reg / static_cast<double>(std::max<std::size_t>(1, reg_count));

  // Anchor classification on the refined boxes.
  std::vector<double> ac_probs;
  std::vector<AnchorTarget> ac_flat;
  if (options.ac_head) {
    for (std::size_t b = 0; b < batch.size(); ++b) {
      out.ac_targets[b] = frozen_ac_targets
                              ? (*frozen_ac_targets)[b]
                              : build_ac_targets(grid, fwd[b].refined, batch[b]->locations,
                                                 batch[b]->scene->gt, options.ac,
                                                 batch[b]->anchor_labels.label);
      for (const AnchorTarget& t : out.ac_targets[b]) {
        ac_probs.push_back(fwd[b].anchor_probs[grid.anchor_index(t.location, t.anchor)]);
        ac_flat.push_back(t);
      }
    }
  }
  const LossWithGrad ac = options.ac_head ? anchor_cls_loss(ac_probs, ac_flat, cfg) : LossWithGrad{};

  std::size_t loc_offset = 0;
  std::size_t ac_offset = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const PreparedImage& img = *batch[b];
    const ForwardResult& f = fwd[b];

    for (std::size_t i = 0; i < num_locations; ++i) {
      const double* x = img.features.location_row(i);
      for (std::size_t c = 0; c < c_count; ++c) {
        const std::size_t j = i * c_count + c;
        const double p = f.location_probs[j];
        const double g = cls.grad[loc_offset + j] * p * (1.0 - p);
        if (g == 0.0) continue;
        kernels::axpy(g, x, out.grad.cls_w.data() + c * dx, dx);
        out.grad.cls_b[c] += g;
      }
    }
    loc_offset += num_locations * c_count;

    for (const RegressionTarget& t : img.regression) {
      const Box pred = f.refined[t.anchor_index];
      const BoxLoss l = iou_loss(pred, img.scene->gt[static_cast<std::size_t>(t.gt_index)].box,
                                 cfg.iou_eps, cfg.iou_loss);
      reg_sum += l.value;
      std::array<double, 4> g = l.grad;
      if (f.clamped_x[t.anchor_index]) {
        g[0] += g[2];
        g[2] = 0.0;
      }
      if (f.clamped_y[t.anchor_index]) {
        g[1] += g[3];
        g[3] = 0.0;
      }
      const Box anchor = grid.anchors()[t.anchor_index];
      const std::array<double, 4> extent{anchor.width(), anchor.height(), anchor.width(), anchor.height()};
      const double* z = img.features.anchor_row(t.anchor_index);
      for (std::size_t j = 0; j < 4; ++j) {
        const double go = reg_scale * g[j] * extent[j];
        if (go == 0.0) continue;
        kernels::axpy(go, z, out.grad.reg_w.data() + j * dz, dz);
        out.grad.reg_b[j] += go;
      }
    }

    if (options.ac_head) {
      for (const AnchorTarget& t : out.ac_targets[b]) {
        const std::size_t a = grid.anchor_index(t.location, t.anchor);
        const double p = f.anchor_probs[a];
        const double g = cfg.lambda_ac * ac.grad[ac_offset++] * p * (1.0 - p);
        if (g == 0.0) continue;
        kernels::axpy(g, img.features.anchor_row(a), out.grad.ac_w.data(), dz);
        out.grad.ac_b[0] += g;
      }
    }
  }

  const double reg = reg_sum / static_cast<double>(std::max<std::size_t>(1, reg_count));
  out.report = total_loss(cls.value, reg, ac.value, cfg);
  if (!options.ac_head) out.report.total = cls.value + cfg.lambda_reg * reg;
  out.report.num_positive_locations = cls.num_positive;
  out.report.num_positive_anchors = ac.num_positive;
  return out;
}

void write_checkpoint(const ToyModel& model, std::ostream& os) {
  os << kCheckpointHeader << '\n';
  os << "num_classes " << model.num_classes << '\n';
  os << "location_dim " << model.location_dim << '\n';
  os << "anchor_dim " << model.anchor_dim << '\n';
  char buf[64];
  for (double v : model.flatten()) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    os << buf;
  }
}

ToyModel read_checkpoint(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != kCheckpointHeader) throw std::runtime_error("unrecognized checkpoint header: " + header);
  auto read_dim = [&](const char* key) {
    std::string name;
    int value = 0;
    if (!(is >> name >> value) || name != key) {
      throw std::runtime_error(std::string("checkpoint: expected ") + key);
    }
    return value;
  };
  const int c = read_dim("num_classes");
  const int dx = read_dim("location_dim");
  const int dz = read_dim("anchor_dim");
  ToyModel model = ToyModel::zeros(c, dx, dz);
  std::vector<double> flat(model.num_parameters());
  for (double& v : flat) {
    std::string token;
    if (!(is >> token)) throw std::runtime_error("checkpoint: truncated parameter list");
    v = std::stod(token);
  }
  model.assign(flat);
  return model;
}

}  // namespace semianchor
