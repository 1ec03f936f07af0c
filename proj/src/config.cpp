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

#include "semianchor/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include "semianchor/text_io.hpp"

namespace semianchor {
namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    bad(key, "expected a finite number, got '" + v + "'");
  }
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    bad(key, "expected an integer, got '" + v + "'");
  }
  return n;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  bad(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) bad(key, "empty list entry");
    out.push_back(to_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) bad(key, "expected a comma-separated list");
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t n = 0; n < v.size(); ++n) s += (n ? "," : "") + exact(v[n]);
  return s;
}

struct Range {
  double lo;
  double hi;
  bool lo_open = false;
  bool hi_open = false;
};

double in_range(const std::string& key, double v, Range r) {
  const bool ok = (r.lo_open ? v > r.lo : v >= r.lo) && (r.hi_open ? v < r.hi : v <= r.hi);
  if (!ok) {
    bad(key, "value " + exact(v) + " out of range " + (r.lo_open ? "(" : "[") + exact(r.lo) + ", " +
                 exact(r.hi) + (r.hi_open ? ")" : "]"));
  }
  return v;
}

constexpr double kInf = 1e300;

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field real(const std::string& key, Range r, std::function<double&(RunConfig&)> ref) {
  return {key,
          [key, r, ref](RunConfig& c, const std::string& v) { ref(c) = in_range(key, to_double(key, v), r); },
          [ref](const RunConfig& c) { return exact(ref(const_cast<RunConfig&>(c))); }};
}

Field integer(const std::string& key, long long lo, long long hi, std::function<int&(RunConfig&)> ref) {
  return {key,
          [key, lo, hi, ref](RunConfig& c, const std::string& v) {
            const long long n = to_int(key, v);
            if (n < lo || n > hi) {
              bad(key, "value " + v + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            ref(c) = static_cast<int>(n);
          },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

Field boolean(const std::string& key, std::function<bool&(RunConfig&)> ref) {
  return {key, [key, ref](RunConfig& c, const std::string& v) { ref(c) = to_bool(key, v); },
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

Field text(const std::string& key, std::function<std::string&(RunConfig&)> ref) {
  return {key, [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

#define REAL(key, expr, range) real(key, range, [](RunConfig& c) -> double& { return c.expr; })
#define INT(key, expr, lo, hi) integer(key, lo, hi, [](RunConfig& c) -> int& { return c.expr; })
#define BOOL(key, expr) boolean(key, [](RunConfig& c) -> bool& { return c.expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    const Range unit{0.0, 1.0};
    const Range open_unit{0.0, 1.0, true, true};
    const Range nonneg{0.0, kInf};
    const Range positive{0.0, kInf, true};
    std::vector<Field> f;
    f.push_back({"seed",
                 [](RunConfig& c, const std::string& v) {
                   const long long n = to_int("seed", v);
                   if (n < 0) bad("seed", "value " + v + " out of range [0, 2^63)");
                   c.train.seed = static_cast<std::uint64_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.train.seed); }});
    f.push_back(INT("steps", train.steps, 1, 100000000));
    f.push_back(REAL("lr", train.lr, positive));
    f.push_back(REAL("momentum", train.momentum, (Range{0.0, 1.0, false, true})));
    f.push_back(REAL("grad_clip", train.grad_clip, nonneg));
    f.push_back(INT("batch_size", train.batch_size, 1, 1000000));
    f.push_back(INT("num_train_images", train.num_train_images, 1, 10000000));
    f.push_back(INT("num_test_images", train.num_test_images, 1, 10000000));
    f.push_back(REAL("init_scale", train.init_scale, nonneg));

    f.push_back(INT("num_scales", train.anchors.num_scales, 1, 16));
    f.push_back(INT("num_aspects", train.anchors.num_aspects, 1, 5));
    f.push_back({"strides",
                 [](RunConfig& c, const std::string& v) { c.train.anchors.strides = to_list("strides", v); },
                 [](const RunConfig& c) { return list_str(c.train.anchors.strides); }});
    f.push_back({"base_sizes",
                 [](RunConfig& c, const std::string& v) { c.train.anchors.base_sizes = to_list("base_sizes", v); },
                 [](const RunConfig& c) { return list_str(c.train.anchors.base_sizes); }});

    f.push_back(REAL("fg_thresh", train.thresholds.fg, unit));
    f.push_back(REAL("bg_thresh", train.thresholds.bg, unit));
    f.push_back(REAL("ac_iou_thresh", train.ac_iou_thresh, unit));
    f.push_back({"gamma",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "simplified") {
                     c.train.location_rule = LocationRule::simplified();
                   } else {
                     c.train.location_rule = LocationRule::threshold_moving(in_range("gamma", to_double("gamma", v), {0.0, 1.0}));
                   }
                 },
                 [](const RunConfig& c) {
                   return c.train.location_rule.kind == LocationRule::Kind::kSimplified
                              ? std::string("simplified")
                              : exact(c.train.location_rule.gamma);
                 }});
    f.push_back(REAL("sigma", train.loss.sigma, open_unit));
    f.push_back(BOOL("unit_soft_labels", train.unit_soft_labels));
    f.push_back({"assigner",
                 [](RunConfig& c, const std::string& v) {
                   auto a = parse_assigner(v);
                   if (!a) bad("assigner", "expected semi_anchored, fcos or fcos_shrink, got '" + v + "'");
                   c.train.assigner = *a;
                 },
                 [](const RunConfig& c) { return std::string(assigner_name(c.train.assigner)); }});
    f.push_back(REAL("fcos_shrink", train.fcos_shrink, (Range{0.0, 1.0, true, false})));
    f.push_back(BOOL("ac_head", train.ac_head));

    f.push_back(REAL("alpha_loc", train.loss.alpha_loc, open_unit));
    f.push_back(REAL("beta_loc", train.loss.beta_loc, nonneg));
    f.push_back(REAL("alpha_ac", train.loss.alpha_ac, open_unit));
    f.push_back(REAL("beta_ac", train.loss.beta_ac, nonneg));
    f.push_back(REAL("lambda_reg", train.loss.lambda_reg, nonneg));
    f.push_back(REAL("lambda_ac", train.loss.lambda_ac, nonneg));
    f.push_back(REAL("prob_eps", train.loss.prob_eps, (Range{0.0, 0.5, true, true})));
    f.push_back(REAL("iou_eps", train.loss.iou_eps, (Range{0.0, 1.0, true, true})));
    f.push_back({"iou_loss",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "neglog") {
                     c.train.loss.iou_loss = IouLossKind::kNegLog;
                   } else if (v == "linear") {
                     c.train.loss.iou_loss = IouLossKind::kLinear;
                   } else {
                     bad("iou_loss", "expected neglog or linear, got '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.loss.iou_loss == IouLossKind::kNegLog ? "neglog" : "linear");
                 }});

    f.push_back({"strategy",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "top_k") {
                     c.train.inference.strategy = SelectionStrategy::kTopK;
                   } else if (v == "pos") {
                     c.train.inference.strategy = SelectionStrategy::kPos;
                   } else {
                     bad("strategy", "expected top_k or pos, got '" + v + "'");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.inference.strategy == SelectionStrategy::kTopK ? "top_k" : "pos");
                 }});
    f.push_back(INT("top_k", train.inference.top_k, 1, 1000000));
    f.push_back(REAL("tau", train.inference.tau, unit));
    f.push_back(REAL("nms_iou_thresh", train.inference.nms_iou_thresh, unit));
    f.push_back(REAL("pre_nms_score_thresh", train.inference.pre_nms_score_thresh, unit));
    f.push_back(INT("max_detections", train.inference.max_detections, 1, 100000000));

    f.push_back(INT("image_size", train.scene.image_size, 16, 4096));
    f.push_back(INT("num_classes", train.scene.num_classes, 1, 5));
    f.push_back(INT("difficulty", train.scene.difficulty, 0, 2));
    f.push_back(REAL("min_object_size", train.scene.min_object_size, positive));
    f.push_back(REAL("max_object_size", train.scene.max_object_size, positive));
    f.push_back(REAL("max_pair_iou", train.scene.max_pair_iou, unit));
    f.push_back(REAL("feature_noise", train.scene.feature_noise, nonneg));
    f.push_back(REAL("evidence_noise", train.scene.evidence_noise, nonneg));
    f.push_back(REAL("mismatch_noise", train.scene.mismatch_noise, nonneg));
    f.push_back(REAL("evidence_reach", train.scene.evidence_reach, positive));

    f.push_back(text("annotations", [](RunConfig& c) -> std::string& { return c.annotations; }));
    f.push_back(text("output_dir", [](RunConfig& c) -> std::string& { return c.output_dir; }));
    return f;
  }();
  return table;
}

#undef REAL
#undef INT
#undef BOOL

const Field* find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_consistency(const RunConfig& cfg) {
  try {
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown config key '" + key + "'");
  f->set(cfg, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!find_field(key)) throw ConfigError("line " + std::to_string(number) + ": unknown config key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("config key '" + key + "': given more than once");
    set_config_value(cfg, key, value);
  }
  check_consistency(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

void save_config(const RunConfig& cfg, const std::string& path) { write_file_atomic(path, format_config(cfg)); }

}  // namespace semianchor
