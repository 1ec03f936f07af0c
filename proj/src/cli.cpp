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

#include "semianchor/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "semianchor/ablation.hpp"
#include "semianchor/annotations.hpp"
#include "semianchor/config.hpp"
#include "semianchor/gradcheck.hpp"
#include "semianchor/text_io.hpp"
#include "semianchor/trainer.hpp"

namespace semianchor {
namespace {

constexpr int kUsageError = 2;

// Raised for bad flag values that CLI11 cannot see, e.g. --K 7.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig base_config(const std::string& path) { return path.empty() ? RunConfig{} : load_config(path); }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

// K must be a square of a supported aspect count: 1, 9 or 25.
void apply_anchor_count(RunConfig& cfg, int k) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
  if (side * side != k || (side != 1 && side != 3 && side != 5)) {
    throw UsageError("--K must be 1, 9 or 25, got " + std::to_string(k));
  }
  set_config_value(cfg, "num_scales", std::to_string(side));
  set_config_value(cfg, "num_aspects", std::to_string(side));
}

// "top<k>", "pos<tau>" or "pos" (tau from the config).
void apply_strategy(RunConfig& cfg, const std::string& s) {
  if (s.rfind("top", 0) == 0 && s.size() > 3) {
    set_config_value(cfg, "strategy", "top_k");
    set_config_value(cfg, "top_k", s.substr(3));
  } else if (s == "pos") {
    set_config_value(cfg, "strategy", "pos");
  } else if (s.rfind("pos", 0) == 0) {
    set_config_value(cfg, "strategy", "pos");
    set_config_value(cfg, "tau", s.substr(3));
  } else {
    throw UsageError("--strategy expects top<k>, pos or pos<tau>, got '" + s + "'");
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("--seeds expects a comma list of integers");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw UsageError("--seeds is empty");
  return seeds;
}

struct AssignArgs {
  std::string config, annotations, out;
};

int cmd_assign(const AssignArgs& a, std::ostream& out) {
  const RunConfig cfg = base_config(a.config);
  const std::string path = a.annotations.empty() ? cfg.annotations : a.annotations;
  if (path.empty()) throw UsageError("assign: no annotation file given");
  const AnnotationSet set = load_annotations(path);
  TrainConfig train = cfg.train;
  train.scene.num_classes = std::max(1, set.num_classes());
  std::string dump;
  for (const ImageInfo& img : set.images) {
    const AnchorGrid grid =
        build_anchor_grid(train.anchors, level_dims_for_image(train.anchors, img.width, img.height));
    const GroundTruth gt = set.ground_truth(img.id);
    const AnchorLabels labels = label_anchors(grid, gt, train.thresholds);
    const auto locations = location_targets(train, grid, gt, labels);
    for (std::size_t i = 0; i < locations.size(); ++i) {
      dump += format_location_record(img.id, i, grid, locations[i]);
    }
    // Before any regression the refined boxes are the anchors themselves.
    const auto targets = build_ac_targets(grid, grid.anchors(), locations, gt, train.ac_params(), labels.label);
    for (const AnchorTarget& t : targets) {
      dump += format_anchor_record(img.id, t, labels.max_iou[grid.anchor_index(t.location, t.anchor)]);
    }
  }
  emit(a.out, dump, out);
  return 0;
}

struct StatsArgs {
  std::string config, annotations;
  int synthetic = 0;
  std::uint64_t seed = 1;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const RunConfig cfg = base_config(a.config);
  const std::string path = a.annotations.empty() ? cfg.annotations : a.annotations;
  TrainConfig train = cfg.train;
  ImbalanceStats total;
  std::size_t images = 0, more_balanced = 0;
  auto add = [&](const AnchorGrid& grid, const GroundTruth& gt) {
    const AnchorLabels labels = label_anchors(grid, gt, train.thresholds);
    const auto locations = location_targets(train, grid, gt, labels);
    const ImbalanceStats s = imbalance_stats(labels, locations);
    total += s;
    ++images;
    if (s.location_positive_fraction() >= s.anchor_positive_fraction()) ++more_balanced;
  };
  if (!path.empty() && a.synthetic == 0) {
    const AnnotationSet set = load_annotations(path);
    train.scene.num_classes = std::max(1, set.num_classes());
    for (const ImageInfo& img : set.images) {
      add(build_anchor_grid(train.anchors, level_dims_for_image(train.anchors, img.width, img.height)),
          set.ground_truth(img.id));
    }
  } else {
    const int n = a.synthetic > 0 ? a.synthetic : 100;
    const AnchorGrid grid = grid_for_scene(train.anchors, train.scene);
    for (const SyntheticScene& s : generate_dataset(a.seed, n, train.scene)) add(grid, s.gt);
  }
  out << format_imbalance(total);
  out << "images " << images << "\n";
  out << "images_location_at_least_as_balanced " << more_balanced << "\n";
  return 0;
}

struct TrainArgs {
  std::string config, out_dir, assigner, sigma, gamma, strategy, ablation, seeds = "1,2,3";
  std::vector<std::string> set;
  std::uint64_t seed = 0;
  int steps = 0, k = 0, log_every = 100;
  double lr = 0.0;
  bool no_ac = false, dump_heads = false;
};

int cmd_train(const TrainArgs& a, const CLI::App& sub, std::ostream& out) {
  RunConfig cfg = base_config(a.config);
  for (const std::string& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (sub.count("--seed")) set_config_value(cfg, "seed", std::to_string(a.seed));
  if (sub.count("--steps")) set_config_value(cfg, "steps", std::to_string(a.steps));
  if (sub.count("--lr")) cfg.train.lr = a.lr;
  if (sub.count("--K")) apply_anchor_count(cfg, a.k);
  if (!a.assigner.empty()) set_config_value(cfg, "assigner", a.assigner);
  if (!a.sigma.empty()) {
    if (a.sigma == "unit") {
      set_config_value(cfg, "unit_soft_labels", "true");
    } else {
      set_config_value(cfg, "sigma", a.sigma);
    }
  }
  if (!a.gamma.empty()) set_config_value(cfg, "gamma", a.gamma);
  if (!a.strategy.empty()) apply_strategy(cfg, a.strategy);
  if (a.no_ac) cfg.train.ac_head = false;
  if (a.log_every < 1) throw UsageError("--log-every must be >= 1");
  cfg.train.validate();

  const std::filesystem::path dir = !a.out_dir.empty() ? a.out_dir : !cfg.output_dir.empty() ? cfg.output_dir : ".";
  std::filesystem::create_directories(dir);
  save_config(cfg, (dir / "config.txt").string());

  if (!a.ablation.empty()) {
    const auto axis = parse_axis(a.ablation);
    if (!axis) throw UsageError("unknown ablation axis '" + a.ablation + "'");
    const auto seeds = parse_seed_list(a.seeds);
    const std::string table = format_ablation(run_ablation(*axis, cfg.train, seeds));
    write_file_atomic((dir / "ablation.txt").string(), table);
    out << table;
    return 0;
  }

  std::string loss_log;
  const Experiment e = run_experiment(cfg.train, [&](int step, const LossReport& r) {
    const std::string line = format_loss_report(step, r) + "\n";
    loss_log += line;
    if (step == 0 || (step + 1) % a.log_every == 0 || step + 1 == cfg.train.steps) out << line;
  });
  std::ostringstream ckpt;
  write_checkpoint(e.training.model, ckpt);
  const auto test = test_scenes(cfg.train);
  write_file_atomic((dir / "loss.log").string(), loss_log);
  write_file_atomic((dir / "checkpoint.txt").string(), ckpt.str());
  write_file_atomic((dir / "eval.txt").string(), format_eval_text(e.eval));
  write_file_atomic((dir / "detections.txt").string(), format_detections(e.detections));
  write_file_atomic((dir / "test_annotations.json").string(),
                    annotations_to_json(annotations_from_scenes(test, cfg.train.scene.num_classes)));
  if (a.dump_heads) {
    const AnchorGrid grid = grid_for_scene(cfg.train.anchors, cfg.train.scene);
    std::vector<HeadFileImage> heads;
    for (std::size_t n = 0; n < test.size(); ++n) {
      const SceneFeatures f = build_features(test[n], grid, cfg.train.scene);
      heads.push_back({static_cast<std::int64_t>(n),
                       head_outputs(forward(e.training.model, f, grid), grid, cfg.train.scene.num_classes)});
    }
    write_file_atomic((dir / "heads.txt").string(), format_head_file(heads));
  }
  out << format_eval_table(e.eval);
  return 0;
}

struct InferArgs {
  std::string config, heads, out, strategy, annotations;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  RunConfig cfg = base_config(a.config);
  if (!a.strategy.empty()) apply_strategy(cfg, a.strategy);
  cfg.train.inference.validate();
  const auto images = parse_head_file(read_file(a.heads));
  // Labels are contiguous 1..C; an annotation file maps them back to category ids.
  std::optional<AnnotationSet> set;
  if (!a.annotations.empty()) set = load_annotations(a.annotations);
  std::vector<EvalDetection> dets;
  for (const HeadFileImage& img : images) {
    for (const Detection& d : run_inference(img.heads, cfg.train.inference)) {
      const int category = set ? set->category_of(d.label) : d.label;
      dets.push_back({img.image_id, category, d.box, d.score});
    }
  }
  emit(a.out, format_detections(dets), out);
  return 0;
}

struct EvalArgs {
  std::string detections, annotations, out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const AnnotationSet set = load_annotations(a.annotations);
  const auto dets = load_detections(a.detections);
  const EvalReport report = map_report(dets, set.eval_ground_truth());
  out << format_eval_table(report);
  if (!a.out.empty()) write_file_atomic(a.out, format_eval_text(report));
  return 0;
}

int cmd_check_grad(std::uint64_t seed, int points, std::ostream& out) {
  if (points < 1) throw UsageError("--points must be >= 1");
  bool ok = true;
  for (const GradCheckResult& r : run_gradient_suite(seed, points)) {
    out << format_gradcheck(r) << "\n";
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

struct Prop1Args {
  int k = 0, c = 0;
  std::vector<double> gammas;
  std::uint64_t samples = 200000, seed = 0;
};

int cmd_prop1(const Prop1Args& a, std::ostream& out) {
  if (a.k < 1 || a.c < 1) throw UsageError("--K and --C must be >= 1");
  std::vector<double> gammas = a.gammas;
  if (gammas.empty()) gammas = {1.0 / (a.k + 1), 1.0 / (2.0 * a.k)};
  Prop1Options opts;
  opts.samples = a.samples;
  opts.seed = a.seed;
  bool ok = true;
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw UsageError("--gamma must lie in [0, 1]");
    const Prop1Report r = verify_proposition_1(a.k, a.c, g, opts);
    out << "K=" << a.k << " C=" << a.c << " gamma=" << fmt6(g) << " cases=" << r.cases_checked << " "
        << (r.exhaustive ? "exhaustive" : "sampled") << " " << (r.passed ? "PASS" : "FAIL") << "\n";
    if (!r.passed) {
      out << "  counterexample:";
      for (int l : r.counterexample) out << " " << l;
      out << "\n  " << r.failure << "\n";
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-anchored detection targets, losses, inference and evaluation", "semianchor"};
  app.require_subcommand(1);

  AssignArgs assign;
  auto* c_assign = app.add_subcommand("assign", "Dump location and anchor targets for an annotation file");
  c_assign->add_option("--config", assign.config, "Run config file");
  c_assign->add_option("--annotations", assign.annotations, "COCO-style annotation JSON");
  c_assign->add_option("--out", assign.out, "Output file (default: stdout)");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Anchor- vs location-level class balance");
  c_stats->add_option("--config", stats.config, "Run config file");
  c_stats->add_option("--annotations", stats.annotations, "COCO-style annotation JSON");
  c_stats->add_option("--synthetic", stats.synthetic, "Use N synthetic scenes instead of annotations");
  c_stats->add_option("--seed", stats.seed, "Seed for synthetic scenes");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-toy", "Train and evaluate the toy detector on synthetic scenes");
  c_train->add_option("--config", train.config, "Run config file");
  c_train->add_option("--set", train.set, "Override a config key (key=value), repeatable");
  c_train->add_option("--seed", train.seed, "Run seed");
  c_train->add_option("--steps", train.steps, "SGD steps");
  c_train->add_option("--lr", train.lr, "Learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--K", train.k, "Anchors per location: 1, 9 or 25");
  c_train->add_option("--assigner", train.assigner, "semi_anchored, fcos or fcos_shrink");
  c_train->add_option("--sigma", train.sigma, "Soft-label exponent in (0, 1), or 'unit'");
  c_train->add_option("--gamma", train.gamma, "'simplified' or a threshold-moving value");
  c_train->add_option("--strategy", train.strategy, "top<k>, pos or pos<tau>");
  c_train->add_flag("--no-ac", train.no_ac, "Train without the anchor classifier");
  c_train->add_option("--out-dir", train.out_dir, "Directory for artifacts");
  c_train->add_flag("--dump-heads", train.dump_heads, "Also write the test-set head outputs to heads.txt");
  c_train->add_option("--log-every", train.log_every, "Print every N-th loss line");
  c_train->add_option("--ablation", train.ablation, "Run an ablation axis: ac_head, strategy, sigma, gamma, anchors");
  c_train->add_option("--seeds", train.seeds, "Comma-separated seeds for --ablation");

  InferArgs infer;
  auto* c_infer = app.add_subcommand("infer", "Turn a head-output file into detections");
  c_infer->add_option("--heads", infer.heads, "Head-output file")->required();
  c_infer->add_option("--config", infer.config, "Run config file (inference keys)");
  c_infer->add_option("--strategy", infer.strategy, "top<k>, pos or pos<tau>");
  c_infer->add_option("--annotations", infer.annotations, "Map labels to this file's category ids");
  c_infer->add_option("--out", infer.out, "Output file (default: stdout)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score detections against annotations");
  c_eval->add_option("--detections", eval.detections, "Detections file (text or COCO results JSON)")->required();
  c_eval->add_option("--annotations", eval.annotations, "COCO-style annotation JSON")->required();
  c_eval->add_option("--out", eval.out, "Write the report as key/value lines");

  std::uint64_t grad_seed = 1;
  int grad_points = 100;
  auto* c_grad = app.add_subcommand("check-grad", "Finite-difference checks of every analytic gradient");
  c_grad->add_option("--seed", grad_seed, "Seed for the random points");
  c_grad->add_option("--points", grad_points, "Points per check");

  Prop1Args prop1;
  auto* c_prop1 = app.add_subcommand("prop1", "Enumerate anchor labelings and check the threshold-moving claim");
  c_prop1->add_option("--K", prop1.k, "Anchors per location")->required();
  c_prop1->add_option("--C", prop1.c, "Number of classes")->required();
  c_prop1->add_option("--gamma", prop1.gammas, "Gamma values (default: 1/(K+1) and 1/(2K))");
  c_prop1->add_option("--samples", prop1.samples, "Samples when enumeration is too large");
  c_prop1->add_option("--seed", prop1.seed, "Sampling seed");

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const CLI::App* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
      return kUsageError;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*c_assign) return cmd_assign(assign, out);
    if (*c_stats) return cmd_stats(stats, out);
    if (*c_train) return cmd_train(train, *c_train, out);
    if (*c_infer) return cmd_infer(infer, out);
    if (*c_eval) return cmd_eval(eval, out);
    if (*c_grad) return cmd_check_grad(grad_seed, grad_points, out);
    if (*c_prop1) return cmd_prop1(prop1, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace semianchor
