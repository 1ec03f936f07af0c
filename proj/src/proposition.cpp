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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "semianchor/assignment.hpp"

namespace semianchor {
namespace {

std::string describe(std::span<const int> labels) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < labels.size(); ++k) os << (k ? "," : "") << labels[k];
  os << ']';
  return os.str();
}

// Returns an empty string when the assignment satisfies the claim.
std::string check_assignment(std::span<const int> labels, int num_classes, double gamma) {
  const std::vector<double> scores = score_location(labels, num_classes);
  std::vector<int> counts(static_cast<std::size_t>(num_classes) + 1, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  int foreground = 0;
  for (int c = 1; c <= num_classes; ++c) foreground += counts[static_cast<std::size_t>(c)];
  if (foreground == 0) return {};

  const ThresholdMoveResult moved = threshold_move(scores, gamma);
  if (moved.label == 0) return "location with foreground anchors labeled background";

  double total = 0.0;
  for (double v : moved.rescaled) total += v;
  const double bound_denominator = 1.0 + foreground;
  const double background = moved.rescaled[0] / total;
  if (!(background < 1.0 / bound_denominator)) {
    std::ostringstream os;
    os << "normalized background score " << background << " not below 1/(1+n) = "
       << 1.0 / bound_denominator;
    return os.str();
  }
  for (int c = 1; c <= num_classes; ++c) {
    const int n_c = counts[static_cast<std::size_t>(c)];
    if (n_c == 0) continue;
    const double normalized = moved.rescaled[static_cast<std::size_t>(c)] / total;
    if (!(normalized > n_c / bound_denominator)) {
      std::ostringstream os;
      os << "normalized score of class " << c << " is " << normalized << ", not above n_c/(1+n) = "
         << n_c / bound_denominator;
      return os.str();
    }
  }
  return {};
}

}  // namespace

Prop1Report verify_proposition_1(int num_anchors, int num_classes, double gamma,
                                 Prop1Options options) {
  if (num_anchors < 1 || num_classes < 1) {
    throw std::invalid_argument("verify_proposition_1: K and C must be positive");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");

  Prop1Report report;
  report.num_anchors = num_anchors;
  report.num_classes = num_classes;
  report.gamma = gamma;

  const std::uint64_t base = static_cast<std::uint64_t>(num_classes) + 1;
  std::uint64_t total = 1;
  bool overflow = false;
  for (int k = 0; k < num_anchors && !overflow; ++k) {
    if (total > options.max_exhaustive / base + 1) overflow = true;
    total *= base;
  }
  report.exhaustive = !overflow && total <= options.max_exhaustive;

  std::vector<int> labels(static_cast<std::size_t>(num_anchors), 0);
  auto visit = [&]() {
    bool any_fg = false;
    for (int l : labels) any_fg = any_fg || l > 0;
    if (!any_fg) return true;
    ++report.cases_checked;
    std::string failure = check_assignment(labels, num_classes, gamma);
    if (failure.empty()) return true;
    report.passed = false;
    report.counterexample = labels;
    report.failure = failure + " for anchor labels " + describe(labels);
    return false;
  };

  if (report.exhaustive) {
    // Anchor 0 is the least significant digit.
    for (std::uint64_t m = 0; m < total; ++m) {
      std::uint64_t rest = m;
      for (auto& l : labels) {
        l = static_cast<int>(rest % base);
        rest /= base;
      }
      if (!visit()) break;
    }
    return report;
  }

  // Sampling: draw the foreground count uniformly first so that the sparse
  // assignments the claim is about are well covered.
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> count_dist(1, num_anchors);
  std::uniform_int_distribution<int> class_dist(1, num_classes);
  std::vector<int> order(labels.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    const int n_fg = count_dist(rng);
    std::shuffle(order.begin(), order.end(), rng);
    std::fill(labels.begin(), labels.end(), 0);
    for (int j = 0; j < n_fg; ++j) labels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = class_dist(rng);
    if (!visit()) break;
  }
  return report;
}

}  // namespace semianchor
