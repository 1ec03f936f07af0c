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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semianchor/trainer.hpp"

namespace semianchor {

enum class AblationAxis { kAcHead, kStrategy, kSigma, kGamma, kAnchors };

const char* axis_name(AblationAxis axis);
std::optional<AblationAxis> parse_axis(const std::string& name);

struct AblationRow {
  std::string setting;
  std::vector<EvalReport> reports;  // one per seed, in seed order
  double mean_ap() const;
  double mean_ap50() const;
};

struct AblationTable {
  AblationAxis axis = AblationAxis::kAcHead;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;
  const AblationRow& row(const std::string& setting) const;  // throws if absent
};

// Trains and evaluates every setting of one axis on each seed; all settings
// for a seed share its training and test scenes.
//   ac_head:  "ac_head" (Top-1 with the anchor classifier) and
//             "no_ac_best_of_10" (trained without it, random anchor per location)
//   strategy: one model per seed, decoded with top1, top2, top5, pos0.1,
//             pos0.5 and pos0
//   sigma:    "unit" (soft labels fixed to 1), 0.1, 0.3, 0.5, 0.7, 0.9
//   gamma:    "simplified", then threshold moving with 1/(K+1), 0.1, 0.2
//   anchors:  K1, K9, K25 (1x1, 3x3, 5x5 scales x aspects)
AblationTable run_ablation(AblationAxis axis, const TrainConfig& base,
                           std::span<const std::uint64_t> seeds);

std::string format_ablation(const AblationTable& table);

}  // namespace semianchor
