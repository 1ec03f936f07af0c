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

#include "oracles/loss_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double focal(double p, int y, double alpha, double beta) {
  if (y == 1) return -alpha * std::pow(1.0 - p, beta) * std::log(p);
  return -(1.0 - alpha) * std::pow(p, beta) * std::log(1.0 - p);
}

double smoothed_focal(double p, double soft, int positive, double alpha, double beta) {
  if (positive == 1) return -alpha * std::pow(std::fabs(soft - p), beta) * soft * std::log(p);
  return focal(p, 0, alpha, beta);
}

double box_iou(const double a[4], const double b[4]) {
  const double iw = std::min(a[2], b[2]) - std::max(a[0], b[0]);
  const double ih = std::min(a[3], b[3]) - std::max(a[1], b[1]);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a[2] - a[0]) * (a[3] - a[1]);
  const double area_b = (b[2] - b[0]) * (b[3] - b[1]);
  return inter / (area_a + area_b - inter);
}

double neg_log_iou(const double a[4], const double b[4]) { return -std::log(box_iou(a, b)); }

double weighted_total(double cls, double reg, double ac, double lambda_reg, double lambda_ac) {
  return cls + lambda_reg * reg + lambda_ac * ac;
}

}  // namespace oracle
