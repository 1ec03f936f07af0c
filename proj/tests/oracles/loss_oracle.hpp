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

// Direct transcriptions of the loss formulas, kept free of the library's
// clamping and branching so that tests can compare against them.

namespace oracle {

double focal(double p, int y, double alpha, double beta);
double smoothed_focal(double p, double soft, int positive, double alpha, double beta);
// IoU from the raw coordinate arithmetic (x1, y1, x2, y2).
double box_iou(const double a[4], const double b[4]);
double neg_log_iou(const double a[4], const double b[4]);
double weighted_total(double cls, double reg, double ac, double lambda_reg, double lambda_ac);

}  // namespace oracle
