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

#include "semianchor/kernels.hpp"

namespace semianchor::kernels {
namespace {

void iou_one_to_many_scalar(double qx1, double qy1, double qx2, double qy2, const double* x1,
                            const double* y1, const double* x2, const double* y2, std::size_t n,
                            double* out) {
  const double qarea = (qx2 - qx1) * (qy2 - qy1);
  for (std::size_t i = 0; i < n; ++i) {
    const double iw = std::max(0.0, std::min(qx2, x2[i]) - std::max(qx1, x1[i]));
    const double ih = std::max(0.0, std::min(qy2, y2[i]) - std::max(qy1, y1[i]));
    const double inter = iw * ih;
    const double area = (x2[i] - x1[i]) * (y2[i] - y1[i]);
    const double uni = (qarea + area) - inter;
    out[i] = uni > 0.0 ? inter / uni : 0.0;
  }
}

// Four interleaved partial sums combined as (s0 + s1) + (s2 + s3), then the
// tail in order. The AVX2 variant accumulates the same lanes.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s[0] += a[i] * b[i];
    s[1] += a[i + 1] * b[i + 1];
    s[2] += a[i + 2] * b[i + 2];
    s[3] += a[i + 3] * b[i + 3];
  }
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, "scalar", &iou_one_to_many_scalar, &dot_scalar,
                                 &axpy_scalar, &scale_scalar};
  return table;
}

}  // namespace semianchor::kernels
