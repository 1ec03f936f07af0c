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

#include <immintrin.h>

#include <algorithm>

#include "semianchor/kernels.hpp"

namespace semianchor::kernels {

namespace {

void iou_one_to_many_avx2(double qx1, double qy1, double qx2, double qy2, const double* x1,
                          const double* y1, const double* x2, const double* y2, std::size_t n,
                          double* out) {
  const double qarea = (qx2 - qx1) * (qy2 - qy1);
  const __m256d vqx1 = _mm256_set1_pd(qx1);
  const __m256d vqy1 = _mm256_set1_pd(qy1);
  const __m256d vqx2 = _mm256_set1_pd(qx2);
  const __m256d vqy2 = _mm256_set1_pd(qy2);
  const __m256d vqarea = _mm256_set1_pd(qarea);
  const __m256d zero = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bx1 = _mm256_loadu_pd(x1 + i);
    const __m256d by1 = _mm256_loadu_pd(y1 + i);
    const __m256d bx2 = _mm256_loadu_pd(x2 + i);
    const __m256d by2 = _mm256_loadu_pd(y2 + i);
    // Operand order mirrors std::min/std::max so signed zeros agree with the
    // scalar reference: std::max(a, b) == _mm256_max_pd(b, a).
    const __m256d iw = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(bx2, vqx2), _mm256_max_pd(bx1, vqx1)), zero);
    const __m256d ih = _mm256_max_pd(
        _mm256_sub_pd(_mm256_min_pd(by2, vqy2), _mm256_max_pd(by1, vqy1)), zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area = _mm256_mul_pd(_mm256_sub_pd(bx2, bx1), _mm256_sub_pd(by2, by1));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(vqarea, area), inter);
    const __m256d positive = _mm256_cmp_pd(uni, zero, _CMP_GT_OQ);
    const __m256d ratio = _mm256_div_pd(inter, uni);
    _mm256_storeu_pd(out + i, _mm256_and_pd(positive, ratio));
  }
  for (; i < n; ++i) {
    const double iw = std::max(0.0, std::min(qx2, x2[i]) - std::max(qx1, x1[i]));
    const double ih = std::max(0.0, std::min(qy2, y2[i]) - std::max(qy1, y1[i]));
    const double inter = iw * ih;
    const double area = (x2[i] - x1[i]) * (y2[i] - y1[i]);
    const double uni = (qarea + area) - inter;
    out[i] = uni > 0.0 ? inter / uni : 0.0;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

}  // namespace

const KernelTable* avx2_kernel_table() {
  static const KernelTable table{Isa::kAvx2, "avx2", &iou_one_to_many_avx2, &dot_avx2, &axpy_avx2,
                                 &scale_avx2};
  return &table;
}

}  // namespace semianchor::kernels
