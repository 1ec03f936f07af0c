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

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is picked once at startup from CPUID; SEMIANCHOR_SIMD=scalar
// forces the reference path. Every variant must reproduce the scalar results
// bit-for-bit, so the scalar dot product uses the same four-lane blocking as
// the vector code.

#include <cstddef>
#include <string_view>

namespace semianchor::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // out[i] = IoU(query, box_i) for boxes given as coordinate columns.
  void (*iou_one_to_many)(double qx1, double qy1, double qx2, double qy2, const double* x1,
                          const double* y1, const double* x2, const double* y2, std::size_t n,
                          double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = alpha * x
  void (*scale)(double alpha, const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

const KernelTable& active();
void set_active(Isa isa);  // throws if the requested variant is unavailable

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scale(double alpha, const double* x, double* out, std::size_t n) {
  active().scale(alpha, x, out, n);
}

}  // namespace semianchor::kernels
