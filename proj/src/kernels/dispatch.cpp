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

#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "semianchor/kernels.hpp"

namespace semianchor::kernels {

#if defined(SEMIANCHOR_HAVE_AVX2)
const KernelTable* avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SEMIANCHOR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* detect() {
  if (const char* env = std::getenv("SEMIANCHOR_SIMD")) {
    if (std::string_view(env) == "scalar") return &scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable*& current() {
  static const KernelTable* table = detect();
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(SEMIANCHOR_HAVE_AVX2)
  if (cpu_has_avx2()) return avx2_kernel_table();
#endif
  return nullptr;
}

const KernelTable& active() { return *current(); }

void set_active(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      current() = &scalar_table();
      return;
    case Isa::kAvx2:
      if (const KernelTable* t = avx2_table()) {
        current() = t;
        return;
      }
      throw std::runtime_error("AVX2 kernels are not available on this build or CPU");
  }
}

}  // namespace semianchor::kernels
