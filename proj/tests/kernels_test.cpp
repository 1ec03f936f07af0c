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

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "semianchor/kernels.hpp"

namespace semianchor::kernels {
namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_table();
    if (!simd_) GTEST_SKIP() << "AVX2 variant not available on this machine";
  }
  const KernelTable* simd_ = nullptr;
};

TEST_F(KernelEquivalence, IouBitExact) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0), ext(0.0, 80.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    std::vector<double> x1(n), y1(n), x2(n), y2(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      x1[i] = u(rng);
      y1[i] = u(rng);
      x2[i] = x1[i] + ext(rng);
      y2[i] = y1[i] + ext(rng);
    }
    if (n > 2) {  // degenerate and identical boxes
      x2[1] = x1[1];
      x1[2] = -5;
      y1[2] = -5;
      x2[2] = 30;
      y2[2] = 40;
    }
    scalar_table().iou_one_to_many(-5, -5, 30, 40, x1.data(), y1.data(), x2.data(), y2.data(), n, a.data());
    simd_->iou_one_to_many(-5, -5, 30, 40, x1.data(), y1.data(), x2.data(), y2.data(), n, b.data());
    for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(a[i], b[i])) << "n=" << n << " i=" << i;
  }
}

TEST_F(KernelEquivalence, DotAxpyScaleBitExact) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 3.0);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 7u, 8u, 9u, 31u, 257u}) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
    }
    ASSERT_TRUE(same_bits(scalar_table().dot(x.data(), y.data(), n), simd_->dot(x.data(), y.data(), n)));
    std::vector<double> ys = y, yv = y;
    scalar_table().axpy(-0.37, x.data(), ys.data(), n);
    simd_->axpy(-0.37, x.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(ys[i], yv[i]));
    std::vector<double> os(n), ov(n);
    scalar_table().scale(1.7, x.data(), os.data(), n);
    simd_->scale(1.7, x.data(), ov.data(), n);
    for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(os[i], ov[i]));
  }
}

TEST(Kernels, ScalarDotMatchesPlainSum) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(scalar_table().dot(a.data(), b.data(), a.size()), 35.0);
}

TEST(Kernels, SwitchingVariants) {
  const Isa before = active().isa;
  set_active(Isa::kScalar);
  EXPECT_EQ(active().isa, Isa::kScalar);
  if (avx2_table()) {
    set_active(Isa::kAvx2);
    EXPECT_EQ(active().isa, Isa::kAvx2);
  } else {
    EXPECT_THROW(set_active(Isa::kAvx2), std::exception);
  }
  set_active(before);
}

}  // namespace
}  // namespace semianchor::kernels
