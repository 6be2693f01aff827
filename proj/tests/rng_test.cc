/*
 * Copyright 2026 The predmat Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "predmat/rng.h"

namespace predmat::rng {
namespace {

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 gen(0);
  EXPECT_EQ(gen.Next(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(gen.Next(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(gen.Next(), 0x06C45D188009454Full);
}

TEST(SplitMix64, UniformUsesTopBits) {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.Uniform();
    EXPECT_EQ(u, static_cast<double>(b.Next() >> 11) * 0x1.0p-53);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SplitMix64, OpenZeroUniformIsPositive) {
  SplitMix64 gen(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = gen.UniformOpenZero();
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(SplitMix64, NormalMoments) {
  SplitMix64 gen(7);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = gen.Normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(SplitMix64, BelowStaysInRangeAndCoversIt) {
  SplitMix64 gen(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = gen.Below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  EXPECT_EQ(gen.Below(1), 0u);
}

TEST(DeriveSeed, DistinctAndDeterministic) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(DeriveSeed(5, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(DeriveSeed(5, 17), DeriveSeed(5, 17));
  EXPECT_NE(DeriveSeed(5, 17), DeriveSeed(6, 17));
}

}  // namespace
}  // namespace predmat::rng
