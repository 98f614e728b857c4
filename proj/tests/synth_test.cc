/*
 * Copyright 2026 The sedkit Authors.
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

#include "sedkit/synth.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <gtest/gtest.h>

#include "sedkit/hist.h"
#include "sedkit/loss.h"
#include "sedkit/parallel.h"

namespace sedkit {
namespace {

TEST(GenSceneTest, Deterministic) {
  const SyntheticScene a = GenScene(17, 48, 40, 20);
  const SyntheticScene b = GenScene(17, 48, 40, 20);
  EXPECT_EQ(a.left.values(), b.left.values());
  EXPECT_EQ(a.right.values(), b.right.values());
  EXPECT_EQ(a.disparity.values(), b.disparity.values());
  EXPECT_EQ(a.valid.values(), b.valid.values());
  EXPECT_NE(GenScene(18, 48, 40, 20).disparity.values(), a.disparity.values());
}

TEST(GenSceneTest, DisparityRangeAndStructure) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SyntheticScene s = GenScene(seed, 64, 48, 24);
    double lo = 1e9, hi = -1e9;
    for (double d : s.disparity.values()) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 24.0);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    EXPECT_GT(hi - lo, 1.0);  // not a single plane
    for (double v : s.left.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(GenSceneTest, ZeroDisparityMeansIdenticalViews) {
  const SyntheticScene s = GenScene(5, 40, 32, 0.0);
  for (std::size_t i = 0; i < s.left.size(); ++i) {
    EXPECT_EQ(s.disparity[i], 0.0);
    ASSERT_EQ(s.valid[i], 1.0);
    EXPECT_EQ(s.left[i], s.right[i]);
  }
}

// Independent resampling of the right view at x - d with linear interpolation.
TEST(GenSceneTest, WarpRoundTrip) {
  const SyntheticScene s = GenScene(23, 64, 48, 20);
  const std::size_t w = 64;
  std::size_t checked = 0;
  for (std::size_t y = 0; y < 48; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (s.valid[i] == 0.0) continue;
      const double sx = static_cast<double>(x) - s.disparity[i];
      const double x0 = std::floor(sx);
      const double t = sx - x0;
      const auto j = static_cast<std::size_t>(x0);
      const double r0 = s.right[y * w + j];
      const double r1 = j + 1 < w ? s.right[y * w + j + 1] : r0;
      EXPECT_NEAR(s.left[i], r0 + t * (r1 - r0), 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 48u * 40u);
}

TEST(GenSceneTest, SparseGroundTruth) {
  const SyntheticScene dense = GenScene(3, 64, 64, 16);
  const SyntheticScene sparse = GenScene(3, 64, 64, 16, 0.3);
  double nd = 0, ns = 0;
  for (std::size_t i = 0; i < dense.valid.size(); ++i) {
    nd += dense.valid[i];
    ns += sparse.valid[i];
    if (sparse.valid[i] != 0.0) {
      EXPECT_EQ(dense.valid[i], 1.0);
    }
  }
  EXPECT_NEAR(ns / nd, 0.3, 0.05);
}

TEST(GenSceneTest, RejectsTinyScenes) {
  EXPECT_THROW(GenScene(1, 16, 64, 8), std::invalid_argument);
}

TEST(GenShiftSceneTest, ConstantShift) {
  const SyntheticScene s = GenShiftScene(2, 40, 32, 5.0);
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 0; x < 40; ++x) {
      EXPECT_EQ(s.disparity[y * 40 + x], 5.0);
      EXPECT_EQ(s.valid[y * 40 + x], x >= 5 ? 1.0 : 0.0);
      if (x >= 5) {
        EXPECT_EQ(s.left[y * 40 + x], s.right[y * 40 + x - 5]);
      }
    }
  }
}

TEST(LaplaceTest, InverseCdf) {
  EXPECT_EQ(LaplaceFromUniform(0.5, 2.0), 0.0);
  EXPECT_NEAR(LaplaceFromUniform(0.75, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(LaplaceFromUniform(0.25, 3.0), -3.0 * std::log(2.0), 1e-15);
}

TEST(LaplaceTest, MonteCarloMoments) {
  const Shape shape{1000, 1000};
  const ErrorSample e = GenLaplaceErrors(77, shape, Tensor::Full(shape, 1.0));
  double abs_sum = 0, sum = 0, sq = 0;
  for (double v : e.errors.values()) {
    abs_sum += std::abs(v);
    sum += v;
    sq += v * v;
  }
  const double n = 1e6;
  EXPECT_NEAR(abs_sum / n, 1.0, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n - (sum / n) * (sum / n)), std::sqrt(2.0), 0.02);
}

TEST(LaplaceTest, ScaleFieldIsApplied) {
  const Shape shape{2, 1000};
  std::vector<double> scale(2000, 1.0);
  for (std::size_t i = 1000; i < 2000; ++i) scale[i] = 5.0;
  const ErrorSample e = GenLaplaceErrors(4, shape, Tensor(shape, scale));
  double a = 0, b = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    a += std::abs(e.errors[i]);
    b += std::abs(e.errors[1000 + i]);
  }
  EXPECT_NEAR(b / a, 5.0, 0.75);
}

TEST(LaplaceTest, IndependentDrawsHaveMatchingHistograms) {
  const Shape shape{100, 1000};
  const Tensor ones = Tensor::Full(shape, 1.0);
  const Tensor a = Abs(GenLaplaceErrors(1, shape, ones).errors);
  const Tensor b = Abs(GenLaplaceErrors(2, shape, ones).errors);
  const BatchStats st = ComputeBatchStats(a, ones);
  const BinSpec spec = MakeCenters(st.mu, st.b, 11, BinScale::kLinear, 10);
  const double l2 = DefaultLambda2(spec);
  const double kl =
      KlLoss(SoftHistogram(a, ones, spec, 10, l2), SoftHistogram(b, ones, spec, 10, l2)).item();
  EXPECT_LT(kl, 0.01);
}

TEST(LaplaceTest, IdealPredictorHasZeroKl) {
  const Shape shape{64, 64};
  const Tensor ones = Tensor::Full(shape, 1.0);
  const Tensor eps = Abs(GenLaplaceErrors(3, shape, Tensor::Full(shape, 2.0)).errors);
  const Tensor sigma = Tensor(shape, eps.values());
  const BatchStats st = ComputeBatchStats(eps, ones);
  const BinSpec spec = MakeCenters(st.mu, st.b, 11, BinScale::kLinear, 10);
  const double l2 = DefaultLambda2(spec);
  EXPECT_LT(KlLoss(SoftHistogram(eps, ones, spec, 10, l2), SoftHistogram(sigma, ones, spec, 10, l2))
                .item(),
            1e-10);
}

TEST(LaplaceTest, ThreadCountDoesNotChangeDraws) {
  const Shape shape{64, 80};
  const Tensor scale = SmoothField(9, 64, 80, 0.5, 3.0, 16);
  setenv("SEDKIT_THREADS", "1", 1);
  const std::vector<double> one = GenLaplaceErrors(5, shape, scale).errors.values();
  setenv("SEDKIT_THREADS", "4", 1);
  const std::vector<double> four = GenLaplaceErrors(5, shape, scale).errors.values();
  unsetenv("SEDKIT_THREADS");
  EXPECT_EQ(one, four);
}

TEST(SmoothFieldTest, RangeAndSmoothness) {
  const Tensor f = SmoothField(2, 32, 32, 0.5, 4.0, 16);
  for (double v : f.values()) {
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 4.0);
  }
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 1; x < 32; ++x) {
      EXPECT_LT(std::abs(f[y * 32 + x] - f[y * 32 + x - 1]), 3.5 * 1.5 / 16 + 1e-12);
    }
  }
}

TEST(ParallelTest, WorkerCountFromEnvironment) {
  setenv("SEDKIT_THREADS", "3", 1);
  EXPECT_EQ(WorkerCount(), 3u);
  setenv("SEDKIT_THREADS", "junk", 1);
  EXPECT_GE(WorkerCount(), 1u);
  unsetenv("SEDKIT_THREADS");
  std::vector<int> hit(1000, 0);
  ParallelFor(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
}

}  // namespace
}  // namespace sedkit
