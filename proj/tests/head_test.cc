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

#include "sedkit/head.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sedkit/gradcheck_suite.h"

namespace sedkit {
namespace {

std::vector<Tensor> ConstantMaps(const std::vector<double>& values, const Shape& shape) {
  std::vector<Tensor> maps;
  for (double v : values) maps.push_back(Tensor::Full(shape, v));
  return maps;
}

std::vector<Tensor> RandomMaps(std::uint64_t seed, std::size_t k, const Shape& shape) {
  oracle::Lcg rng(seed);
  std::vector<Tensor> maps;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> v(ShapeSize(shape));
    for (double& x : v) x = rng.Uniform(0, 30);
    maps.emplace_back(shape, v);
  }
  return maps;
}

TEST(PdvTest, Examples) {
  const Pdv same = ComputePdv(ConstantMaps({3, 3, 3, 3}, {2, 2}));
  for (double v : same.features.values()) EXPECT_EQ(v, 0.0);

  const Pdv pdv = ComputePdv(ConstantMaps({1, 2, 3, 4}, {2, 3}));
  ASSERT_EQ(pdv.features.shape(), (Shape{6, 6}));
  const std::vector<double> expected = {-1, -2, -3, -1, -2, -1};
  for (std::size_t p = 0; p < 6; ++p) {
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(pdv.features[p * 6 + c], expected[c]);
  }
}

// Permuting the maps maps channel (a, b) to the channel of the permuted pair,
// negated when the pair order flips.
TEST(PdvTest, SignedPermutation) {
  const Shape shape{3, 3};
  const std::vector<Tensor> maps = RandomMaps(2, 4, shape);
  const Pdv base = ComputePdv(maps);
  const auto pairs = PdvPairs(4);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> channel_of;
  for (std::size_t c = 0; c < pairs.size(); ++c) channel_of[pairs[c]] = c;

  for (const std::vector<std::size_t>& perm :
       {std::vector<std::size_t>{1, 0, 2, 3}, std::vector<std::size_t>{3, 1, 0, 2}}) {
    std::vector<Tensor> permuted;
    for (std::size_t i : perm) permuted.push_back(maps[i]);
    const Pdv p = ComputePdv(permuted);
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const std::size_t a = perm[pairs[c].first], b = perm[pairs[c].second];
      const double sign = a < b ? 1.0 : -1.0;
      const std::size_t src = channel_of.at({std::min(a, b), std::max(a, b)});
      for (std::size_t px = 0; px < 9; ++px) {
        EXPECT_EQ(p.features[px * 6 + c], sign * base.features[px * 6 + src]);
      }
    }
  }
}

TEST(PdvTest, RejectsMismatchedShapes) {
  std::vector<Tensor> maps = ConstantMaps({1, 2}, {2, 2});
  maps.push_back(Tensor::Full({3, 2}, 1.0));
  EXPECT_THROW(ComputePdv(maps), std::invalid_argument);
}

TEST(HeadTest, ParameterCountEnumeration) {
  EXPECT_EQ(UncertaintyHead::Init(1).param_count(), 190u);
  EXPECT_EQ(UncertaintyHead::Init(99).Flatten().size(), 190u);
  std::vector<std::pair<int, int>> solutions;
  for (int h1 = 1; h1 <= 32; ++h1) {
    for (int h2 = 1; h2 <= 32; ++h2) {
      if (6 * h1 + h1 + h1 * h2 + h2 + h2 * 4 + 4 == 190) solutions.emplace_back(h1, h2);
    }
  }
  // (h1 + 5)(h2 + 7) = 221 = 13 * 17, so exactly two pairs fit; the default
  // is the widening one.
  EXPECT_EQ(solutions, (std::vector<std::pair<int, int>>{{8, 10}, {12, 6}}));
  EXPECT_EQ(kDefaultLayerSizes, (std::vector<std::size_t>{6, 8, 10, 4}));
}

TEST(HeadTest, InitIsDeterministic) {
  EXPECT_EQ(UncertaintyHead::Init(5).Flatten(), UncertaintyHead::Init(5).Flatten());
  EXPECT_NE(UncertaintyHead::Init(5).Flatten(), UncertaintyHead::Init(6).Flatten());
  const UncertaintyHead head = UncertaintyHead::Init(5);
  for (const DenseLayer& layer : head.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.shape()[0]));
    for (double w : layer.weight.values()) EXPECT_LE(std::abs(w), bound);
    for (double b : layer.bias.values()) EXPECT_EQ(b, 0.0);
  }
}

TEST(HeadTest, ZeroHeadGivesUnitSigma) {
  const Pdv pdv = ComputePdv(RandomMaps(3, 4, {4, 5}));
  const std::vector<Tensor> s = HeadForward(UncertaintyHead(), pdv);
  ASSERT_EQ(s.size(), 4u);
  for (const Tensor& m : s) {
    EXPECT_EQ(m.shape(), (Shape{4, 5}));
    for (double v : m.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(HeadTest, HandComputedSinglePixel) {
  // Widths 6 -> 1 -> 1 -> 4 with hand-set weights.
  UncertaintyHead head({6, 1, 1, 4});
  std::vector<double> p;
  p.insert(p.end(), {1, -1, 0, 0, 0, 2});  // W1
  p.push_back(0.5);                         // b1
  p.push_back(-3);                          // W2
  p.push_back(1);                           // b2
  p.insert(p.end(), {1, 2, -1, 0.5});       // W3
  p.insert(p.end(), {0, 0.1, 0, -0.2});     // b3
  head.Assign(p);
  const Pdv pdv{{1, 1}, Tensor({1, 6}, {2, 1, 9, 9, 9, -1})};
  // z1 = 2 - 1 - 2 + 0.5 = -0.5 -> -0.005; z2 = 0.015 + 1 = 1.015
  const double a2 = 1.015;
  const std::vector<Tensor> s = HeadForward(head, pdv);
  EXPECT_NEAR(s[0][0], a2, 1e-12);
  EXPECT_NEAR(s[1][0], 2 * a2 + 0.1, 1e-12);
  EXPECT_NEAR(s[2][0], -a2, 1e-12);
  EXPECT_NEAR(s[3][0], 0.5 * a2 - 0.2, 1e-12);
}

TEST(HeadTest, PixelShuffleEquivariance) {
  const UncertaintyHead head = UncertaintyHead::Init(7);
  const Pdv pdv = ComputePdv(RandomMaps(8, 4, {1, 12}));
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[7]);
  std::vector<double> shuffled(pdv.features.size());
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t c = 0; c < 6; ++c) shuffled[i * 6 + c] = pdv.features[perm[i] * 6 + c];
  }
  const std::vector<Tensor> a = HeadForward(head, pdv);
  const std::vector<Tensor> b = HeadForward(head, Pdv{{1, 12}, Tensor({12, 6}, shuffled)});
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(b[k][i], a[k][perm[i]]);
  }
}

TEST(HeadTest, FlattenAssignRoundTrip) {
  const UncertaintyHead a = UncertaintyHead::Init(11);
  UncertaintyHead b;
  b.Assign(a.Flatten());
  EXPECT_EQ(a.Flatten(), b.Flatten());
  EXPECT_THROW(b.Assign(std::vector<double>(189, 0.0)), std::invalid_argument);
  EXPECT_EQ(UncertaintyHead::FromParameters(kDefaultLayerSizes, a.Parameters()).Flatten(),
            a.Flatten());
}

TEST(HeadTest, WidthMismatchThrows) {
  const Pdv pdv = ComputePdv(RandomMaps(1, 3, {2, 2}));  // 3 channels
  EXPECT_THROW(HeadForward(UncertaintyHead(), pdv), std::invalid_argument);
}

TEST(HeadTest, GradCheckAllParameters) {
  GradCheckOptions opt;
  opt.instances = 3;
  for (const GradCheckOutcome& o : RunGradCheckSuite(opt)) {
    if (o.name == "head_forward") {
      EXPECT_LT(o.worst_rel_error, 1e-4);
    }
  }
}

}  // namespace
}  // namespace sedkit
