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

// Error-statistics bin layouts and differentiable soft-histograms.

#ifndef SEDKIT_HIST_H_
#define SEDKIT_HIST_H_

#include <cstddef>
#include <string>
#include <vector>

#include "sedkit/tensor.h"

namespace sedkit {

inline constexpr double kSpreadFloor = 1e-6;

enum class BinScale { kLinear, kLogarithmic };

BinScale ParseBinScale(const std::string& name);
std::string BinScaleName(BinScale scale);

struct BatchStats {
  double mu = 0.0;  // mean |error|
  double b = 0.0;   // population standard deviation, floored at kSpreadFloor
};

// Bin centers C_j = mu + alpha_j * b, j = 0..m.
struct BinSpec {
  double mu = 0.0;
  double b = 0.0;
  std::vector<double> alphas;
  BinScale scale = BinScale::kLinear;

  std::size_t bin_count() const { return alphas.size(); }
  std::size_t last_index() const { return alphas.size() - 1; }
  double center(std::size_t j) const { return mu + alphas[j] * b; }
  std::vector<double> centers() const;
  // Smallest gap between adjacent centers.
  double min_gap() const;

  bool operator==(const BinSpec&) const = default;
};

struct Histogram {
  BinSpec spec;
  Tensor mass;  // [bin_count], sums to 1
};

// Masked mean and population std of `abs_errors` (values read detached).
// Throws if the mask selects no pixel.
BatchStats ComputeBatchStats(const Tensor& abs_errors, const Tensor& mask);

// Linear: alpha_j = j * alpha_max / m. Logarithmic: centers geometric between
// C_0 = mu (floored at kSpreadFloor) and C_m = mu + alpha_max * b.
BinSpec MakeCenters(double mu, double b, std::size_t bin_count, BinScale scale, double alpha_max);

// Default kernel width: (min adjacent center gap)^2 / 4.
double DefaultLambda2(const BinSpec& spec);

// H(j) = 1/n sum_i softmax_j(lambda1 * exp(-(C_j - v_i)^2 / lambda2)) over the
// masked samples. Bin centers are constants; the result is differentiable in
// `values`. Masked samples are gathered in ascending value order (ties by
// index) before accumulation, so the result depends only on the multiset of
// selected values.
Histogram SoftHistogram(const Tensor& values, const Tensor& mask, const BinSpec& spec,
                        double lambda1, double lambda2);

// Indices of mask[i] != 0, in index order.
std::vector<std::size_t> MaskIndices(const Tensor& mask);

}  // namespace sedkit

#endif  // SEDKIT_HIST_H_
