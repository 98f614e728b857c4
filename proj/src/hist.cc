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

#include "sedkit/hist.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sedkit {

BinScale ParseBinScale(const std::string& name) {
  if (name == "linear") return BinScale::kLinear;
  if (name == "log" || name == "logarithmic") return BinScale::kLogarithmic;
  throw std::invalid_argument("unknown bin scale '" + name + "'");
}

std::string BinScaleName(BinScale scale) {
  return scale == BinScale::kLinear ? "linear" : "log";
}

std::vector<double> BinSpec::centers() const {
  std::vector<double> c(alphas.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = center(j);
  return c;
}

double BinSpec::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < alphas.size(); ++j) gap = std::min(gap, center(j) - center(j - 1));
  return gap;
}

std::vector<std::size_t> MaskIndices(const Tensor& mask) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0.0) idx.push_back(i);
  }
  return idx;
}

BatchStats ComputeBatchStats(const Tensor& abs_errors, const Tensor& mask) {
  if (abs_errors.size() != mask.size()) {
    throw std::invalid_argument("batch stats: errors and mask differ in size");
  }
  const std::vector<std::size_t> idx = MaskIndices(mask);
  if (idx.empty()) throw std::invalid_argument("batch stats need at least one valid pixel");
  double sum = 0.0;
  for (std::size_t i : idx) sum += abs_errors[i];
  const double n = static_cast<double>(idx.size());
  const double mu = sum / n;
  double ss = 0.0;
  for (std::size_t i : idx) {
    const double d = abs_errors[i] - mu;
    ss += d * d;
  }
  return BatchStats{mu, std::max(kSpreadFloor, std::sqrt(ss / n))};
}

BinSpec MakeCenters(double mu, double b, std::size_t bin_count, BinScale scale,
                    double alpha_max) {
  if (bin_count < 2) throw std::invalid_argument("bin count must be at least 2");
  if (!(alpha_max > 0.0)) throw std::invalid_argument("alpha_max must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("bin spread b must be positive");
  BinSpec spec;
  spec.b = b;
  spec.scale = scale;
  spec.alphas.resize(bin_count);
  const double m = static_cast<double>(bin_count - 1);
  if (scale == BinScale::kLinear) {
    spec.mu = mu;
    for (std::size_t j = 0; j < bin_count; ++j) {
      spec.alphas[j] = static_cast<double>(j) * alpha_max / m;
    }
    return spec;
  }
  spec.mu = std::max(mu, kSpreadFloor);
  if (!(spec.mu > 0.0)) throw std::invalid_argument("logarithmic bins need a positive mean");
  const double first = spec.mu;
  const double last = spec.mu + alpha_max * b;
  for (std::size_t j = 0; j < bin_count; ++j) {
    const double c = first * std::pow(last / first, static_cast<double>(j) / m);
    spec.alphas[j] = (c - spec.mu) / b;
  }
  spec.alphas.front() = 0.0;
  spec.alphas.back() = alpha_max;
  for (std::size_t j = 1; j < bin_count; ++j) {
    if (!(spec.center(j) > spec.center(j - 1))) {
      throw std::invalid_argument("bin centers are not strictly increasing");
    }
  }
  return spec;
}

double DefaultLambda2(const BinSpec& spec) {
  const double gap = spec.min_gap();
  return gap * gap / 4.0;
}

Histogram SoftHistogram(const Tensor& values, const Tensor& mask, const BinSpec& spec,
                        double lambda1, double lambda2) {
  if (!(lambda2 > 0.0)) throw std::invalid_argument("lambda2 must be positive");
  if (values.size() != mask.size()) {
    throw std::invalid_argument("soft histogram: values and mask differ in size");
  }
  if (spec.bin_count() < 2) throw std::invalid_argument("soft histogram needs at least 2 bins");
  std::vector<std::size_t> idx = MaskIndices(mask);
  if (idx.empty()) throw std::invalid_argument("soft histogram over an empty mask");
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  const std::size_t n = idx.size();
  const std::size_t k = spec.bin_count();
  const Tensor samples = Gather(values, idx);
  std::vector<double> grid(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) grid[i * k + j] = spec.center(j);
  }
  const Tensor centers(Shape{n, k}, std::move(grid));
  const Tensor dist = RepeatColumns(samples, k) - centers;
  const Tensor weights = Scale(Exp(Scale(Square(dist), -1.0 / lambda2)), lambda1);
  return Histogram{spec, Mean(Softmax(weights, 1), 0)};
}

}  // namespace sedkit
