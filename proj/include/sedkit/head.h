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

// Uncertainty head: pairwise differences of K full-resolution disparity maps
// fed through a pixel-wise MLP that emits K log-noise maps.

#ifndef SEDKIT_HEAD_H_
#define SEDKIT_HEAD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sedkit/tensor.h"

namespace sedkit {

inline constexpr double kLeakySlope = 0.01;

// Default layer widths: 6 PDV channels -> 8 -> 10 -> 4 log-noise maps.
// 6*8+8 + 8*10+10 + 10*4+4 = 190 parameters.
inline const std::vector<std::size_t> kDefaultLayerSizes = {6, 8, 10, 4};
inline constexpr std::size_t kDefaultParamCount = 190;

// Per-pixel feature matrix [pixels, K(K-1)/2] plus the map shape it came from.
struct Pdv {
  Shape map_shape;
  Tensor features;

  std::size_t channels() const { return features.shape()[1]; }
};

// (a, b) index pairs in channel order: (0,1), (0,2), ..., (K-2, K-1).
std::vector<std::pair<std::size_t, std::size_t>> PdvPairs(std::size_t levels);

// Channel for pair (a, b) holds maps[a] - maps[b]. Inputs are plain values.
Pdv ComputePdv(std::span<const Tensor> full_maps);

struct DenseLayer {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]
};

class UncertaintyHead {
 public:
  // Zero-initialized head with the given widths (at least input and output).
  explicit UncertaintyHead(std::vector<std::size_t> layer_sizes = kDefaultLayerSizes);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static UncertaintyHead Init(std::uint64_t seed,
                              std::vector<std::size_t> layer_sizes = kDefaultLayerSizes);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t input_width() const { return sizes_.front(); }
  std::size_t output_width() const { return sizes_.back(); }
  std::size_t param_count() const;

  // Layer-major: W (in x out, row-major) then b, for each layer.
  std::vector<double> Flatten() const;
  void Assign(std::span<const double> params);

  // One tensor per weight and bias, in Flatten() order.
  std::vector<Tensor> Parameters() const;
  static UncertaintyHead FromParameters(std::vector<std::size_t> layer_sizes,
                                        std::span<const Tensor> params);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
};

// s = W3 act(W2 act(W1 x + b1) + b2) + b3 per pixel, act = leaky ReLU. The
// layers may be tape-linked; returns one log-noise map per output channel,
// each shaped like pdv.map_shape.
std::vector<Tensor> HeadForward(const UncertaintyHead& head, const Pdv& pdv);

// Same computation with explicit layer tensors (used for training).
std::vector<Tensor> HeadForward(std::span<const DenseLayer> layers, const Pdv& pdv);

}  // namespace sedkit

#endif  // SEDKIT_HEAD_H_
