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

// Deterministic synthetic stereo scenes and Laplacian error samples. All
// randomness is counter-based (see rng.h).

#ifndef SEDKIT_SYNTH_H_
#define SEDKIT_SYNTH_H_

#include <cstddef>
#include <cstdint>

#include "sedkit/tensor.h"

namespace sedkit {

// left(x, y) == right(x - disparity(x, y), y), right sampled with linear
// interpolation along the row. `valid` marks pixels whose match lies inside
// the right image (and, with gt_density < 1, survives random sparsification).
struct SyntheticScene {
  Tensor left;
  Tensor right;
  Tensor disparity;
  Tensor valid;
  std::uint64_t seed = 0;
};

struct ErrorSample {
  Tensor errors;  // signed, Laplace(0, scale)
  Tensor scale;
};

// Four octaves of value noise (cells 8, 4, 2 and 1 px), in [0, 1].
double TextureAt(std::uint64_t seed, double x, double y);
Tensor GenTexture(std::uint64_t seed, std::size_t height, std::size_t width);

// Smooth random field with values in [lo, hi]; `cell` is the lattice spacing
// in pixels.
Tensor SmoothField(std::uint64_t seed, std::size_t height, std::size_t width, double lo,
                   double hi, double cell);

// Samples `right` at (x - disparity(x, y), y). Out-of-frame pixels fall back
// to `fallback` and are marked invalid.
Tensor WarpRightToLeft(const Tensor& right, const Tensor& disparity, const Tensor& fallback,
                       Tensor* valid);

// Textured pair with 2-4 piecewise-smooth disparity regions in [0, d_max].
// Requires width, height >= 32.
SyntheticScene GenScene(std::uint64_t seed, std::size_t width, std::size_t height, double d_max,
                        double gt_density = 1.0);

// Constant-disparity pair: left(x) = right(x - shift).
SyntheticScene GenShiftScene(std::uint64_t seed, std::size_t width, std::size_t height,
                             double shift);

// Inverse-CDF draw: -b * sign(u - 0.5) * ln(1 - 2|u - 0.5|).
double LaplaceFromUniform(double u, double scale);

ErrorSample GenLaplaceErrors(std::uint64_t seed, const Shape& shape, const Tensor& scale_field);

}  // namespace sedkit

#endif  // SEDKIT_SYNTH_H_
