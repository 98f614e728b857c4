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

// Training-free multi-resolution stereo matcher: ZNCC cost volumes over an
// average-pooled image pyramid, soft-argmax disparity regression, and
// bilinear upsampling of every level to full resolution.
//
// Images and disparity maps are [height, width] tensors. A left pixel (x, y)
// is compared with the right pixel (x - d, y).

#ifndef SEDKIT_STEREO_TOY_H_
#define SEDKIT_STEREO_TOY_H_

#include <cstddef>
#include <vector>

#include "sedkit/tensor.h"

namespace sedkit {

inline constexpr double kNccFloor = 1e-8;
inline constexpr double kOutOfRangeCost = -1.0;
inline constexpr std::size_t kPyramidLevels = 4;

struct CostVolume {
  double scale = 1.0;             // resolution relative to full
  std::size_t max_disparity = 0;  // candidates 0..max_disparity
  Tensor costs;                   // [height, width, max_disparity + 1]
};

struct MatcherOptions {
  std::size_t max_disparity = 32;  // at full resolution
  std::size_t window = 5;
  double temperature = 0.1;
};

// Zero-mean NCC of `window` x `window` patches; patch pixels outside the image
// replicate the border. Candidates with x - d < 0 get kOutOfRangeCost.
CostVolume BuildCostVolume(const Tensor& left, const Tensor& right, std::size_t max_disparity,
                           std::size_t window);

// d(x, y) = sum_d d * softmax_d(cost / temperature). Differentiable in `costs`
// ([height, width, candidates]).
Tensor SoftArgmax(const Tensor& costs, double temperature);
Tensor SoftArgmax(const CostVolume& volume, double temperature);

// 2x2 mean pooling; odd trailing rows/columns average only in-bounds pixels.
Tensor AveragePool2(const Tensor& image);

// Bilinear interpolation with pixel-center alignment and border clamping,
// values multiplied by to_scale / from_scale (which must be a power of two).
// The output is out_height x out_width, by default the input size times the
// ratio.
Tensor UpsampleDisparity(const Tensor& map, double from_scale, double to_scale,
                         std::size_t out_height = 0, std::size_t out_width = 0);

struct PyramidLevel {
  double scale = 1.0;
  Tensor native;  // disparity in native-resolution pixels
  Tensor full;    // upsampled to full resolution, in full-resolution pixels
};

// Levels ordered coarse -> fine (scales 1/8, 1/4, 1/2, 1).
struct DisparityPyramid {
  std::vector<PyramidLevel> levels;

  std::vector<Tensor> full_maps() const;
};

DisparityPyramid MatchPyramid(const Tensor& left, const Tensor& right,
                              const MatcherOptions& options = {});

}  // namespace sedkit

#endif  // SEDKIT_STEREO_TOY_H_
