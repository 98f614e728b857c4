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

#include "sedkit/stereo_toy.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sedkit/parallel.h"

namespace sedkit {

namespace {

void RequireImage(const Tensor& t, const char* what) {
  if (t.rank() != 2 || t.size() == 0) {
    throw std::invalid_argument(std::string(what) + " must be a non-empty [height, width] map");
  }
}

std::size_t Clamp(std::ptrdiff_t v, std::size_t n) {
  if (v < 0) return 0;
  if (static_cast<std::size_t>(v) >= n) return n - 1;
  return static_cast<std::size_t>(v);
}

}  // namespace

CostVolume BuildCostVolume(const Tensor& left, const Tensor& right, std::size_t max_disparity,
                           std::size_t window) {
  RequireImage(left, "left image");
  RequireImage(right, "right image");
  if (left.shape() != right.shape()) throw std::invalid_argument("stereo images differ in shape");
  if (window % 2 == 0) throw std::invalid_argument("matching window must be odd");
  const std::size_t h = left.shape()[0], w = left.shape()[1];
  if (max_disparity >= w) {
    throw std::invalid_argument("max disparity " + std::to_string(max_disparity) +
                                " must be smaller than image width " + std::to_string(w));
  }
  const std::size_t candidates = max_disparity + 1;
  const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(window / 2);
  const double count = static_cast<double>(window * window);
  const auto& lv = left.values();
  const auto& rv = right.values();
  std::vector<double> costs(h * w * candidates);

  ParallelFor(h, [&](std::size_t y) {
    std::vector<double> lpatch(window * window), rpatch(window * window);
    for (std::size_t x = 0; x < w; ++x) {
      double lmean = 0.0;
      std::size_t k = 0;
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        const std::size_t yy = Clamp(static_cast<std::ptrdiff_t>(y) + dy, h);
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          lpatch[k] = lv[yy * w + Clamp(static_cast<std::ptrdiff_t>(x) + dx, w)];
          lmean += lpatch[k++];
        }
      }
      lmean /= count;
      double lvar = 0.0;
      for (double& v : lpatch) {
        v -= lmean;
        lvar += v * v;
      }
      double* out = &costs[(y * w + x) * candidates];
      for (std::size_t d = 0; d < candidates; ++d) {
        const std::ptrdiff_t xr = static_cast<std::ptrdiff_t>(x) - static_cast<std::ptrdiff_t>(d);
        if (xr < 0) {
          out[d] = kOutOfRangeCost;
          continue;
        }
        double rmean = 0.0;
        k = 0;
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
          const std::size_t yy = Clamp(static_cast<std::ptrdiff_t>(y) + dy, h);
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            rpatch[k] = rv[yy * w + Clamp(xr + dx, w)];
            rmean += rpatch[k++];
          }
        }
        rmean /= count;
        double rvar = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < rpatch.size(); ++i) {
          const double rc = rpatch[i] - rmean;
          rvar += rc * rc;
          cov += lpatch[i] * rc;
        }
        const double ncc = cov / std::max(kNccFloor, std::sqrt(lvar * rvar));
        out[d] = std::clamp(ncc, -1.0, 1.0);
      }
    }
  });
  return CostVolume{1.0, max_disparity, Tensor(Shape{h, w, candidates}, std::move(costs))};
}

Tensor SoftArgmax(const Tensor& costs, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("soft-argmax temperature must be positive");
  if (costs.rank() != 3) throw std::invalid_argument("soft-argmax expects [height, width, candidates]");
  const std::size_t h = costs.shape()[0], w = costs.shape()[1], c = costs.shape()[2];
  std::vector<double> candidates(c);
  for (std::size_t d = 0; d < c; ++d) candidates[d] = static_cast<double>(d);
  const Tensor probs = Reshape(Softmax(Scale(costs, 1.0 / temperature), 2), Shape{h * w, c});
  const Tensor expectation = MatMul(probs, Tensor(Shape{c, 1}, std::move(candidates)));
  return Reshape(expectation, Shape{h, w});
}

Tensor SoftArgmax(const CostVolume& volume, double temperature) {
  return SoftArgmax(volume.costs, temperature);
}

Tensor AveragePool2(const Tensor& image) {
  RequireImage(image, "pooled image");
  const std::size_t h = image.shape()[0], w = image.shape()[1];
  const std::size_t ph = (h + 1) / 2, pw = (w + 1) / 2;
  std::vector<double> out(ph * pw);
  for (std::size_t y = 0; y < ph; ++y) {
    for (std::size_t x = 0; x < pw; ++x) {
      double acc = 0.0;
      int n = 0;
      for (std::size_t yy = 2 * y; yy < std::min(h, 2 * y + 2); ++yy) {
        for (std::size_t xx = 2 * x; xx < std::min(w, 2 * x + 2); ++xx) {
          acc += image[yy * w + xx];
          ++n;
        }
      }
      out[y * pw + x] = acc / n;
    }
  }
  return Tensor(Shape{ph, pw}, std::move(out));
}

Tensor UpsampleDisparity(const Tensor& map, double from_scale, double to_scale,
                         std::size_t out_height, std::size_t out_width) {
  RequireImage(map, "disparity map");
  if (!(from_scale > 0.0) || !(to_scale >= from_scale)) {
    throw std::invalid_argument("upsampling needs 0 < from_scale <= to_scale");
  }
  const double ratio = to_scale / from_scale;
  const double rounded = std::round(ratio);
  const auto ir = static_cast<std::size_t>(rounded);
  if (std::abs(ratio - rounded) > 1e-9 || (ir & (ir - 1)) != 0) {
    throw std::invalid_argument("upsampling ratio " + std::to_string(ratio) +
                                " is not a power-of-two integer");
  }
  const std::size_t h = map.shape()[0], w = map.shape()[1];
  if (out_height == 0) out_height = h * ir;
  if (out_width == 0) out_width = w * ir;
  if (ir == 1 && out_height == h && out_width == w) return map.detach();

  auto source = [&](std::size_t i, std::size_t n) {
    const double s = (static_cast<double>(i) + 0.5) / rounded - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(n - 1));
  };
  std::vector<double> out(out_height * out_width);
  for (std::size_t y = 0; y < out_height; ++y) {
    const double sy = source(y, h);
    const auto y0 = static_cast<std::size_t>(std::floor(sy));
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_width; ++x) {
      const double sx = source(x, w);
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - static_cast<double>(x0);
      const double top = (1.0 - fx) * map[y0 * w + x0] + fx * map[y0 * w + x1];
      const double bottom = (1.0 - fx) * map[y1 * w + x0] + fx * map[y1 * w + x1];
      out[y * out_width + x] = rounded * ((1.0 - fy) * top + fy * bottom);
    }
  }
  return Tensor(Shape{out_height, out_width}, std::move(out));
}

std::vector<Tensor> DisparityPyramid::full_maps() const {
  std::vector<Tensor> maps;
  for (const PyramidLevel& level : levels) maps.push_back(level.full);
  return maps;
}

DisparityPyramid MatchPyramid(const Tensor& left, const Tensor& right,
                              const MatcherOptions& options) {
  RequireImage(left, "left image");
  if (left.shape() != right.shape()) throw std::invalid_argument("stereo images differ in shape");
  const std::size_t h = left.shape()[0], w = left.shape()[1];
  if (h < 8 || w < 8) throw std::invalid_argument("matcher needs images of at least 8x8");

  std::vector<Tensor> lefts{left.detach()}, rights{right.detach()};
  for (std::size_t l = 1; l < kPyramidLevels; ++l) {
    lefts.push_back(AveragePool2(lefts.back()));
    rights.push_back(AveragePool2(rights.back()));
  }

  DisparityPyramid pyramid;
  for (std::size_t l = kPyramidLevels; l-- > 0;) {
    const double scale = 1.0 / static_cast<double>(std::size_t{1} << l);
    const std::size_t level_width = lefts[l].shape()[1];
    const auto scaled = static_cast<std::size_t>(
        std::ceil(static_cast<double>(options.max_disparity) * scale));
    const std::size_t level_dmax = std::min(scaled, level_width - 1);
    const CostVolume volume = BuildCostVolume(lefts[l], rights[l], level_dmax, options.window);
    PyramidLevel level;
    level.scale = scale;
    level.native = SoftArgmax(volume, options.temperature);
    level.full = UpsampleDisparity(level.native, scale, 1.0, h, w);
    pyramid.levels.push_back(std::move(level));
  }
  return pyramid;
}

}  // namespace sedkit
