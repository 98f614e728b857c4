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

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "sedkit/parallel.h"
#include "sedkit/rng.h"

namespace sedkit {

namespace {

// Stream ids keep independent draws apart.
constexpr std::uint64_t kTextureStream = 0x100;
constexpr std::uint64_t kFieldStream = 0x200;
constexpr std::uint64_t kLayoutStream = 0x300;
constexpr std::uint64_t kDensityStream = 0x400;
constexpr std::uint64_t kErrorStream = 0x500;

double Smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

std::uint64_t LatticeIndex(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint64_t>(iy & 0xffffffff);
}

// Value noise in [0, 1] on a lattice with the given cell size.
double ValueNoise(std::uint64_t seed, std::uint64_t stream, double x, double y, double cell) {
  const double gx = x / cell, gy = y / cell;
  const double fx0 = std::floor(gx), fy0 = std::floor(gy);
  const auto ix = static_cast<std::int64_t>(fx0), iy = static_cast<std::int64_t>(fy0);
  const double tx = Smoothstep(gx - fx0), ty = Smoothstep(gy - fy0);
  auto at = [&](std::int64_t dx, std::int64_t dy) {
    return CounterUniform(seed, stream, LatticeIndex(ix + dx, iy + dy));
  };
  const double top = (1.0 - tx) * at(0, 0) + tx * at(1, 0);
  const double bottom = (1.0 - tx) * at(0, 1) + tx * at(1, 1);
  return (1.0 - ty) * top + ty * bottom;
}

double LayoutUniform(std::uint64_t seed, std::uint64_t i) {
  return CounterUniform(seed, kLayoutStream, i);
}

void RequireSize(std::size_t width, std::size_t height) {
  if (width < 32 || height < 32) throw std::invalid_argument("scenes need width, height >= 32");
}

}  // namespace

double TextureAt(std::uint64_t seed, double x, double y) {
  constexpr std::array<double, 4> kCells = {8.0, 4.0, 2.0, 1.0};
  constexpr std::array<double, 4> kAmplitudes = {0.3, 0.25, 0.25, 0.2};
  double v = 0.0;
  for (std::size_t o = 0; o < kCells.size(); ++o) {
    v += kAmplitudes[o] * ValueNoise(seed, kTextureStream + o, x, y, kCells[o]);
  }
  return v;
}

Tensor GenTexture(std::uint64_t seed, std::size_t height, std::size_t width) {
  std::vector<double> px(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      px[y * width + x] = TextureAt(seed, static_cast<double>(x), static_cast<double>(y));
    }
  }
  return Tensor(Shape{height, width}, std::move(px));
}

Tensor SmoothField(std::uint64_t seed, std::size_t height, std::size_t width, double lo,
                   double hi, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("field cell size must be positive");
  std::vector<double> v(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double n = ValueNoise(seed, kFieldStream, static_cast<double>(x),
                                  static_cast<double>(y), cell);
      v[y * width + x] = lo + (hi - lo) * n;
    }
  }
  return Tensor(Shape{height, width}, std::move(v));
}

Tensor WarpRightToLeft(const Tensor& right, const Tensor& disparity, const Tensor& fallback,
                       Tensor* valid) {
  if (right.rank() != 2 || right.shape() != disparity.shape() ||
      right.shape() != fallback.shape()) {
    throw std::invalid_argument("warp inputs must share one [height, width] shape");
  }
  const std::size_t h = right.shape()[0], w = right.shape()[1];
  std::vector<double> left(h * w), ok(h * w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      const double sx = static_cast<double>(x) - disparity[i];
      if (sx < 0.0 || sx > static_cast<double>(w - 1)) {
        left[i] = fallback[i];
        continue;
      }
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double t = sx - static_cast<double>(x0);
      left[i] = t == 0.0 ? right[y * w + x0]
                         : (1.0 - t) * right[y * w + x0] + t * right[y * w + x1];
      ok[i] = 1.0;
    }
  }
  if (valid != nullptr) *valid = Tensor(Shape{h, w}, std::move(ok));
  return Tensor(Shape{h, w}, std::move(left));
}

namespace {

SyntheticScene AssembleScene(std::uint64_t seed, std::size_t width, std::size_t height,
                             const Tensor& disparity, double gt_density) {
  if (!(gt_density > 0.0 && gt_density <= 1.0)) {
    throw std::invalid_argument("ground-truth density must be in (0, 1]");
  }
  SyntheticScene scene;
  scene.seed = seed;
  scene.disparity = disparity;
  scene.right = GenTexture(seed, height, width);
  std::vector<double> fallback(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = y * width + x;
      fallback[i] = TextureAt(seed, static_cast<double>(x) - disparity[i], static_cast<double>(y));
    }
  }
  Tensor valid;
  scene.left = WarpRightToLeft(scene.right, disparity, Tensor(Shape{height, width}, fallback),
                               &valid);
  if (gt_density < 1.0) {
    std::vector<double> v(valid.values());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (CounterUniform(seed, kDensityStream, i) >= gt_density) v[i] = 0.0;
    }
    valid = Tensor(valid.shape(), std::move(v));
  }
  scene.valid = valid;
  return scene;
}

}  // namespace

SyntheticScene GenScene(std::uint64_t seed, std::size_t width, std::size_t height, double d_max,
                        double gt_density) {
  RequireSize(width, height);
  if (!(d_max >= 0.0)) throw std::invalid_argument("d_max must be non-negative");
  const double w = static_cast<double>(width), h = static_cast<double>(height);

  // Background: a sloped plane in [0.1, 0.5] * d_max.
  const double base = (0.1 + 0.2 * LayoutUniform(seed, 0)) * d_max;
  const double slope_x = 0.2 * LayoutUniform(seed, 1) * d_max / w;
  const double slope_y = 0.1 * (LayoutUniform(seed, 2) - 0.5) * d_max / h;

  struct Patch {
    double x0, y0, x1, y1, level, slope;
  };
  const std::size_t patches = 1 + static_cast<std::size_t>(3.0 * LayoutUniform(seed, 3)) % 3;
  std::vector<Patch> layout;
  for (std::size_t p = 0; p < patches; ++p) {
    const std::uint64_t k = 10 + 8 * p;
    const double pw = (0.2 + 0.3 * LayoutUniform(seed, k)) * w;
    const double ph = (0.2 + 0.3 * LayoutUniform(seed, k + 1)) * h;
    const double px = LayoutUniform(seed, k + 2) * (w - pw);
    const double py = LayoutUniform(seed, k + 3) * (h - ph);
    const double level = (0.55 + 0.35 * LayoutUniform(seed, k + 4)) * d_max;
    // Every other patch is sloped; the rest are fronto-parallel.
    const double slope = (p % 2 == 1) ? 0.05 * LayoutUniform(seed, k + 5) * d_max / pw : 0.0;
    layout.push_back({px, py, px + pw, py + ph, level, slope});
  }

  std::vector<double> d(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x), fy = static_cast<double>(y);
      double v = base + slope_x * fx + slope_y * (fy - h / 2.0);
      for (const Patch& p : layout) {
        if (fx >= p.x0 && fx < p.x1 && fy >= p.y0 && fy < p.y1) v = p.level + p.slope * (fx - p.x0);
      }
      d[y * width + x] = std::clamp(v, 0.0, d_max);
    }
  }
  return AssembleScene(seed, width, height, Tensor(Shape{height, width}, std::move(d)),
                       gt_density);
}

SyntheticScene GenShiftScene(std::uint64_t seed, std::size_t width, std::size_t height,
                             double shift) {
  if (width < 8 || height < 8) throw std::invalid_argument("shift scenes need at least 8x8");
  if (!(shift >= 0.0)) throw std::invalid_argument("shift must be non-negative");
  return AssembleScene(seed, width, height, Tensor::Full(Shape{height, width}, shift), 1.0);
}

double LaplaceFromUniform(double u, double scale) {
  const double c = u - 0.5;
  if (c == 0.0) return 0.0;
  const double sign = c > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log(1.0 - 2.0 * std::abs(c));
}

ErrorSample GenLaplaceErrors(std::uint64_t seed, const Shape& shape, const Tensor& scale_field) {
  const std::size_t n = ShapeSize(shape);
  if (scale_field.size() != n) throw std::invalid_argument("scale field does not match shape");
  for (double b : scale_field.values()) {
    if (!(b > 0.0)) throw std::invalid_argument("Laplace scale must be positive");
  }
  std::vector<double> e(n);
  ParallelFor(n, [&](std::size_t i) {
    e[i] = LaplaceFromUniform(CounterUniform(seed, kErrorStream, i), scale_field[i]);
  });
  return ErrorSample{Tensor(shape, std::move(e)), Tensor(shape, scale_field.values())};
}

}  // namespace sedkit
