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

#include <cmath>
#include <stdexcept>
#include <string>

#include "sedkit/rng.h"

namespace sedkit {

std::vector<std::pair<std::size_t, std::size_t>> PdvPairs(std::size_t levels) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < levels; ++a) {
    for (std::size_t b = a + 1; b < levels; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

Pdv ComputePdv(std::span<const Tensor> full_maps) {
  if (full_maps.size() < 2) throw std::invalid_argument("PDV needs at least 2 disparity maps");
  const Shape& shape = full_maps.front().shape();
  for (const Tensor& m : full_maps) {
    if (m.shape() != shape) throw std::invalid_argument("PDV maps must share one shape");
  }
  const auto pairs = PdvPairs(full_maps.size());
  const std::size_t pixels = ShapeSize(shape);
  const std::size_t channels = pairs.size();
  std::vector<double> features(pixels * channels);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      features[p * channels + c] = full_maps[pairs[c].first][p] - full_maps[pairs[c].second][p];
    }
  }
  return Pdv{shape, Tensor(Shape{pixels, channels}, std::move(features))};
}

UncertaintyHead::UncertaintyHead(std::vector<std::size_t> layer_sizes)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("head needs at least two layer sizes");
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("head layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back(DenseLayer{Tensor::Zeros({sizes_[l], sizes_[l + 1]}),
                                 Tensor::Zeros({sizes_[l + 1]})});
  }
}

UncertaintyHead UncertaintyHead::Init(std::uint64_t seed, std::vector<std::size_t> layer_sizes) {
  UncertaintyHead head(std::move(layer_sizes));
  for (std::size_t l = 0; l < head.layers_.size(); ++l) {
    DenseLayer& layer = head.layers_[l];
    const std::size_t fan_in = head.sizes_[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(layer.weight.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = bound * (2.0 * CounterUniform(seed, 0x4845414400ULL + l, i) - 1.0);
    }
    layer.weight = Tensor(layer.weight.shape(), std::move(w));
  }
  return head;
}

std::size_t UncertaintyHead::param_count() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<double> UncertaintyHead::Flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const DenseLayer& layer : layers_) {
    out.insert(out.end(), layer.weight.values().begin(), layer.weight.values().end());
    out.insert(out.end(), layer.bias.values().begin(), layer.bias.values().end());
  }
  return out;
}

void UncertaintyHead::Assign(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw std::invalid_argument("head expects " + std::to_string(param_count()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::size_t offset = 0;
  auto take = [&](const Tensor& like) {
    std::vector<double> v(params.begin() + static_cast<std::ptrdiff_t>(offset),
                          params.begin() + static_cast<std::ptrdiff_t>(offset + like.size()));
    offset += like.size();
    return Tensor(like.shape(), std::move(v));
  };
  for (DenseLayer& layer : layers_) {
    layer.weight = take(layer.weight);
    layer.bias = take(layer.bias);
  }
}

std::vector<Tensor> UncertaintyHead::Parameters() const {
  std::vector<Tensor> params;
  for (const DenseLayer& layer : layers_) {
    params.push_back(layer.weight);
    params.push_back(layer.bias);
  }
  return params;
}

UncertaintyHead UncertaintyHead::FromParameters(std::vector<std::size_t> layer_sizes,
                                                std::span<const Tensor> params) {
  UncertaintyHead head(std::move(layer_sizes));
  if (params.size() != 2 * head.layers_.size()) {
    throw std::invalid_argument("wrong number of head parameter tensors");
  }
  for (std::size_t l = 0; l < head.layers_.size(); ++l) {
    if (params[2 * l].shape() != head.layers_[l].weight.shape() ||
        params[2 * l + 1].shape() != head.layers_[l].bias.shape()) {
      throw std::invalid_argument("head parameter shape mismatch at layer " + std::to_string(l));
    }
    head.layers_[l] = DenseLayer{params[2 * l], params[2 * l + 1]};
  }
  return head;
}

std::vector<Tensor> HeadForward(std::span<const DenseLayer> layers, const Pdv& pdv) {
  if (layers.empty()) throw std::invalid_argument("head has no layers");
  if (pdv.features.rank() != 2 || pdv.channels() != layers.front().weight.shape()[0]) {
    throw std::invalid_argument("PDV has " + std::to_string(pdv.features.shape().back()) +
                                " channels but head expects " +
                                std::to_string(layers.front().weight.shape()[0]));
  }
  Tensor x = pdv.features;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    x = AddBias(MatMul(x, layers[l].weight), layers[l].bias);
    if (l + 1 < layers.size()) x = LeakyRelu(x, kLeakySlope);
  }
  std::vector<Tensor> maps;
  for (std::size_t k = 0; k < x.shape()[1]; ++k) maps.push_back(Reshape(Column(x, k), pdv.map_shape));
  return maps;
}

std::vector<Tensor> HeadForward(const UncertaintyHead& head, const Pdv& pdv) {
  return HeadForward(head.layers(), pdv);
}

}  // namespace sedkit
