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

// Run configuration parsed from flat "key = value" text. Blank lines and
// lines starting with '#' are ignored; unknown keys are errors.

#ifndef SEDKIT_CONFIG_H_
#define SEDKIT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sedkit/loss.h"
#include "sedkit/metrics.h"
#include "sedkit/stereo_toy.h"

namespace sedkit {

enum class DataSource { kLaplace, kStereo };

struct RunConfig {
  // Data.
  DataSource source = DataSource::kLaplace;
  std::size_t width = 64;
  std::size_t height = 64;
  std::uint64_t seed = 1;
  double d_max = 32.0;
  double noise_scale_min = 0.5;  // Laplace scale field range (px)
  double noise_scale_max = 4.0;
  double noise_scale_cell = 16.0;
  MatcherOptions matcher;

  // Loss.
  LossConfig loss;
  InlierPolicy inliers;

  // Head and optimizer.
  std::vector<std::size_t> head_hidden = {8, 10};
  bool allow_nonstandard_head = false;
  double learning_rate = 0.01;
  std::size_t epochs = 1000;  // full-batch optimization steps

  // Evaluation.
  std::size_t roc_steps = 20;
  D1Mode d1_mode = D1Mode::kPaperOr;

  std::vector<std::size_t> HeadLayerSizes() const;
  void Validate() const;
};

RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);

// Canonical key = value listing of every setting.
std::string FormatRunConfig(const RunConfig& cfg);

}  // namespace sedkit

#endif  // SEDKIT_CONFIG_H_
