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

// Finite-difference verification of every differentiable objective.

#ifndef SEDKIT_GRADCHECK_SUITE_H_
#define SEDKIT_GRADCHECK_SUITE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sedkit {

struct GradCheckOutcome {
  std::string name;
  std::size_t instances = 0;
  double worst_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return worst_rel_error < tolerance; }
};

struct GradCheckOptions {
  std::uint64_t seed = 7;
  std::size_t instances = 20;
  double step = 1e-5;
  double tolerance = 1e-4;
};

// Cases: laplacian_nll (4x4), soft_histogram->kl_loss (16 samples),
// sednet_loss (four 8x8 levels), head_forward (190 parameters, 4x4 PDV) and
// soft_argmax (3x3x9 costs). Loss statistics (masks, bin layouts) are frozen at
// the unperturbed point, matching their stop-gradient treatment.
std::vector<GradCheckOutcome> RunGradCheckSuite(const GradCheckOptions& options = {});

}  // namespace sedkit

#endif  // SEDKIT_GRADCHECK_SUITE_H_
