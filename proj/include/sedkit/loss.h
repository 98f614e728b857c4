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

// Training objectives: Laplacian negative log-likelihood, soft-histogram KL
// divergence, and their inlier-filtered multi-resolution combination.

#ifndef SEDKIT_LOSS_H_
#define SEDKIT_LOSS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sedkit/hist.h"
#include "sedkit/tensor.h"

namespace sedkit {

enum class InlierKind { kNone, kFixed, kAdaptive };

InlierKind ParseInlierKind(const std::string& name);
std::string InlierKindName(InlierKind kind);

struct InlierPolicy {
  InlierKind kind = InlierKind::kAdaptive;
  double fixed_threshold = 5.0;  // px
  double adaptive_k = 3.0;       // multiples of b

  void Validate() const;
};

// Which histogram plays the reference role in the KL term.
enum class KlDirection { kErrorReference, kSigmaReference };

KlDirection ParseKlDirection(const std::string& name);
std::string KlDirectionName(KlDirection direction);

// Pixels over which bin statistics are computed.
enum class StatsScope { kInliers, kValid };

StatsScope ParseStatsScope(const std::string& name);
std::string StatsScopeName(StatsScope scope);

struct LossConfig {
  std::vector<double> coefficients = {0.5, 0.5, 0.7, 1.0};  // coarse -> fine
  std::size_t bin_count = 11;
  BinScale scale = BinScale::kLinear;
  double alpha_max = 10.0;
  double lambda1 = 10.0;
  double lambda2 = 0.0;  // <= 0 selects DefaultLambda2
  KlDirection kl_direction = KlDirection::kErrorReference;
  StatsScope stats_scope = StatsScope::kInliers;
  bool use_kl = true;  // false trains with L_log alone

  void Validate() const;
  double Lambda2For(const BinSpec& spec) const;
};

// (1/n) sum |d_hat - d| / exp(s) + (1/n) sum s over masked pixels.
Tensor LaplacianNll(const Tensor& d_hat, const Tensor& d, const Tensor& s, const Tensor& mask);

struct InlierResult {
  Tensor mask;
  double pct = 0.0;  // kept / valid
  double threshold = 0.0;
};

// Threshold comparison on detached values. Fixed: |e| < threshold; adaptive:
// |e| < mu + k * b with stats over `valid`; none: mask = valid.
InlierResult InlierMask(const Tensor& abs_errors, const Tensor& valid, const InlierPolicy& policy);

// sum_j ref(j) * ln(ref(j) / other(j)), summed as non-negative per-bin terms so
// the result is never below 0 in floating point.
Tensor KlLoss(const Histogram& ref, const Histogram& other);

// Ordered by kl_direction: (H_eps, H_sigma) or (H_sigma, H_eps).
Tensor DirectedKl(const Histogram& h_eps, const Histogram& h_sigma, KlDirection direction);

struct LevelDiagnostics {
  std::size_t level = 0;
  double l_log = 0.0;
  double l_div = 0.0;
  double pct = 0.0;
  double mu = 0.0;
  double b = 0.0;
};

// Per-level quantities derived from detached values: the inlier mask and the
// bin layout. Freezing them lets a loss be re-evaluated at perturbed inputs
// with the same stop-gradient constants, which is what the analytic gradient
// describes.
struct LevelPlan {
  std::size_t level = 0;
  double coefficient = 0.0;
  Tensor mask;
  double pct = 0.0;
  BinSpec spec;
  double lambda2 = 0.0;
};

std::vector<LevelPlan> PlanSednetLoss(std::span<const Tensor> d_hat, const Tensor& d_gt,
                                      const Tensor& valid, const LossConfig& cfg,
                                      const InlierPolicy& policy);

struct LossResult {
  Tensor total;
  std::vector<LevelDiagnostics> levels;
};

// sum_k c_k (L_log,k + L_div,k) with the given frozen plan. Levels with c_k = 0
// are skipped.
LossResult EvaluateSednetLoss(std::span<const LevelPlan> plan, std::span<const Tensor> d_hat,
                              std::span<const Tensor> s, const Tensor& d_gt,
                              const LossConfig& cfg);

// Plan + evaluate. `d_hat` holds K full-resolution maps, `s` the matching K
// log-noise maps, both ordered coarse -> fine.
LossResult SednetLoss(std::span<const Tensor> d_hat, std::span<const Tensor> s,
                      const Tensor& d_gt, const Tensor& valid, const LossConfig& cfg,
                      const InlierPolicy& policy);

}  // namespace sedkit

#endif  // SEDKIT_LOSS_H_
