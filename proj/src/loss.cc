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

#include "sedkit/loss.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sedkit {

InlierKind ParseInlierKind(const std::string& name) {
  if (name == "none") return InlierKind::kNone;
  if (name == "fixed") return InlierKind::kFixed;
  if (name == "adaptive") return InlierKind::kAdaptive;
  throw std::invalid_argument("unknown inlier policy '" + name + "'");
}

std::string InlierKindName(InlierKind kind) {
  switch (kind) {
    case InlierKind::kNone: return "none";
    case InlierKind::kFixed: return "fixed";
    case InlierKind::kAdaptive: return "adaptive";
  }
  return "?";
}

KlDirection ParseKlDirection(const std::string& name) {
  if (name == "eps_ref") return KlDirection::kErrorReference;
  if (name == "sigma_ref") return KlDirection::kSigmaReference;
  throw std::invalid_argument("unknown kl direction '" + name + "'");
}

std::string KlDirectionName(KlDirection direction) {
  return direction == KlDirection::kErrorReference ? "eps_ref" : "sigma_ref";
}

StatsScope ParseStatsScope(const std::string& name) {
  if (name == "inliers") return StatsScope::kInliers;
  if (name == "valid") return StatsScope::kValid;
  throw std::invalid_argument("unknown stats scope '" + name + "'");
}

std::string StatsScopeName(StatsScope scope) {
  return scope == StatsScope::kInliers ? "inliers" : "valid";
}

void InlierPolicy::Validate() const {
  if (!(fixed_threshold > 0.0)) throw std::invalid_argument("inlier threshold must be positive");
  if (!(adaptive_k > 0.0)) throw std::invalid_argument("adaptive inlier k must be positive");
}

void LossConfig::Validate() const {
  if (coefficients.empty()) throw std::invalid_argument("loss needs at least one coefficient");
  bool positive = false;
  for (double c : coefficients) {
    if (!(c >= 0.0)) throw std::invalid_argument("loss coefficients must be non-negative");
    positive = positive || c > 0.0;
  }
  if (!positive) throw std::invalid_argument("at least one loss coefficient must be positive");
  if (bin_count < 2) throw std::invalid_argument("bin count must be at least 2");
  if (!(alpha_max > 0.0)) throw std::invalid_argument("alpha_max must be positive");
  if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be positive");
}

double LossConfig::Lambda2For(const BinSpec& spec) const {
  return lambda2 > 0.0 ? lambda2 : DefaultLambda2(spec);
}

Tensor LaplacianNll(const Tensor& d_hat, const Tensor& d, const Tensor& s, const Tensor& mask) {
  if (d_hat.shape() != d.shape() || d.shape() != s.shape() || s.shape() != mask.shape()) {
    throw std::invalid_argument("laplacian nll: input shapes differ");
  }
  const std::vector<std::size_t> idx = MaskIndices(mask);
  if (idx.empty()) throw std::invalid_argument("laplacian nll over an empty mask");
  const Tensor residual = Abs(Gather(d_hat, idx) - Gather(d, idx));
  const Tensor log_noise = Gather(s, idx);
  return Mean(residual / Exp(log_noise)) + Mean(log_noise);
}

InlierResult InlierMask(const Tensor& abs_errors, const Tensor& valid,
                        const InlierPolicy& policy) {
  policy.Validate();
  if (abs_errors.size() != valid.size()) {
    throw std::invalid_argument("inlier mask: errors and valid mask differ in size");
  }
  const std::vector<std::size_t> idx = MaskIndices(valid);
  if (idx.empty()) throw std::invalid_argument("inlier mask: no valid pixels");

  InlierResult r;
  switch (policy.kind) {
    case InlierKind::kNone:
      r.mask = valid.detach();
      r.pct = 1.0;
      r.threshold = std::numeric_limits<double>::infinity();
      return r;
    case InlierKind::kFixed:
      r.threshold = policy.fixed_threshold;
      break;
    case InlierKind::kAdaptive: {
      const BatchStats stats = ComputeBatchStats(abs_errors, valid);
      r.threshold = stats.mu + policy.adaptive_k * stats.b;
      break;
    }
  }
  std::vector<double> keep(valid.size(), 0.0);
  std::size_t kept = 0;
  for (std::size_t i : idx) {
    if (abs_errors[i] < r.threshold) {
      keep[i] = 1.0;
      ++kept;
    }
  }
  r.mask = Tensor(valid.shape(), std::move(keep));
  r.pct = static_cast<double>(kept) / static_cast<double>(idx.size());
  return r;
}

Tensor KlLoss(const Histogram& ref, const Histogram& other) {
  if (!(ref.spec == other.spec)) throw std::invalid_argument("kl loss: bin specs differ");
  if (ref.mass.shape() != other.mass.shape()) {
    throw std::invalid_argument("kl loss: histogram sizes differ");
  }
  for (std::size_t j = 0; j < ref.mass.size(); ++j) {
    if (!(ref.mass[j] > 0.0) || !(other.mass[j] > 0.0)) {
      throw std::domain_error("kl loss: histogram has a zero-mass bin");
    }
  }
  // Per bin ref ln(ref/other) - ref + other >= 0; the extra terms cancel for
  // normalized histograms, and clamping rounding residue keeps the sum >= 0.
  const Tensor terms = ref.mass * (Log(ref.mass) - Log(other.mass)) - ref.mass + other.mass;
  return Sum(LeakyRelu(terms, 0.0));
}

Tensor DirectedKl(const Histogram& h_eps, const Histogram& h_sigma, KlDirection direction) {
  return direction == KlDirection::kErrorReference ? KlLoss(h_eps, h_sigma)
                                                   : KlLoss(h_sigma, h_eps);
}

namespace {

Tensor AbsErrors(const Tensor& d_hat, const Tensor& d_gt) {
  if (d_hat.shape() != d_gt.shape()) {
    throw std::invalid_argument("disparity map shape " + ShapeToString(d_hat.shape()) +
                                " does not match ground truth " + ShapeToString(d_gt.shape()));
  }
  return Abs(d_hat - d_gt);
}

}  // namespace

std::vector<LevelPlan> PlanSednetLoss(std::span<const Tensor> d_hat, const Tensor& d_gt,
                                      const Tensor& valid, const LossConfig& cfg,
                                      const InlierPolicy& policy) {
  cfg.Validate();
  if (d_hat.size() != cfg.coefficients.size()) {
    throw std::invalid_argument("loss has " + std::to_string(cfg.coefficients.size()) +
                                " coefficients but " + std::to_string(d_hat.size()) + " levels");
  }
  std::vector<LevelPlan> plan;
  for (std::size_t k = 0; k < d_hat.size(); ++k) {
    if (cfg.coefficients[k] == 0.0) continue;
    const Tensor eps = AbsErrors(d_hat[k].detach(), d_gt.detach());
    InlierResult inliers = InlierMask(eps, valid, policy);
    const Tensor& stats_mask = cfg.stats_scope == StatsScope::kInliers ? inliers.mask : valid;
    const BatchStats stats = ComputeBatchStats(eps, stats_mask);
    LevelPlan level;
    level.level = k;
    level.coefficient = cfg.coefficients[k];
    level.mask = inliers.mask;
    level.pct = inliers.pct;
    level.spec = MakeCenters(stats.mu, stats.b, cfg.bin_count, cfg.scale, cfg.alpha_max);
    level.lambda2 = cfg.Lambda2For(level.spec);
    plan.push_back(std::move(level));
  }
  return plan;
}

LossResult EvaluateSednetLoss(std::span<const LevelPlan> plan, std::span<const Tensor> d_hat,
                              std::span<const Tensor> s, const Tensor& d_gt,
                              const LossConfig& cfg) {
  if (d_hat.size() != s.size()) {
    throw std::invalid_argument("loss needs one log-noise map per disparity map");
  }
  LossResult result;
  bool first = true;
  for (const LevelPlan& level : plan) {
    if (level.level >= d_hat.size()) throw std::invalid_argument("loss plan level out of range");
    const Tensor& prediction = d_hat[level.level];
    const Tensor& log_noise = s[level.level];
    const Tensor l_log = LaplacianNll(prediction, d_gt, log_noise, level.mask);
    Tensor term = l_log;
    double l_div_value = 0.0;
    if (cfg.use_kl) {
      const Tensor eps = AbsErrors(prediction, d_gt);
      const Histogram h_eps = SoftHistogram(eps, level.mask, level.spec, cfg.lambda1, level.lambda2);
      const Histogram h_sigma =
          SoftHistogram(Exp(log_noise), level.mask, level.spec, cfg.lambda1, level.lambda2);
      const Tensor l_div = DirectedKl(h_eps, h_sigma, cfg.kl_direction);
      l_div_value = l_div.item();
      term = l_log + l_div;
    }
    const Tensor weighted = level.coefficient == 1.0 ? term : Scale(term, level.coefficient);
    result.total = first ? weighted : result.total + weighted;
    first = false;
    result.levels.push_back(LevelDiagnostics{level.level, l_log.item(), l_div_value, level.pct,
                                             level.spec.mu, level.spec.b});
  }
  if (first) throw std::invalid_argument("loss plan selects no levels");
  return result;
}

LossResult SednetLoss(std::span<const Tensor> d_hat, std::span<const Tensor> s,
                      const Tensor& d_gt, const Tensor& valid, const LossConfig& cfg,
                      const InlierPolicy& policy) {
  const std::vector<LevelPlan> plan = PlanSednetLoss(d_hat, d_gt, valid, cfg, policy);
  return EvaluateSednetLoss(plan, d_hat, s, d_gt, cfg);
}

}  // namespace sedkit
