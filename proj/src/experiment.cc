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

#include "sedkit/experiment.h"

#include <cmath>
#include <stdexcept>

#include "sedkit/loss.h"
#include "sedkit/rng.h"
#include "sedkit/stereo_toy.h"
#include "sedkit/synth.h"

namespace sedkit {

namespace {

constexpr std::uint64_t kHeldOutSalt = 0x68656c646f7574ULL;

}  // namespace

ExperimentData MakeLaplaceData(const RunConfig& cfg, std::uint64_t seed) {
  const SyntheticScene scene = GenScene(seed, cfg.width, cfg.height, cfg.d_max);
  const Shape shape{cfg.height, cfg.width};
  const Tensor scale = SmoothField(seed, cfg.height, cfg.width, cfg.noise_scale_min,
                                   cfg.noise_scale_max, cfg.noise_scale_cell);
  ExperimentData data;
  data.d_gt = scene.disparity;
  data.valid = Tensor::Full(shape, 1.0);
  for (std::size_t k = 0; k < cfg.loss.coefficients.size(); ++k) {
    const ErrorSample noise = GenLaplaceErrors(CounterHash(seed, 0x6c61706cULL, k), shape, scale);
    data.d_hat.push_back(data.d_gt + noise.errors);
  }
  data.pdv = ComputePdv(data.d_hat);
  return data;
}

ExperimentData MakeStereoData(const RunConfig& cfg, std::uint64_t seed) {
  const SyntheticScene scene = GenScene(seed, cfg.width, cfg.height, cfg.d_max);
  MatcherOptions options = cfg.matcher;
  options.max_disparity = static_cast<std::size_t>(std::ceil(cfg.d_max));
  const DisparityPyramid pyramid = MatchPyramid(scene.left, scene.right, options);
  ExperimentData data;
  data.d_gt = scene.disparity;
  data.valid = scene.valid;
  data.d_hat = pyramid.full_maps();
  data.pdv = ComputePdv(data.d_hat);
  return data;
}

ExperimentData MakeData(const RunConfig& cfg, std::uint64_t seed) {
  return cfg.source == DataSource::kLaplace ? MakeLaplaceData(cfg, seed)
                                            : MakeStereoData(cfg, seed);
}

Adam::Adam(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::Step(std::vector<double>& params, const std::vector<double>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: gradient size mismatch");
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

TrainResult TrainHead(const RunConfig& cfg, const ExperimentData& data, UncertaintyHead head) {
  const std::vector<LevelPlan> plan =
      PlanSednetLoss(data.d_hat, data.d_gt, data.valid, cfg.loss, cfg.inliers);
  TrainResult result;
  result.head = head;
  Adam adam(cfg.learning_rate);
  std::vector<double> params = head.Flatten();
  for (std::size_t step = 0; step < cfg.epochs; ++step) {
    Tape tape;
    std::vector<Tensor> leaves;
    for (const Tensor& p : head.Parameters()) leaves.push_back(tape.variable(p));
    const UncertaintyHead live = UncertaintyHead::FromParameters(head.layer_sizes(), leaves);
    const std::vector<Tensor> s = HeadForward(live, data.pdv);
    const LossResult loss = EvaluateSednetLoss(plan, data.d_hat, s, data.d_gt, cfg.loss);
    tape.backward(loss.total);
    std::vector<double> grads;
    grads.reserve(params.size());
    for (const Tensor& leaf : leaves) {
      const Tensor g = tape.grad(leaf);
      grads.insert(grads.end(), g.values().begin(), g.values().end());
    }
    result.losses.push_back(loss.total.item());
    AddDiagnostics(result.diagnostics, step, loss.levels);
    adam.Step(params, grads);
    head.Assign(params);
  }
  result.head = head;
  return result;
}

std::vector<Tensor> PredictLogNoise(const UncertaintyHead& head, const ExperimentData& data) {
  return HeadForward(head, data.pdv);
}

HeadQuality MeasureHead(const RunConfig& cfg, const UncertaintyHead& head,
                        const ExperimentData& data) {
  const std::vector<Tensor> s = PredictLogNoise(head, data);
  const Tensor& d_hat = data.d_hat.back();
  const Tensor sigma = Exp(s.back());
  const Tensor eps = Abs(d_hat - data.d_gt);

  const BatchStats stats = ComputeBatchStats(eps, data.valid);
  const BinSpec spec =
      MakeCenters(stats.mu, stats.b, cfg.loss.bin_count, cfg.loss.scale, cfg.loss.alpha_max);
  const double lambda2 = cfg.loss.Lambda2For(spec);

  HeadQuality q;
  const Histogram h_eps = SoftHistogram(eps, data.valid, spec, cfg.loss.lambda1, lambda2);
  const Histogram h_sigma = SoftHistogram(sigma, data.valid, spec, cfg.loss.lambda1, lambda2);
  q.soft_kl = DirectedKl(h_eps, h_sigma, cfg.loss.kl_direction).item();
  const std::vector<double> hard_eps = HardHistogram(eps, data.valid, spec);
  const std::vector<double> hard_sigma = HardHistogram(sigma, data.valid, spec);
  q.hard_kl = cfg.loss.kl_direction == KlDirection::kErrorReference
                  ? DiscreteKl(hard_eps, hard_sigma)
                  : DiscreteKl(hard_sigma, hard_eps);
  q.report = MakeEvalReport(d_hat, data.d_gt, sigma, data.valid,
                            EvalOptions{cfg.roc_steps, cfg.d1_mode});
  return q;
}

TrainArtifacts RunTrainExperiment(const RunConfig& cfg) {
  cfg.Validate();
  const ExperimentData train = MakeData(cfg, cfg.seed);
  const ExperimentData held_out = MakeData(cfg, CounterHash(cfg.seed, kHeldOutSalt, 0));
  const UncertaintyHead initial = UncertaintyHead::Init(cfg.seed, cfg.HeadLayerSizes());

  const HeadQuality train_before = MeasureHead(cfg, initial, train);
  const HeadQuality test_before = MeasureHead(cfg, initial, held_out);
  TrainResult trained = TrainHead(cfg, train, initial);
  const HeadQuality train_after = MeasureHead(cfg, trained.head, train);
  const HeadQuality test_after = MeasureHead(cfg, trained.head, held_out);

  CsvWriter summary({"metric", "initial", "final"});
  auto row = [&](const std::string& name, double a, double b) {
    summary.AddRow({name, FormatNumber(a), FormatNumber(b)});
  };
  row("train_soft_kl", train_before.soft_kl, train_after.soft_kl);
  row("train_hard_kl", train_before.hard_kl, train_after.hard_kl);
  row("heldout_soft_kl", test_before.soft_kl, test_after.soft_kl);
  row("heldout_hard_kl", test_before.hard_kl, test_after.hard_kl);
  row("heldout_auc_gap", test_before.auc_gap(), test_after.auc_gap());
  row("heldout_ape_avg", test_before.report.ape_avg, test_after.report.ape_avg);

  TrainArtifacts out;
  out.head_bin = EncodeHead(trained.head);
  out.diagnostics_csv = trained.diagnostics.text();
  out.report_csv = ReportCsv(test_after.report);
  out.roc_csv = RocCsv(test_after.report.roc_estimated);
  out.summary_csv = summary.text();
  return out;
}

}  // namespace sedkit
