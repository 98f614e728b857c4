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

// Toy training experiment: the disparity predictor is frozen (noisy copies of
// ground truth, or the stereo matcher), and only the uncertainty head is
// optimized with Adam on the full batch.

#ifndef SEDKIT_EXPERIMENT_H_
#define SEDKIT_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sedkit/config.h"
#include "sedkit/head.h"
#include "sedkit/io.h"
#include "sedkit/metrics.h"
#include "sedkit/tensor.h"

namespace sedkit {

struct ExperimentData {
  Tensor d_gt;
  Tensor valid;
  std::vector<Tensor> d_hat;  // full resolution, coarse -> fine
  Pdv pdv;
};

// K copies d_gt + Laplace(0, b(x, y)) with a smooth scale field b.
ExperimentData MakeLaplaceData(const RunConfig& cfg, std::uint64_t seed);
// GenScene + MatchPyramid.
ExperimentData MakeStereoData(const RunConfig& cfg, std::uint64_t seed);
ExperimentData MakeData(const RunConfig& cfg, std::uint64_t seed);

class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void Step(std::vector<double>& params, const std::vector<double>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

struct TrainResult {
  UncertaintyHead head;
  CsvWriter diagnostics = DiagnosticsCsv();
  std::vector<double> losses;
};

TrainResult TrainHead(const RunConfig& cfg, const ExperimentData& data, UncertaintyHead head);

// Log-noise maps for every level.
std::vector<Tensor> PredictLogNoise(const UncertaintyHead& head, const ExperimentData& data);

struct HeadQuality {
  double soft_kl = 0.0;  // kl_loss(H_eps, H_sigma), finest level, loss config bins
  double hard_kl = 0.0;  // same orientation on hard histograms (1 pseudo-count per bin)
  EvalReport report;     // finest level
  double auc_gap() const { return report.auc_estimated - report.auc_optimal; }
};

// Measured on the finest level over valid pixels.
HeadQuality MeasureHead(const RunConfig& cfg, const UncertaintyHead& head,
                        const ExperimentData& data);

// Files written by `sedkit train`.
struct TrainArtifacts {
  std::string head_bin;
  std::string diagnostics_csv;
  std::string report_csv;
  std::string roc_csv;
  std::string summary_csv;
};

TrainArtifacts RunTrainExperiment(const RunConfig& cfg);

}  // namespace sedkit

#endif  // SEDKIT_EXPERIMENT_H_
