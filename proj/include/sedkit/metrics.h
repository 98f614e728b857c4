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

// Disparity and uncertainty evaluation: EPE, D1, APE, density-EPE ROC curves
// and their areas.
//
// All means over pixels use correctly rounded summation, so a mean depends
// only on the multiset of values and never on visiting order. In particular
// the optimal AUC can never exceed the estimated AUC through rounding.

#ifndef SEDKIT_METRICS_H_
#define SEDKIT_METRICS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "sedkit/hist.h"
#include "sedkit/tensor.h"

namespace sedkit {

// Running sum of doubles, exact until Value() rounds it once (Shewchuk
// partials with round-half-even correction).
class ExactSum {
 public:
  void Add(double x);
  double Value() const;

 private:
  std::vector<double> partials_;
};

enum class D1Mode { kPaperOr, kKittiAnd };

D1Mode ParseD1Mode(const std::string& name);
std::string D1ModeName(D1Mode mode);

inline constexpr double kD1AbsThreshold = 3.0;
inline constexpr double kD1RelThreshold = 0.05;

// Mean |d_hat - d_gt| over valid pixels.
double Epe(const Tensor& d_hat, const Tensor& d_gt, const Tensor& valid);

// Outlier fraction. paper_or: |e| > 3 or (|e| >= 5% |d_gt| and |e| > 0);
// kitti_and: |e| > 3 and |e| >= 5% |d_gt|.
bool IsD1Outlier(double abs_error, double gt, D1Mode mode);
double D1(const Tensor& d_hat, const Tensor& d_gt, const Tensor& valid, D1Mode mode);

struct ApeStats {
  double avg = 0.0;
  double median = 0.0;  // lower-middle element for even counts
};

// Per-pixel | |e| - sigma |.
ApeStats Ape(const Tensor& abs_errors, const Tensor& sigma, const Tensor& valid);

struct RocPoint {
  double density = 0.0;
  double mean_epe = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Valid pixels sorted ascending by (key, index); point i of `steps` holds the
// mean |e| of the first ceil(i * n / steps) pixels. The area uses the
// trapezoid rule with the curve held flat from density 0 to the first point.
RocCurve RocAuc(const Tensor& abs_errors, const Tensor& key, const Tensor& valid,
                std::size_t steps);

struct EvalOptions {
  std::size_t roc_steps = 20;
  D1Mode d1_mode = D1Mode::kPaperOr;
};

struct EvalReport {
  double epe = 0.0;
  double d1 = 0.0;
  double ape_avg = 0.0;
  double ape_median = 0.0;
  RocCurve roc_optimal;
  RocCurve roc_estimated;
  double auc_optimal = 0.0;
  double auc_estimated = 0.0;
  std::size_t n_valid = 0;
};

// sigma is the predicted Laplace scale exp(s).
EvalReport MakeEvalReport(const Tensor& d_hat, const Tensor& d_gt, const Tensor& sigma,
                          const Tensor& valid, const EvalOptions& options = {});

// Hard nearest-center histogram with `pseudo_count` added to every bin before
// normalizing. Values below C_0 or above C_m land in the end bins.
std::vector<double> HardHistogram(const Tensor& values, const Tensor& mask, const BinSpec& spec,
                                  double pseudo_count = 1.0);

// sum_j p(j) ln(p(j) / q(j)).
double DiscreteKl(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace sedkit

#endif  // SEDKIT_METRICS_H_
