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

#include "sedkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sedkit {

void ExactSum::Add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::Value() const {
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round half to even across the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

D1Mode ParseD1Mode(const std::string& name) {
  if (name == "paper_or") return D1Mode::kPaperOr;
  if (name == "kitti_and") return D1Mode::kKittiAnd;
  throw std::invalid_argument("unknown d1 mode '" + name + "'");
}

std::string D1ModeName(D1Mode mode) { return mode == D1Mode::kPaperOr ? "paper_or" : "kitti_and"; }

namespace {

std::vector<std::size_t> ValidIndices(const Tensor& valid, std::size_t expected, const char* what) {
  if (valid.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": valid mask size mismatch");
  }
  std::vector<std::size_t> idx = MaskIndices(valid);
  if (idx.empty()) throw std::invalid_argument(std::string(what) + ": no valid pixels");
  return idx;
}

void RequireSameSize(const Tensor& a, const Tensor& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

}  // namespace

double Epe(const Tensor& d_hat, const Tensor& d_gt, const Tensor& valid) {
  RequireSameSize(d_hat, d_gt, "epe");
  const auto idx = ValidIndices(valid, d_hat.size(), "epe");
  ExactSum sum;
  for (std::size_t i : idx) sum.Add(std::abs(d_hat[i] - d_gt[i]));
  return sum.Value() / static_cast<double>(idx.size());
}

bool IsD1Outlier(double abs_error, double gt, D1Mode mode) {
  const bool absolute = abs_error > kD1AbsThreshold;
  const bool relative = abs_error >= kD1RelThreshold * std::abs(gt);
  if (mode == D1Mode::kKittiAnd) return absolute && relative;
  return absolute || (relative && abs_error > 0.0);
}

double D1(const Tensor& d_hat, const Tensor& d_gt, const Tensor& valid, D1Mode mode) {
  RequireSameSize(d_hat, d_gt, "d1");
  const auto idx = ValidIndices(valid, d_hat.size(), "d1");
  std::size_t outliers = 0;
  for (std::size_t i : idx) {
    if (IsD1Outlier(std::abs(d_hat[i] - d_gt[i]), d_gt[i], mode)) ++outliers;
  }
  return static_cast<double>(outliers) / static_cast<double>(idx.size());
}

ApeStats Ape(const Tensor& abs_errors, const Tensor& sigma, const Tensor& valid) {
  RequireSameSize(abs_errors, sigma, "ape");
  const auto idx = ValidIndices(valid, abs_errors.size(), "ape");
  std::vector<double> diffs;
  diffs.reserve(idx.size());
  ExactSum sum;
  for (std::size_t i : idx) {
    const double d = std::abs(std::abs(abs_errors[i]) - sigma[i]);
    diffs.push_back(d);
    sum.Add(d);
  }
  ApeStats out;
  out.avg = sum.Value() / static_cast<double>(idx.size());
  const auto mid = diffs.begin() + static_cast<std::ptrdiff_t>((diffs.size() - 1) / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  out.median = *mid;
  return out;
}

RocCurve RocAuc(const Tensor& abs_errors, const Tensor& key, const Tensor& valid,
                std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("roc needs at least 2 density steps");
  RequireSameSize(abs_errors, key, "roc");
  std::vector<std::size_t> order = ValidIndices(valid, abs_errors.size(), "roc");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  const std::size_t n = order.size();

  RocCurve roc;
  ExactSum prefix;
  std::size_t added = 0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const std::size_t count = (i * n + steps - 1) / steps;
    while (added < count) prefix.Add(std::abs(abs_errors[order[added++]]));
    roc.points.push_back(RocPoint{static_cast<double>(i) / static_cast<double>(steps),
                                  prefix.Value() / static_cast<double>(count)});
  }
  double area = roc.points.front().density * roc.points.front().mean_epe;
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const RocPoint& a = roc.points[i - 1];
    const RocPoint& b = roc.points[i];
    area += (b.density - a.density) * (a.mean_epe + b.mean_epe) / 2.0;
  }
  roc.auc = area;
  return roc;
}

EvalReport MakeEvalReport(const Tensor& d_hat, const Tensor& d_gt, const Tensor& sigma,
                          const Tensor& valid, const EvalOptions& options) {
  RequireSameSize(d_hat, d_gt, "eval");
  RequireSameSize(d_hat, sigma, "eval");
  for (std::size_t i : MaskIndices(valid)) {
    if (!(sigma[i] >= 0.0)) throw std::invalid_argument("eval: sigma must be non-negative");
  }
  std::vector<double> err(d_hat.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = std::abs(d_hat[i] - d_gt[i]);
  const Tensor abs_errors(d_hat.shape(), std::move(err));

  EvalReport r;
  r.epe = Epe(d_hat, d_gt, valid);
  r.d1 = D1(d_hat, d_gt, valid, options.d1_mode);
  const ApeStats ape = Ape(abs_errors, sigma, valid);
  r.ape_avg = ape.avg;
  r.ape_median = ape.median;
  r.roc_optimal = RocAuc(abs_errors, abs_errors, valid, options.roc_steps);
  r.roc_estimated = RocAuc(abs_errors, sigma, valid, options.roc_steps);
  r.auc_optimal = r.roc_optimal.auc;
  r.auc_estimated = r.roc_estimated.auc;
  r.n_valid = MaskIndices(valid).size();
  return r;
}

std::vector<double> HardHistogram(const Tensor& values, const Tensor& mask, const BinSpec& spec,
                                  double pseudo_count) {
  RequireSameSize(values, mask, "hard histogram");
  const std::vector<double> centers = spec.centers();
  std::vector<double> counts(centers.size(), pseudo_count);
  for (std::size_t i : MaskIndices(mask)) {
    const double v = values[i];
    std::size_t best = 0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      if (std::abs(v - centers[j]) < std::abs(v - centers[best])) best = j;
    }
    counts[best] += 1.0;
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("hard histogram is empty");
  for (double& c : counts) c /= total;
  return counts;
}

double DiscreteKl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl: histogram sizes differ");
  double kl = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (!(q[j] > 0.0)) throw std::domain_error("kl: reference mass where other is zero");
    kl += p[j] * std::log(p[j] / q[j]);
  }
  return kl;
}

}  // namespace sedkit
