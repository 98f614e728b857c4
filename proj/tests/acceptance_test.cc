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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cli_runner.h"
#include "oracles.h"
#include "sedkit/config.h"
#include "sedkit/experiment.h"
#include "sedkit/gradcheck_suite.h"
#include "sedkit/head.h"
#include "sedkit/hist.h"
#include "sedkit/io.h"
#include "sedkit/loss.h"
#include "sedkit/metrics.h"
#include "sedkit/stereo_toy.h"
#include "sedkit/synth.h"

namespace sedkit {
namespace {

// Tolerances and budgets.
constexpr double kGradTolerance = 1e-4;
constexpr std::size_t kGradInstances = 20;
constexpr double kGradBudgetSeconds = 60.0;
constexpr double kMassTolerance = 1e-9;
constexpr double kIdenticalKlTolerance = 1e-12;
constexpr std::size_t kHistInstances = 1000;
constexpr double kSoftKlDrop = 0.5;
constexpr std::size_t kMaxTrainSteps = 2000;
constexpr double kTrainBudgetSeconds = 300.0;
constexpr std::size_t kAucInstances = 1000;
constexpr double kAucGapShrink = 0.3;
constexpr std::size_t kHeadParams = 190;
constexpr std::size_t kMetricInstances = 100;
constexpr double kMetricTolerance = 1e-9;
constexpr double kMedianLimit = 0.25;
constexpr double kRetentionLimit = 0.95;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

Tensor V(const std::vector<double>& v) { return Tensor::Vector(v); }

// ---- 1 --------------------------------------------------------------------

Verdict GradientCorrectness() {
  const auto start = Clock::now();
  GradCheckOptions opt;
  opt.instances = kGradInstances;
  opt.tolerance = kGradTolerance;
  const std::vector<GradCheckOutcome> outcomes = RunGradCheckSuite(opt);
  const double elapsed = Seconds(start);
  bool ok = outcomes.size() == 5 && elapsed < kGradBudgetSeconds;
  std::string detail;
  for (const GradCheckOutcome& o : outcomes) {
    ok = ok && o.passed() && o.instances >= kGradInstances;
    detail += o.name + "=" + Fmt("%.1e", o.worst_rel_error) + " ";
  }
  return {ok, detail + Fmt("in %.1fs", elapsed)};
}

// ---- 2 --------------------------------------------------------------------

Verdict HistogramProperties() {
  oracle::Lcg rng(2024);
  double worst_mass = 0.0, min_kl = 1e9, worst_identical = 0.0;
  for (std::size_t t = 0; t < kHistInstances; ++t) {
    const std::size_t n = 1 + rng.Index(200);
    std::vector<double> v(n), w(n), mask(n);
    const double spread = rng.Uniform(0.01, 20.0);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = spread * -std::log(rng.Uniform());
      w[i] = spread * -std::log(rng.Uniform());
      mask[i] = rng.Uniform() < 0.9 ? 1.0 : 0.0;
    }
    mask[rng.Index(n)] = 1.0;
    const Tensor m = V(mask);
    const BatchStats st = ComputeBatchStats(V(v), m);
    const BinScale scale = t % 2 ? BinScale::kLinear : BinScale::kLogarithmic;
    const BinSpec spec = MakeCenters(st.mu, st.b, 2 + rng.Index(20), scale, rng.Uniform(1, 20));
    const double l1 = rng.Uniform(0.5, 100.0);
    const double l2 = DefaultLambda2(spec) * rng.Uniform(0.25, 4.0);
    const Histogram hv = SoftHistogram(V(v), m, spec, l1, l2);
    const Histogram hw = SoftHistogram(V(w), m, spec, l1, l2);
    double mass = 0.0;
    for (double x : hv.mass.values()) mass += x;
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    min_kl = std::min({min_kl, KlLoss(hv, hw).item(), KlLoss(hw, hv).item()});
    worst_identical = std::max(worst_identical, std::abs(KlLoss(hv, hv).item()));
  }

  // A sample sitting on a center concentrates more mass there as lambda1 grows.
  bool monotone = true;
  for (std::size_t t = 0; t < 100; ++t) {
    const BinSpec spec = MakeCenters(rng.Uniform(0, 3), rng.Uniform(0.1, 3), 11,
                                     t % 2 ? BinScale::kLinear : BinScale::kLogarithmic, 10);
    const std::vector<double> centers = spec.centers();
    const std::size_t j = rng.Index(centers.size());
    const double l2 = DefaultLambda2(spec);
    double prev = -1.0;
    for (double l1 : {1.0, 10.0, 100.0}) {
      const double at = SoftHistogram(V({centers[j]}), V({1.0}), spec, l1, l2).mass[j];
      monotone = monotone && at > prev;
      prev = at;
    }
  }
  const bool ok = worst_mass <= kMassTolerance && min_kl >= 0.0 &&
                  worst_identical < kIdenticalKlTolerance && monotone;
  return {ok, Fmt("max|sum-1|=%.1e min_kl=%.2e max_kl_identical=%.1e", worst_mass, min_kl,
                  worst_identical) +
                  (monotone ? " lambda1-monotone" : " NOT lambda1-monotone")};
}

// ---- 3 and 4 --------------------------------------------------------------

// Hard-histogram KL(eps || sigma) on the finest level, computed by the oracle.
double OracleHardKl(const UncertaintyHead& head, const ExperimentData& data) {
  const std::vector<Tensor> s = PredictLogNoise(head, data);
  const std::size_t n = data.d_gt.size();
  std::vector<double> eps(n), sigma(n);
  const std::vector<double> mask = data.valid.values();
  for (std::size_t i = 0; i < n; ++i) {
    eps[i] = std::fabs(data.d_hat.back()[i] - data.d_gt[i]);
    sigma[i] = std::exp(s.back()[i]);
  }
  double mu = 0, b = 0;
  oracle::Stats(eps, mask, &mu, &b);
  const std::vector<double> centers = oracle::LinearCenters(mu, b, 11, 10.0);
  return oracle::Kl(oracle::HardHistogram(eps, mask, centers),
                    oracle::HardHistogram(sigma, mask, centers));
}

struct TrainingOutcome {
  double soft_before = 0, soft_after = 0;
  double hard_sednet = 0, hard_log_only = 0;
  double gap_before = 0, gap_after = 0;
  double seconds = 0;
};

TrainingOutcome RunTraining() {
  const auto start = Clock::now();
  RunConfig cfg;  // Laplace source, seed 1
  const ExperimentData train = MakeData(cfg, cfg.seed);
  const ExperimentData held_out = MakeData(cfg, cfg.seed + 1000);
  const UncertaintyHead initial = UncertaintyHead::Init(cfg.seed, cfg.HeadLayerSizes());

  TrainingOutcome o;
  o.soft_before = MeasureHead(cfg, initial, train).soft_kl;
  o.gap_before = MeasureHead(cfg, initial, held_out).auc_gap();
  const UncertaintyHead sednet = TrainHead(cfg, train, initial).head;
  o.soft_after = MeasureHead(cfg, sednet, train).soft_kl;
  o.gap_after = MeasureHead(cfg, sednet, held_out).auc_gap();
  o.hard_sednet = OracleHardKl(sednet, train);

  RunConfig log_cfg = cfg;
  log_cfg.loss.use_kl = false;
  o.hard_log_only = OracleHardKl(TrainHead(log_cfg, train, initial).head, train);
  o.seconds = Seconds(start);
  return o;
}

Verdict DistributionMatching(const TrainingOutcome& o) {
  const RunConfig cfg;
  const double drop = 1.0 - o.soft_after / o.soft_before;
  const bool ok = drop >= kSoftKlDrop && o.hard_sednet < o.hard_log_only &&
                  cfg.epochs <= kMaxTrainSteps && o.seconds < kTrainBudgetSeconds;
  return {ok, Fmt("soft_kl %.4f->%.4f (-%.0f%%)", o.soft_before, o.soft_after, 100 * drop) +
                  Fmt(" hard_kl sednet=%.4f log_only=%.4f", o.hard_sednet, o.hard_log_only) +
                  Fmt(" %.0f steps %.1fs", static_cast<double>(cfg.epochs), o.seconds)};
}

Verdict AucOrdering(const TrainingOutcome& o) {
  oracle::Lcg rng(404);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < kAucInstances; ++t) {
    const std::size_t n = 1 + rng.Index(300);
    std::vector<double> dh(n), gt(n), sg(n), valid(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt[i] = rng.Uniform(0, 100);
      dh[i] = gt[i] + rng.Uniform(-1, 1) * std::pow(10.0, rng.Uniform(-3, 1.5));
      sg[i] = t % 3 == 0 ? std::floor(rng.Uniform(0, 4)) : rng.Uniform(0, 10);
      valid[i] = rng.Uniform() < 0.85 ? 1.0 : 0.0;
    }
    valid[0] = 1.0;
    const EvalReport r =
        MakeEvalReport(V(dh), V(gt), V(sg), V(valid), EvalOptions{2 + rng.Index(40)});
    if (!(r.auc_optimal <= r.auc_estimated)) ++violations;
  }
  const double shrink = 1.0 - o.gap_after / o.gap_before;
  const bool ok = violations == 0 && shrink >= kAucGapShrink;
  return {ok, Fmt("violations=%.0f/%.0f heldout gap %.4f->%.4f", static_cast<double>(violations),
                  static_cast<double>(kAucInstances), o.gap_before, o.gap_after) +
                  Fmt(" (-%.0f%%)", 100 * shrink)};
}

// ---- 5 --------------------------------------------------------------------

Verdict HeadSize() {
  const UncertaintyHead head = UncertaintyHead::Init(1);
  std::size_t counted = 0;
  for (const DenseLayer& layer : head.layers()) counted += layer.weight.size() + layer.bias.size();
  std::size_t fits = 0;
  for (std::size_t h1 = 1; h1 <= 64; ++h1) {
    for (std::size_t h2 = 1; h2 <= 64; ++h2) fits += (7 * h1 + h1 * h2 + 5 * h2 + 4) == kHeadParams;
  }
  const bool ok = head.param_count() == kHeadParams && counted == kHeadParams &&
                  head.Flatten().size() == kHeadParams && fits >= 1;
  return {ok, Fmt("param_count=%.0f enumerated=%.0f widths 6-8-10-4, %.0f width pairs give 190",
                  static_cast<double>(head.param_count()), static_cast<double>(counted),
                  static_cast<double>(fits))};
}

// ---- 6 --------------------------------------------------------------------

Verdict MetricOracles() {
  oracle::Lcg rng(606);
  double worst = 0.0;
  for (std::size_t t = 0; t < kMetricInstances; ++t) {
    const std::size_t n = 1 + rng.Index(64);
    std::vector<double> dh(n), gt(n), sg(n), valid(n), err(n);
    for (std::size_t i = 0; i < n; ++i) {
      gt[i] = rng.Uniform(0, 60);
      dh[i] = gt[i] + rng.Uniform(-8, 8);
      sg[i] = t % 2 ? rng.Uniform(0, 5) : std::floor(rng.Uniform(0, 3));  // ties half the time
      valid[i] = rng.Uniform() < 0.8 ? 1.0 : 0.0;
      err[i] = std::fabs(dh[i] - gt[i]);
    }
    valid[rng.Index(n)] = 1.0;
    const std::size_t steps = 2 + rng.Index(30);
    const Tensor tdh = V(dh), tgt = V(gt), tsg = V(sg), tv = V(valid), terr = V(err);

    const oracle::Ape ape = oracle::ApeOf(err, sg, valid);
    const ApeStats got = Ape(terr, tsg, tv);
    const double diffs[] = {
        Epe(tdh, tgt, tv) - oracle::Epe(dh, gt, valid),
        D1(tdh, tgt, tv, D1Mode::kPaperOr) - oracle::D1(dh, gt, valid, false),
        D1(tdh, tgt, tv, D1Mode::kKittiAnd) - oracle::D1(dh, gt, valid, true),
        got.avg - ape.avg,
        got.median - ape.median,
        RocAuc(terr, tsg, tv, steps).auc - oracle::RocAuc(err, sg, valid, steps),
        RocAuc(terr, terr, tv, steps).auc - oracle::RocAuc(err, err, valid, steps),
    };
    for (double d : diffs) worst = std::max(worst, std::fabs(d));
  }
  return {worst <= kMetricTolerance, Fmt("max abs diff %.1e over epe, d1 x2, ape x2, auc x2", worst)};
}

// ---- 7 --------------------------------------------------------------------

Verdict MatcherSanity() {
  double worst_median = 0.0, worst_retention = 1.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (double shift : {1.0, 2.0, 4.0, 6.0, 9.0, 12.0, 16.0}) {
      const SyntheticScene scene = GenShiftScene(seed, 64, 64, shift);
      const Tensor finest = MatchPyramid(scene.left, scene.right).levels.back().full;
      std::vector<double> e;
      for (std::size_t i = 0; i < finest.size(); ++i) {
        if (scene.valid[i] != 0.0) e.push_back(std::fabs(finest[i] - shift));
      }
      std::vector<double> sorted = e;
      std::sort(sorted.begin(), sorted.end());
      worst_median = std::max(worst_median, sorted[(sorted.size() - 1) / 2]);
      const Tensor abs_err = Abs(finest - Tensor::Full(finest.shape(), shift));
      InlierPolicy policy;
      policy.kind = InlierKind::kAdaptive;
      policy.adaptive_k = 3.0;
      worst_retention =
          std::min(worst_retention, InlierMask(abs_err, scene.valid, policy).pct);
    }
  }
  const bool ok = worst_median < kMedianLimit && worst_retention >= kRetentionLimit;
  return {ok, Fmt("worst median %.3f px, worst adaptive retention %.1f%% (21 scenes)",
                  worst_median, 100 * worst_retention)};
}

// ---- 8 --------------------------------------------------------------------

std::string TrainOutputs(const std::string& config, const std::string& name, const char* threads) {
  namespace fs = std::filesystem;
  const fs::path dir = clirun::ScratchDir("accept_" + name);
  WriteFile((dir / "cfg.txt").string(), config);
  const auto r = clirun::Run("train --config '" + (dir / "cfg.txt").string() + "' --out-dir '" +
                                 (dir / "out").string() + "'",
                             std::string("SEDKIT_THREADS=") + threads);
  std::string all = "exit=" + std::to_string(r.exit_code) + "\n";
  for (const char* f :
       {"head.bin", "diagnostics.csv", "report.csv", "roc.csv", "summary.csv", "config.txt"}) {
    const fs::path p = dir / "out" / f;
    if (!fs::exists(p)) return "missing " + std::string(f);
    all += std::string(f) + "\n" + clirun::Slurp(p);
  }
  fs::remove_all(dir);
  return all;
}

Verdict Determinism() {
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"laplace", "source = laplace\nseed = 3\nepochs = 300\n"},
      {"stereo", "source = stereo\nseed = 5\nwidth = 64\nheight = 48\nd_max = 16\nepochs = 40\n"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, cfg] : configs) {
    const std::string a = TrainOutputs(cfg, name + "_a", "1");
    const std::string b = TrainOutputs(cfg, name + "_b", "1");
    const std::string c = TrainOutputs(cfg, name + "_c", "4");
    const bool same = a.rfind("exit=0\n", 0) == 0 && a == b && a == c;
    ok = ok && same;
    detail += name + (same ? " identical " : " DIFFER ");
  }
  return {ok, detail + "(6 files, 2 runs at 1 thread + 1 run at 4 threads)"};
}

int Main() {
  int failures = 0;
  auto report = [&](int id, const std::string& title, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "gradient correctness", GradientCorrectness);
  report(2, "histogram/KL properties", HistogramProperties);
  TrainingOutcome trained;
  bool trained_ok = true;
  try {
    trained = RunTraining();
  } catch (const std::exception& e) {
    trained_ok = false;
    std::printf("training failed: %s\n", e.what());
  }
  report(3, "distribution matching", [&] {
    return trained_ok ? DistributionMatching(trained) : Verdict{false, "training failed"};
  });
  report(4, "auc ordering", [&] {
    return trained_ok ? AucOrdering(trained) : Verdict{false, "training failed"};
  });
  report(5, "head size", HeadSize);
  report(6, "metric oracles", MetricOracles);
  report(7, "toy matcher sanity", MatcherSanity);
  report(8, "determinism", Determinism);
  return failures;
}

}  // namespace
}  // namespace sedkit

int main() { return sedkit::Main(); }
