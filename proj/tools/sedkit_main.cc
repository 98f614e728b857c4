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

// sedkit command-line driver.
//
//   sedkit synth --seed N --out-dir DIR [--width W --height H --d-max D --gt-density P]
//   sedkit train --config FILE --out-dir DIR
//   sedkit eval --dhat A.pfm --gt B.pfm --sigma C.pfm [--steps N --d1-mode M --max-disp D
//               --roc-out FILE]
//   sedkit hist --values A [--values B ...] [--config FILE] [--out-dir DIR]
//   sedkit gradcheck [--seed N --instances N --tolerance T]

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sedkit/config.h"
#include "sedkit/experiment.h"
#include "sedkit/gradcheck_suite.h"
#include "sedkit/hist.h"
#include "sedkit/io.h"
#include "sedkit/loss.h"
#include "sedkit/metrics.h"
#include "sedkit/synth.h"
#include "sedkit/tensor.h"

namespace sedkit {
namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct SynthArgs {
  std::uint64_t seed = 1;
  std::string out_dir;
  std::size_t width = 64;
  std::size_t height = 64;
  double d_max = 32.0;
  double gt_density = 1.0;
};

int RunSynth(const SynthArgs& a) {
  const SyntheticScene scene = GenScene(a.seed, a.width, a.height, a.d_max, a.gt_density);
  fs::create_directories(a.out_dir);
  WritePgm(JoinPath(a.out_dir, "left.pgm"), scene.left);
  WritePgm(JoinPath(a.out_dir, "right.pgm"), scene.right);
  // Invalid pixels are stored as +inf, the usual sparse-ground-truth marker.
  std::vector<double> disp = scene.disparity.values();
  for (std::size_t i = 0; i < disp.size(); ++i) {
    if (scene.valid[i] == 0.0) disp[i] = std::numeric_limits<double>::infinity();
  }
  WritePfm(JoinPath(a.out_dir, "disp.pfm"),
           TensorToPfm(Tensor(scene.disparity.shape(), std::move(disp))));
  WritePgm(JoinPath(a.out_dir, "valid.pgm"), scene.valid);
  return kExitOk;
}

struct TrainArgs {
  std::string config;
  std::string out_dir;
};

int RunTrain(const TrainArgs& a) {
  const RunConfig cfg = a.config.empty() ? RunConfig{} : LoadRunConfig(a.config);
  const TrainArtifacts out = RunTrainExperiment(cfg);
  fs::create_directories(a.out_dir);
  WriteFile(JoinPath(a.out_dir, "head.bin"), out.head_bin);
  WriteFile(JoinPath(a.out_dir, "diagnostics.csv"), out.diagnostics_csv);
  WriteFile(JoinPath(a.out_dir, "report.csv"), out.report_csv);
  WriteFile(JoinPath(a.out_dir, "roc.csv"), out.roc_csv);
  WriteFile(JoinPath(a.out_dir, "summary.csv"), out.summary_csv);
  WriteFile(JoinPath(a.out_dir, "config.txt"), FormatRunConfig(cfg));
  return kExitOk;
}

struct EvalArgs {
  std::string dhat, gt, sigma, roc_out;
  std::size_t steps = 20;
  std::string d1_mode = "paper_or";
  double max_disp = 192.0;
};

int RunEval(const EvalArgs& a) {
  const Tensor d_hat = PfmToTensor(ReadPfm(a.dhat));
  const Tensor d_gt = PfmToTensor(ReadPfm(a.gt));
  const Tensor sigma = PfmToTensor(ReadPfm(a.sigma));
  if (d_hat.shape() != d_gt.shape() || sigma.shape() != d_gt.shape()) {
    throw std::invalid_argument("eval: input maps differ in size");
  }
  std::vector<double> valid(d_gt.size(), 0.0);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!std::isfinite(d_gt[i]) || d_gt[i] > a.max_disp) continue;
    if (!std::isfinite(d_hat[i]) || !std::isfinite(sigma[i])) {
      throw std::invalid_argument("eval: non-finite prediction at a valid pixel");
    }
    valid[i] = 1.0;
  }
  const EvalReport report = MakeEvalReport(d_hat, d_gt, sigma, Tensor(d_gt.shape(), valid),
                                           EvalOptions{a.steps, ParseD1Mode(a.d1_mode)});
  std::cout << ReportCsv(report);
  if (!a.roc_out.empty()) WriteFile(a.roc_out, RocCsv(report.roc_estimated));
  return kExitOk;
}

// PFM files are recognised by their magic; anything else is parsed as
// whitespace-separated numbers.
Tensor ReadValues(const std::string& path) {
  const std::string bytes = ReadFile(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == 'f' || bytes[1] == 'F')) {
    const Tensor t = PfmToTensor(ParsePfm(bytes));
    return Reshape(t, {t.size()});
  }
  std::istringstream in(bytes);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw std::invalid_argument(path + ": not a number: " + token);
    values.push_back(v);
  }
  return Tensor::Vector(std::move(values));
}

Tensor FiniteMask(const Tensor& t) {
  std::vector<double> m(t.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::isfinite(t[i]) ? 1.0 : 0.0;
  return Tensor(t.shape(), std::move(m));
}

// Replaces masked-out entries by zero so the histogram kernel stays finite.
Tensor ZeroMasked(const Tensor& t, const Tensor& mask) {
  std::vector<double> v = t.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] == 0.0) v[i] = 0.0;
  }
  return Tensor(t.shape(), std::move(v));
}

struct HistArgs {
  std::vector<std::string> values;
  std::string config;
  std::string out_dir = ".";
};

int RunHist(const HistArgs& a) {
  const RunConfig cfg = a.config.empty() ? RunConfig{} : LoadRunConfig(a.config);
  std::vector<Tensor> inputs, masks;
  for (const std::string& path : a.values) {
    const Tensor raw = ReadValues(path);
    masks.push_back(FiniteMask(raw));
    inputs.push_back(ZeroMasked(raw, masks.back()));
  }
  const BatchStats stats = ComputeBatchStats(inputs.front(), masks.front());
  const BinSpec spec = MakeCenters(stats.mu, stats.b, cfg.loss.bin_count, cfg.loss.scale,
                                   cfg.loss.alpha_max);
  const double lambda2 = cfg.loss.Lambda2For(spec);

  std::vector<Histogram> hists;
  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    hists.push_back(SoftHistogram(inputs[i], masks[i], spec, cfg.loss.lambda1, lambda2));
    WriteFile(JoinPath(a.out_dir, "hist_" + std::to_string(i) + ".csv"), HistogramCsv(hists[i]));
  }
  CsvWriter kl({"ref", "other", "kl"});
  for (std::size_t i = 0; i < hists.size(); ++i) {
    for (std::size_t j = 0; j < hists.size(); ++j) {
      if (i == j) continue;
      kl.AddRow({std::to_string(i), std::to_string(j), FormatNumber(KlLoss(hists[i], hists[j]).item())});
    }
  }
  WriteFile(JoinPath(a.out_dir, "kl.csv"), kl.text());
  std::cout << kl.text();
  return kExitOk;
}

int RunGradcheck(const GradCheckOptions& options) {
  const std::vector<GradCheckOutcome> outcomes = RunGradCheckSuite(options);
  bool ok = true;
  CsvWriter table({"case", "instances", "worst_rel_error", "tolerance", "passed"});
  for (const GradCheckOutcome& o : outcomes) {
    table.AddRow({o.name, std::to_string(o.instances), FormatNumber(o.worst_rel_error),
                  FormatNumber(o.tolerance), o.passed() ? "1" : "0"});
    ok = ok && o.passed();
  }
  std::cout << table.text();
  return ok ? kExitOk : kExitRuntime;
}

int Main(int argc, char** argv) {
  CLI::App app{"sedkit: uncertainty-head toolkit for stereo disparity"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic stereo scene");
  synth_cmd->add_option("--seed", synth.seed)->required();
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();
  synth_cmd->add_option("--width", synth.width)->check(CLI::Range(32, 4096));
  synth_cmd->add_option("--height", synth.height)->check(CLI::Range(32, 4096));
  synth_cmd->add_option("--d-max", synth.d_max)->check(CLI::Range(0.0, 1024.0));
  synth_cmd->add_option("--gt-density", synth.gt_density)->check(CLI::Range(0.0, 1.0));

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train the uncertainty head on toy data");
  train_cmd->add_option("--config", train.config, "key = value file; defaults if omitted");
  train_cmd->add_option("--out-dir", train.out_dir)->required();

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate PFM predictions");
  eval_cmd->add_option("--dhat", eval.dhat)->required();
  eval_cmd->add_option("--gt", eval.gt)->required();
  eval_cmd->add_option("--sigma", eval.sigma)->required();
  eval_cmd->add_option("--steps", eval.steps)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--d1-mode", eval.d1_mode)->check(CLI::IsMember({"paper_or", "kitti_and"}));
  eval_cmd->add_option("--max-disp", eval.max_disp, "ground truth above this is ignored");
  eval_cmd->add_option("--roc-out", eval.roc_out, "write the estimated ROC curve here");

  HistArgs hist;
  CLI::App* hist_cmd = app.add_subcommand("hist", "soft histograms and pairwise KL");
  hist_cmd->add_option("--values", hist.values, "PFM or whitespace-separated text")->required();
  hist_cmd->add_option("--config", hist.config);
  hist_cmd->add_option("--out-dir", hist.out_dir);

  GradCheckOptions gc;
  CLI::App* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gc_cmd->add_option("--seed", gc.seed);
  gc_cmd->add_option("--instances", gc.instances)->check(CLI::PositiveNumber);
  gc_cmd->add_option("--tolerance", gc.tolerance)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return RunSynth(synth);
    if (*train_cmd) return RunTrain(train);
    if (*eval_cmd) return RunEval(eval);
    if (*hist_cmd) return RunHist(hist);
    if (*gc_cmd) return RunGradcheck(gc);
  } catch (const std::exception& e) {
    std::cerr << "sedkit: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace sedkit

int main(int argc, char** argv) { return sedkit::Main(argc, argv); }
