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

#include "sedkit/gradcheck_suite.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sedkit/head.h"
#include "sedkit/hist.h"
#include "sedkit/loss.h"
#include "sedkit/rng.h"
#include "sedkit/stereo_toy.h"
#include "sedkit/tensor.h"

namespace sedkit {

namespace {

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}
  double Uniform(double lo, double hi) { return lo + (hi - lo) * CounterUniform(seed_, stream_, i_++); }
  std::vector<double> Uniforms(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = Uniform(lo, hi);
    return v;
  }
  // Signed offset with |offset| in [lo, hi].
  double Offset(double lo, double hi) {
    const double mag = Uniform(lo, hi);
    return Uniform(0.0, 1.0) < 0.5 ? -mag : mag;
  }

 private:
  std::uint64_t seed_, stream_, i_ = 0;
};

std::vector<std::size_t> Range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  return idx;
}

// Slice [begin, begin + ShapeSize(shape)) of a flat leaf, reshaped.
Tensor Slice(const Tensor& flat, std::size_t begin, const Shape& shape) {
  return Reshape(Gather(flat, Range(begin, begin + ShapeSize(shape))), shape);
}

double LaplacianNllCase(const GradCheckOptions& o, std::size_t instance) {
  Draws r(o.seed, 0x1000 + instance);
  const Shape shape{4, 4};
  const std::size_t n = 16;
  const Tensor d(shape, r.Uniforms(n, 0.0, 20.0));
  std::vector<double> x(2 * n);
  for (std::size_t i = 0; i < n; ++i) x[i] = d[i] + r.Offset(0.05, 4.0);
  for (std::size_t i = 0; i < n; ++i) x[n + i] = r.Uniform(-1.5, 1.5);
  const Tensor mask(shape, std::vector<double>(n, 1.0));
  return GradCheck(
      [&](Tape&, const Tensor& leaf) {
        return LaplacianNll(Slice(leaf, 0, shape), d, Slice(leaf, n, shape), mask);
      },
      Tensor::Vector(x), o.step);
}

double SoftHistogramKlCase(const GradCheckOptions& o, std::size_t instance) {
  Draws r(o.seed, 0x2000 + instance);
  const std::size_t n = 16;
  std::vector<double> eps = r.Uniforms(n, 0.05, 4.0);
  const Tensor ones = Tensor::Full({n}, 1.0);
  const BatchStats stats = ComputeBatchStats(Tensor::Vector(eps), ones);
  const BinSpec spec = MakeCenters(stats.mu, stats.b, 11, BinScale::kLinear, 10.0);
  const double lambda2 = DefaultLambda2(spec);
  std::vector<double> x = eps;
  for (std::size_t i = 0; i < n; ++i) x.push_back(r.Uniform(0.05, spec.center(spec.last_index())));
  return GradCheck(
      [&](Tape&, const Tensor& leaf) {
        const Histogram h_eps = SoftHistogram(Slice(leaf, 0, {n}), ones, spec, 10.0, lambda2);
        const Histogram h_sigma = SoftHistogram(Slice(leaf, n, {n}), ones, spec, 10.0, lambda2);
        return KlLoss(h_eps, h_sigma);
      },
      Tensor::Vector(x), o.step);
}

double SednetLossCase(const GradCheckOptions& o, std::size_t instance) {
  Draws r(o.seed, 0x3000 + instance);
  const Shape shape{8, 8};
  const std::size_t n = 64, levels = 4;
  const Tensor d_gt(shape, r.Uniforms(n, 0.0, 30.0));
  const Tensor valid(shape, std::vector<double>(n, 1.0));
  std::vector<Tensor> d_hat;
  std::vector<double> x;
  for (std::size_t k = 0; k < levels; ++k) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = d_gt[i] + r.Offset(0.05, 3.0);
    x.insert(x.end(), v.begin(), v.end());
    d_hat.emplace_back(shape, std::move(v));
  }
  for (std::size_t i = 0; i < levels * n; ++i) x.push_back(std::log(r.Uniform(0.1, 3.0)));

  LossConfig cfg;
  InlierPolicy policy;
  const std::vector<LevelPlan> plan = PlanSednetLoss(d_hat, d_gt, valid, cfg, policy);
  return GradCheck(
      [&](Tape&, const Tensor& leaf) {
        std::vector<Tensor> dh, s;
        for (std::size_t k = 0; k < levels; ++k) {
          dh.push_back(Slice(leaf, k * n, shape));
          s.push_back(Slice(leaf, (levels + k) * n, shape));
        }
        return EvaluateSednetLoss(plan, dh, s, d_gt, cfg).total;
      },
      Tensor::Vector(x), o.step);
}

// Redraws until every hidden pre-activation is at least `margin` from the
// leaky-ReLU kink.
double HeadForwardCase(const GradCheckOptions& o, std::size_t instance) {
  const Shape map_shape{4, 4};
  const std::size_t pixels = 16;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Draws r(o.seed, 0x4000 + 0x100 * instance + attempt);
    const UncertaintyHead head = UncertaintyHead::Init(CounterHash(o.seed, instance, attempt));
    std::vector<double> params = head.Flatten();
    for (double& p : params) p += r.Uniform(-0.1, 0.1);  // non-zero biases too
    const Pdv pdv{map_shape, Tensor(Shape{pixels, 6}, r.Uniforms(pixels * 6, -3.0, 3.0))};
    const Tensor proj(Shape{pixels}, r.Uniforms(pixels, -1.0, 1.0));

    UncertaintyHead probe = head;
    probe.Assign(params);
    bool near_kink = false;
    Tensor act = pdv.features;
    for (std::size_t l = 0; l + 1 < probe.layers().size(); ++l) {
      const Tensor z = AddBias(MatMul(act, probe.layers()[l].weight), probe.layers()[l].bias);
      for (double v : z.values()) near_kink = near_kink || std::abs(v) < 1e-3;
      act = LeakyRelu(z, kLeakySlope);
    }
    if (near_kink) continue;

    const std::vector<std::size_t> sizes = head.layer_sizes();
    return GradCheck(
        [&](Tape&, const Tensor& leaf) {
          std::vector<Tensor> tensors;
          std::size_t offset = 0;
          for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            tensors.push_back(Slice(leaf, offset, {sizes[l], sizes[l + 1]}));
            offset += sizes[l] * sizes[l + 1];
            tensors.push_back(Slice(leaf, offset, {sizes[l + 1]}));
            offset += sizes[l + 1];
          }
          const UncertaintyHead live = UncertaintyHead::FromParameters(sizes, tensors);
          const std::vector<Tensor> s = HeadForward(live, pdv);
          Tensor total = Sum(Reshape(s[0], {pixels}) * proj);
          for (std::size_t k = 1; k < s.size(); ++k) {
            total = total + Scale(Sum(Reshape(s[k], {pixels}) * proj), static_cast<double>(k + 1));
          }
          return total;
        },
        Tensor::Vector(params), o.step);
  }
}

double SoftArgmaxCase(const GradCheckOptions& o, std::size_t instance) {
  Draws r(o.seed, 0x5000 + instance);
  const Shape shape{3, 3, 9};
  const Tensor proj(Shape{3, 3}, r.Uniforms(9, -1.0, 1.0));
  return GradCheck(
      [&](Tape&, const Tensor& leaf) { return Sum(SoftArgmax(leaf, 0.1) * proj); },
      Tensor(shape, r.Uniforms(ShapeSize(shape), -1.0, 1.0)), o.step);
}

}  // namespace

std::vector<GradCheckOutcome> RunGradCheckSuite(const GradCheckOptions& options) {
  using CaseFn = double (*)(const GradCheckOptions&, std::size_t);
  const std::vector<std::pair<std::string, CaseFn>> cases = {
      {"laplacian_nll", &LaplacianNllCase},
      {"soft_histogram_kl", &SoftHistogramKlCase},
      {"sednet_loss", &SednetLossCase},
      {"head_forward", &HeadForwardCase},
      {"soft_argmax", &SoftArgmaxCase},
  };
  std::vector<GradCheckOutcome> outcomes;
  for (const auto& [name, fn] : cases) {
    GradCheckOutcome out{name, options.instances, 0.0, options.tolerance};
    for (std::size_t i = 0; i < options.instances; ++i) {
      out.worst_rel_error = std::max(out.worst_rel_error, fn(options, i));
    }
    outcomes.push_back(out);
  }
  return outcomes;
}

}  // namespace sedkit
