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

// Straight-line reference computations on plain vectors. Nothing here calls
// into the library; these are the independent oracles the tests compare to.

#ifndef SEDKIT_TESTS_ORACLES_H_
#define SEDKIT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// Small deterministic generator independent of the library RNG.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  double Uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return (static_cast<double>(state_ >> 11) + 0.5) / 9007199254740992.0;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(Uniform() * n) % n; }

 private:
  std::uint64_t state_;
};

inline double Epe(const Vec& d_hat, const Vec& gt, const Vec& valid) {
  double total = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (valid[i] != 0.0) {
      total += std::fabs(d_hat[i] - gt[i]);
      count += 1.0;
    }
  }
  return total / count;
}

// kitti: both clauses; otherwise either clause, the relative one needing e > 0.
inline double D1(const Vec& d_hat, const Vec& gt, const Vec& valid, bool kitti) {
  double bad = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (valid[i] == 0.0) continue;
    count += 1.0;
    const double e = std::fabs(d_hat[i] - gt[i]);
    const bool abs_bad = e > 3.0;
    const bool rel_bad = e >= 0.05 * std::fabs(gt[i]);
    if (kitti) {
      if (abs_bad && rel_bad) bad += 1.0;
    } else {
      if (abs_bad || (rel_bad && e > 0.0)) bad += 1.0;
    }
  }
  return bad / count;
}

struct Ape {
  double avg;
  double median;
};

inline Ape ApeOf(const Vec& abs_err, const Vec& sigma, const Vec& valid) {
  Vec d;
  for (std::size_t i = 0; i < abs_err.size(); ++i) {
    if (valid[i] != 0.0) d.push_back(std::fabs(abs_err[i] - sigma[i]));
  }
  double total = 0.0;
  for (double v : d) total += v;
  std::sort(d.begin(), d.end());
  return {total / d.size(), d[(d.size() - 1) / 2]};
}

// Sparsification curve by repeated selection: for each step, pick the count
// first pixels in (key, index) order by scanning, then average their errors.
inline double RocAuc(const Vec& abs_err, const Vec& key, const Vec& valid, std::size_t steps,
                     Vec* curve = nullptr) {
  std::vector<std::size_t> order;
  std::vector<bool> taken(abs_err.size(), false);
  std::size_t n = 0;
  for (double v : valid) n += v != 0.0 ? 1 : 0;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = abs_err.size();
    for (std::size_t i = 0; i < abs_err.size(); ++i) {
      if (valid[i] == 0.0 || taken[i]) continue;
      if (best == abs_err.size() || key[i] < key[best]) best = i;
    }
    taken[best] = true;
    order.push_back(best);
  }
  Vec y;
  for (std::size_t s = 1; s <= steps; ++s) {
    const std::size_t count = (s * n + steps - 1) / steps;
    double total = 0.0;
    for (std::size_t r = 0; r < count; ++r) total += abs_err[order[r]];
    y.push_back(count == 0 ? 0.0 : total / count);
  }
  if (curve) *curve = y;
  const double dx = 1.0 / steps;
  double auc = dx * y[0];
  for (std::size_t s = 1; s < steps; ++s) auc += dx * (y[s - 1] + y[s]) / 2.0;
  return auc;
}

// Population mean and standard deviation of the masked values.
inline void Stats(const Vec& v, const Vec& mask, double* mu, double* b) {
  double n = 0.0, s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] != 0.0) {
      s += v[i];
      n += 1.0;
    }
  }
  *mu = s / n;
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] != 0.0) q += (v[i] - *mu) * (v[i] - *mu);
  }
  *b = std::max(std::sqrt(q / n), 1e-6);
}

inline Vec SoftHistogram(const Vec& v, const Vec& mask, const Vec& centers, double l1,
                         double l2) {
  Vec h(centers.size(), 0.0);
  double n = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] == 0.0) continue;
    n += 1.0;
    Vec w(centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
      w[j] = l1 * std::exp(-(centers[j] - v[i]) * (centers[j] - v[i]) / l2);
    }
    double z = 0.0;
    for (double x : w) z += std::exp(x);
    for (std::size_t j = 0; j < centers.size(); ++j) h[j] += std::exp(w[j]) / z;
  }
  for (double& x : h) x /= n;
  return h;
}

inline double Kl(const Vec& p, const Vec& q) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * std::log(p[j] / q[j]);
  return s;
}

// Evenly spaced centers mu + (j / m) * alpha_max * b, j = 0..m.
inline Vec LinearCenters(double mu, double b, std::size_t count, double alpha_max) {
  Vec c(count);
  for (std::size_t j = 0; j < count; ++j) {
    c[j] = mu + alpha_max * b * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return c;
}

// Nearest-center counts plus one per bin, normalized.
inline Vec HardHistogram(const Vec& v, const Vec& mask, const Vec& centers) {
  Vec h(centers.size(), 1.0);
  double total = static_cast<double>(centers.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i] == 0.0) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      if (std::fabs(v[i] - centers[j]) < std::fabs(v[i] - centers[best])) best = j;
    }
    h[best] += 1.0;
    total += 1.0;
  }
  for (double& x : h) x /= total;
  return h;
}

inline double LaplacianNll(const Vec& d_hat, const Vec& d, const Vec& s, const Vec& mask) {
  double a = 0.0, b = 0.0, n = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (mask[i] == 0.0) continue;
    a += std::fabs(d_hat[i] - d[i]) / std::exp(s[i]);
    b += s[i];
    n += 1.0;
  }
  return a / n + b / n;
}

}  // namespace oracle

#endif  // SEDKIT_TESTS_ORACLES_H_
