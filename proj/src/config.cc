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

#include "sedkit/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sedkit/head.h"
#include "sedkit/io.h"

namespace sedkit {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> SplitList(const std::string& v) {
  std::vector<std::string> items;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(Trim(item));
  return items;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"source",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "laplace") {
           c.source = DataSource::kLaplace;
         } else if (v == "stereo") {
           c.source = DataSource::kStereo;
         } else {
           throw std::invalid_argument("config key '" + k + "': unknown source '" + v + "'");
         }
       }},
      {"width", [](RunConfig& c, const std::string& k, const std::string& v) { c.width = ParseUnsigned(k, v); }},
      {"height", [](RunConfig& c, const std::string& k, const std::string& v) { c.height = ParseUnsigned(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = ParseUnsigned(k, v); }},
      {"d_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.d_max = ParseDouble(k, v); }},
      {"noise_scale_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_scale_min = ParseDouble(k, v); }},
      {"noise_scale_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_scale_max = ParseDouble(k, v); }},
      {"noise_scale_cell", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_scale_cell = ParseDouble(k, v); }},
      {"window", [](RunConfig& c, const std::string& k, const std::string& v) { c.matcher.window = ParseUnsigned(k, v); }},
      {"temperature", [](RunConfig& c, const std::string& k, const std::string& v) { c.matcher.temperature = ParseDouble(k, v); }},
      {"bin_count", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.bin_count = ParseUnsigned(k, v); }},
      {"scale", [](RunConfig& c, const std::string&, const std::string& v) { c.loss.scale = ParseBinScale(v); }},
      {"alpha_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.alpha_max = ParseDouble(k, v); }},
      {"lambda1", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.lambda1 = ParseDouble(k, v); }},
      {"lambda2", [](RunConfig& c, const std::string& k, const std::string& v) { c.loss.lambda2 = ParseDouble(k, v); }},
      {"kl_direction", [](RunConfig& c, const std::string&, const std::string& v) { c.loss.kl_direction = ParseKlDirection(v); }},
      {"stats_scope", [](RunConfig& c, const std::string&, const std::string& v) { c.loss.stats_scope = ParseStatsScope(v); }},
      {"loss",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "sednet") {
           c.loss.use_kl = true;
         } else if (v == "log_only") {
           c.loss.use_kl = false;
         } else {
           throw std::invalid_argument("config key '" + k + "': unknown loss '" + v + "'");
         }
       }},
      {"coefficients",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.loss.coefficients.clear();
         for (const std::string& item : SplitList(v)) c.loss.coefficients.push_back(ParseDouble(k, item));
       }},
      {"inlier", [](RunConfig& c, const std::string&, const std::string& v) { c.inliers.kind = ParseInlierKind(v); }},
      {"inlier_threshold", [](RunConfig& c, const std::string& k, const std::string& v) { c.inliers.fixed_threshold = ParseDouble(k, v); }},
      {"inlier_k", [](RunConfig& c, const std::string& k, const std::string& v) { c.inliers.adaptive_k = ParseDouble(k, v); }},
      {"head_hidden",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.head_hidden.clear();
         for (const std::string& item : SplitList(v)) c.head_hidden.push_back(ParseUnsigned(k, item));
       }},
      {"allow_nonstandard_head", [](RunConfig& c, const std::string& k, const std::string& v) { c.allow_nonstandard_head = ParseBool(k, v); }},
      {"learning_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.learning_rate = ParseDouble(k, v); }},
      {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.epochs = ParseUnsigned(k, v); }},
      {"roc_steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.roc_steps = ParseUnsigned(k, v); }},
      {"d1_mode", [](RunConfig& c, const std::string&, const std::string& v) { c.d1_mode = ParseD1Mode(v); }},
  };
  return setters;
}

std::string JoinNumbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + FormatNumber(v[i]);
  return out;
}

}  // namespace

std::vector<std::size_t> RunConfig::HeadLayerSizes() const {
  const std::size_t levels = loss.coefficients.size();
  std::vector<std::size_t> sizes{levels * (levels - 1) / 2};
  sizes.insert(sizes.end(), head_hidden.begin(), head_hidden.end());
  sizes.push_back(levels);
  return sizes;
}

void RunConfig::Validate() const {
  loss.Validate();
  inliers.Validate();
  if (loss.coefficients.size() < 2) throw std::invalid_argument("need at least 2 resolution levels");
  if (source == DataSource::kStereo && loss.coefficients.size() != kPyramidLevels) {
    throw std::invalid_argument("the stereo source produces exactly 4 levels");
  }
  if (width < 32 || height < 32) throw std::invalid_argument("width and height must be >= 32");
  if (!(d_max >= 1.0)) throw std::invalid_argument("d_max must be at least 1");
  if (!(noise_scale_min > 0.0) || !(noise_scale_max >= noise_scale_min)) {
    throw std::invalid_argument("noise scale range must satisfy 0 < min <= max");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (roc_steps < 2) throw std::invalid_argument("roc_steps must be at least 2");
  for (std::size_t h : head_hidden) {
    if (h == 0) throw std::invalid_argument("head hidden widths must be positive");
  }
  if (!allow_nonstandard_head) {
    UncertaintyHead probe(HeadLayerSizes());
    if (probe.param_count() != kDefaultParamCount) {
      throw std::invalid_argument("head has " + std::to_string(probe.param_count()) +
                                  " parameters instead of 190; set allow_nonstandard_head = true");
    }
  }
}

RunConfig ParseRunConfig(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    const auto it = Setters().find(key);
    if (it == Setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(cfg, key, value);
  }
  cfg.Validate();
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) { return ParseRunConfig(ReadFile(path)); }

std::string FormatRunConfig(const RunConfig& c) {
  std::ostringstream os;
  std::string hidden;
  for (std::size_t i = 0; i < c.head_hidden.size(); ++i) {
    hidden += (i ? "," : "") + std::to_string(c.head_hidden[i]);
  }
  os << "source = " << (c.source == DataSource::kLaplace ? "laplace" : "stereo") << "\n"
     << "width = " << c.width << "\n"
     << "height = " << c.height << "\n"
     << "seed = " << c.seed << "\n"
     << "d_max = " << FormatNumber(c.d_max) << "\n"
     << "noise_scale_min = " << FormatNumber(c.noise_scale_min) << "\n"
     << "noise_scale_max = " << FormatNumber(c.noise_scale_max) << "\n"
     << "noise_scale_cell = " << FormatNumber(c.noise_scale_cell) << "\n"
     << "window = " << c.matcher.window << "\n"
     << "temperature = " << FormatNumber(c.matcher.temperature) << "\n"
     << "bin_count = " << c.loss.bin_count << "\n"
     << "scale = " << BinScaleName(c.loss.scale) << "\n"
     << "alpha_max = " << FormatNumber(c.loss.alpha_max) << "\n"
     << "lambda1 = " << FormatNumber(c.loss.lambda1) << "\n"
     << "lambda2 = " << FormatNumber(c.loss.lambda2) << "\n"
     << "kl_direction = " << KlDirectionName(c.loss.kl_direction) << "\n"
     << "stats_scope = " << StatsScopeName(c.loss.stats_scope) << "\n"
     << "loss = " << (c.loss.use_kl ? "sednet" : "log_only") << "\n"
     << "coefficients = " << JoinNumbers(c.loss.coefficients) << "\n"
     << "inlier = " << InlierKindName(c.inliers.kind) << "\n"
     << "inlier_threshold = " << FormatNumber(c.inliers.fixed_threshold) << "\n"
     << "inlier_k = " << FormatNumber(c.inliers.adaptive_k) << "\n"
     << "head_hidden = " << hidden << "\n"
     << "allow_nonstandard_head = " << (c.allow_nonstandard_head ? "true" : "false") << "\n"
     << "learning_rate = " << FormatNumber(c.learning_rate) << "\n"
     << "epochs = " << c.epochs << "\n"
     << "roc_steps = " << c.roc_steps << "\n"
     << "d1_mode = " << D1ModeName(c.d1_mode) << "\n";
  return os.str();
}

}  // namespace sedkit
