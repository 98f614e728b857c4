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

#include "sedkit/io.h"

#include <algorithm>
#include <cctype>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sedkit {

namespace {

constexpr std::size_t kMaxSamples = std::size_t{1} << 31;

template <typename T>
T ByteSwap(T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  std::reverse(bytes, bytes + sizeof(T));
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

template <typename T>
void AppendLittle(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big) v = ByteSwap(v);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittle(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("short read");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  if constexpr (std::endian::native == std::endian::big) v = ByteSwap(v);
  return v;
}

// Reads a whitespace-delimited header token starting at pos.
std::string HeaderToken(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) throw std::runtime_error("truncated header");
  return bytes.substr(start, pos - start);
}

std::size_t ParseDimension(const std::string& token) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v == 0) {
    throw std::runtime_error("bad image dimension '" + token + "'");
  }
  return v;
}

std::size_t CheckedArea(std::size_t a, std::size_t b, std::size_t c) {
  if (a > kMaxSamples / b || a * b > kMaxSamples / c) {
    throw std::runtime_error("image dimensions overflow");
  }
  return a * b * c;
}

}  // namespace

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---- PFM ------------------------------------------------------------------

PfmImage ParsePfm(const std::string& bytes) {
  std::size_t pos = 0;
  const std::string magic = HeaderToken(bytes, pos);
  PfmImage img;
  if (magic == "Pf") {
    img.channels = 1;
  } else if (magic == "PF") {
    img.channels = 3;
  } else {
    throw std::runtime_error("not a PFM file (magic '" + magic.substr(0, 8) + "')");
  }
  img.width = ParseDimension(HeaderToken(bytes, pos));
  img.height = ParseDimension(HeaderToken(bytes, pos));
  const std::string scale_token = HeaderToken(bytes, pos);
  char* end = nullptr;
  img.scale = std::strtod(scale_token.c_str(), &end);
  if (end != scale_token.c_str() + scale_token.size() || img.scale == 0.0 ||
      !std::isfinite(img.scale)) {
    throw std::runtime_error("bad PFM scale '" + scale_token + "'");
  }
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= bytes.size()) throw std::runtime_error("short read: PFM payload missing");
  ++pos;

  const std::size_t n = CheckedArea(img.width, img.height, img.channels);
  if (bytes.size() - pos < n * sizeof(float)) {
    throw std::runtime_error("short read: PFM payload truncated");
  }
  const bool little = img.scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  img.samples.resize(n);
  const std::size_t row = img.width * img.channels;
  for (std::size_t r = 0; r < img.height; ++r) {
    const std::size_t file_row = img.height - 1 - r;
    for (std::size_t c = 0; c < row; ++c) {
      float v;
      std::memcpy(&v, bytes.data() + pos + (file_row * row + c) * sizeof(float), sizeof(float));
      img.samples[r * row + c] = swap ? ByteSwap(v) : v;
    }
  }
  return img;
}

PfmImage ReadPfm(const std::string& path) { return ParsePfm(ReadFile(path)); }

std::string EncodePfm(const PfmImage& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw std::invalid_argument("PFM supports 1 or 3 channels");
  }
  if (image.samples.size() != CheckedArea(image.width, image.height, image.channels)) {
    throw std::invalid_argument("PFM sample count does not match dimensions");
  }
  if (image.scale == 0.0 || !std::isfinite(image.scale)) {
    throw std::invalid_argument("PFM scale must be finite and non-zero");
  }
  std::string out = image.channels == 1 ? "Pf\n" : "PF\n";
  out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n";
  out += FormatNumber(image.scale) + "\n";
  const bool little = image.scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  const std::size_t row = image.width * image.channels;
  for (std::size_t r = image.height; r-- > 0;) {
    for (std::size_t c = 0; c < row; ++c) {
      float v = image.samples[r * row + c];
      if (swap) v = ByteSwap(v);
      char b[sizeof(float)];
      std::memcpy(b, &v, sizeof(float));
      out.append(b, sizeof(float));
    }
  }
  return out;
}

void WritePfm(const std::string& path, const PfmImage& image) {
  WriteFile(path, EncodePfm(image));
}

Tensor PfmToTensor(const PfmImage& image) {
  if (image.channels != 1) throw std::invalid_argument("expected a single-channel PFM");
  std::vector<double> v(image.samples.begin(), image.samples.end());
  return Tensor(Shape{image.height, image.width}, std::move(v));
}

PfmImage TensorToPfm(const Tensor& map) {
  if (map.rank() != 2) throw std::invalid_argument("PFM export needs a [height, width] map");
  PfmImage img;
  img.height = map.shape()[0];
  img.width = map.shape()[1];
  img.samples.reserve(map.size());
  for (double v : map.values()) img.samples.push_back(static_cast<float>(v));
  return img;
}

// ---- PGM ------------------------------------------------------------------

void WritePgm(const std::string& path, const Tensor& image) {
  if (image.rank() != 2) throw std::invalid_argument("PGM export needs a [height, width] image");
  std::string out = "P5\n" + std::to_string(image.shape()[1]) + " " +
                    std::to_string(image.shape()[0]) + "\n255\n";
  for (double v : image.values()) {
    const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(q)));
  }
  WriteFile(path, out);
}

Tensor ReadPgm(const std::string& path) {
  const std::string bytes = ReadFile(path);
  std::size_t pos = 0;
  if (HeaderToken(bytes, pos) != "P5") throw std::runtime_error("not a binary PGM file");
  const std::size_t width = ParseDimension(HeaderToken(bytes, pos));
  const std::size_t height = ParseDimension(HeaderToken(bytes, pos));
  if (HeaderToken(bytes, pos) != "255") throw std::runtime_error("only maxval 255 PGM supported");
  ++pos;
  const std::size_t n = CheckedArea(width, height, 1);
  if (pos > bytes.size() || bytes.size() - pos < n) throw std::runtime_error("short read: PGM");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
  }
  return Tensor(Shape{height, width}, std::move(v));
}

// ---- CSV ------------------------------------------------------------------

std::string FormatNumber(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

namespace {

std::string Quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  AddRow(header);
}

void CsvWriter::AddRow(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("csv row has the wrong column count");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += Quote(cells[i]);
  }
  text_ += '\n';
}

std::string HistogramCsv(const Histogram& histogram) {
  CsvWriter csv({"bin_index", "center", "mass"});
  for (std::size_t j = 0; j < histogram.spec.bin_count(); ++j) {
    csv.AddRow({std::to_string(j), FormatNumber(histogram.spec.center(j)),
                FormatNumber(histogram.mass[j])});
  }
  return csv.text();
}

std::string RocCsv(const RocCurve& roc) {
  CsvWriter csv({"density", "mean_epe"});
  for (const RocPoint& p : roc.points) csv.AddRow({FormatNumber(p.density), FormatNumber(p.mean_epe)});
  return csv.text();
}

std::string ReportCsv(const EvalReport& r) {
  CsvWriter csv({"epe", "d1", "ape_avg", "ape_median", "auc_opt", "auc_est", "auc_opt_x100",
                 "auc_est_x100", "n_valid"});
  csv.AddRow({FormatNumber(r.epe), FormatNumber(r.d1), FormatNumber(r.ape_avg),
              FormatNumber(r.ape_median), FormatNumber(r.auc_optimal),
              FormatNumber(r.auc_estimated), FormatNumber(100.0 * r.auc_optimal),
              FormatNumber(100.0 * r.auc_estimated), std::to_string(r.n_valid)});
  return csv.text();
}

CsvWriter DiagnosticsCsv() { return CsvWriter({"step", "level", "L_log", "L_div", "pct", "mu", "b"}); }

void AddDiagnostics(CsvWriter& csv, std::size_t step, const std::vector<LevelDiagnostics>& levels) {
  for (const LevelDiagnostics& d : levels) {
    csv.AddRow({std::to_string(step), std::to_string(d.level), FormatNumber(d.l_log),
                FormatNumber(d.l_div), FormatNumber(d.pct), FormatNumber(d.mu),
                FormatNumber(d.b)});
  }
}

// ---- Head weights ---------------------------------------------------------

std::string EncodeHead(const UncertaintyHead& head) {
  std::string out(kHeadMagic, sizeof(kHeadMagic));
  AppendLittle<std::uint32_t>(out, static_cast<std::uint32_t>(head.layer_sizes().size()));
  for (std::size_t s : head.layer_sizes()) AppendLittle<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  for (double p : head.Flatten()) AppendLittle<double>(out, p);
  return out;
}

UncertaintyHead DecodeHead(const std::string& bytes) {
  if (bytes.size() < sizeof(kHeadMagic) ||
      std::memcmp(bytes.data(), kHeadMagic, sizeof(kHeadMagic)) != 0) {
    throw std::runtime_error("not a head weight file");
  }
  std::size_t pos = sizeof(kHeadMagic);
  const auto count = ReadLittle<std::uint32_t>(bytes, pos);
  if (count < 2 || count > 64) throw std::runtime_error("bad layer count in head file");
  std::vector<std::size_t> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = ReadLittle<std::uint32_t>(bytes, pos);
    if (s == 0 || s > 4096) throw std::runtime_error("bad layer size in head file");
    sizes.push_back(s);
  }
  UncertaintyHead head(sizes);
  std::vector<double> params(head.param_count());
  for (double& p : params) p = ReadLittle<double>(bytes, pos);
  if (pos != bytes.size()) throw std::runtime_error("trailing bytes in head file");
  head.Assign(params);
  return head;
}

void SaveHead(const std::string& path, const UncertaintyHead& head) {
  WriteFile(path, EncodeHead(head));
}

UncertaintyHead LoadHead(const std::string& path) { return DecodeHead(ReadFile(path)); }

}  // namespace sedkit
