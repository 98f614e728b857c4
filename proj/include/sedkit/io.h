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

// File formats: PFM disparity maps, binary PGM images, CSV tables and the
// uncertainty-head weight file.

#ifndef SEDKIT_IO_H_
#define SEDKIT_IO_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sedkit/head.h"
#include "sedkit/hist.h"
#include "sedkit/loss.h"
#include "sedkit/metrics.h"
#include "sedkit/tensor.h"

namespace sedkit {

// Samples are held top row first; files store rows bottom-up.
struct PfmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  double scale = -1.0;  // |scale| is preserved; sign selects byte order
  std::vector<float> samples;  // row-major, interleaved channels
};

PfmImage ReadPfm(const std::string& path);
PfmImage ParsePfm(const std::string& bytes);
void WritePfm(const std::string& path, const PfmImage& image);
std::string EncodePfm(const PfmImage& image);

// Single-channel helpers. Values pass through float32.
Tensor PfmToTensor(const PfmImage& image);
PfmImage TensorToPfm(const Tensor& map);

// Binary P5, maxval 255. Writing clamps to [0, 1] and scales by 255.
void WritePgm(const std::string& path, const Tensor& image);
// Returns values in [0, 1].
Tensor ReadPgm(const std::string& path);

// Shortest round-trip decimal representation.
std::string FormatNumber(double v);

// Minimal RFC-4180 writer: header row, comma separator, CRLF-free "\n" lines.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void AddRow(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string HistogramCsv(const Histogram& histogram);
std::string RocCsv(const RocCurve& roc);
// Column order: epe, d1, ape avg/median, auc optimal/estimated, then
// the x100 auc variants and the valid-pixel count.
std::string ReportCsv(const EvalReport& report);

// step,level,L_log,L_div,pct,mu,b
CsvWriter DiagnosticsCsv();
void AddDiagnostics(CsvWriter& csv, std::size_t step, const std::vector<LevelDiagnostics>& levels);

// Weight file: 8-byte magic "SEDKHD01", uint32 LE layer-size count L, L uint32
// LE layer sizes, then float64 LE parameters in UncertaintyHead::Flatten()
// order.
inline constexpr char kHeadMagic[8] = {'S', 'E', 'D', 'K', 'H', 'D', '0', '1'};
std::string EncodeHead(const UncertaintyHead& head);
UncertaintyHead DecodeHead(const std::string& bytes);
void SaveHead(const std::string& path, const UncertaintyHead& head);
UncertaintyHead LoadHead(const std::string& path);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& bytes);

}  // namespace sedkit

#endif  // SEDKIT_IO_H_
