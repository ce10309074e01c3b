// Copyright (c) the satpre authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SATPRE_CALIBRATION_H_
#define SATPRE_CALIBRATION_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satpre {

// Per-QP multiplier taking a lambda measured under the analysis codec
// model to the target codec. Lookups snap to the nearest stored QP.
class CalibrationTable {
 public:
  CalibrationTable() = default;
  CalibrationTable(std::map<int, double> entries, std::string codec_s,
                   std::string codec_t);

  // Constant ratio 1.0 at every QP.
  static CalibrationTable identity();

  double ratio_at(int qp) const;  // throws ConfigError when empty
  bool empty() const { return entries_.empty(); }
  const std::map<int, double>& entries() const { return entries_; }
  const std::string& codec_s() const { return codec_s_; }
  const std::string& codec_t() const { return codec_t_; }

 private:
  std::map<int, double> entries_;
  std::string codec_s_;
  std::string codec_t_;
};

// Table shipped with the tool: 1.0 through QP 12, then a measured
// cross-model curve (see default_table() notes in the implementation).
CalibrationTable default_table();

// One row of a calibration corpus: a block's rate/distortion sample
// under one codec model at one QP.
struct RdRecord {
  std::string block_id;
  std::string codec_id;
  int qp = 0;
  double step = 0.0;
  int64_t rate_bits = 0;
  double distortion = 0.0;
};

// Corpus CSV: header `block_id,codec_id,qp,step,rate_bits,distortion`,
// then one record per line. parse errors carry the 1-based line number.
std::string format_rd_csv(std::span<const RdRecord> records);
std::vector<RdRecord> parse_rd_csv(std::string_view text);

// Table text: header `satcal v1 <codec_s> <codec_t>`, then `qp,ratio`
// lines ascending. Byte-stable for identical inputs.
std::string format_table(const CalibrationTable& table);
CalibrationTable parse_table(std::string_view text);

struct CalibrationReport {
  std::vector<int> skipped_qps;  // support below threshold
  int blocks = 0;
};

// Builds a table from matched per-block RD curves of two codecs. For
// every QP where qp and qp + slope_offset exist in both curves of a
// block and both slopes are positive, contributes the slope ratio;
// entries are the per-QP medians over blocks with enough support.
CalibrationTable calibrate(std::span<const RdRecord> source,
                           std::span<const RdRecord> target,
                           int slope_offset = 5, int min_support = 30,
                           CalibrationReport* report = nullptr);

}  // namespace satpre

#endif  // SATPRE_CALIBRATION_H_
