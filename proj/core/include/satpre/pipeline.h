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

#ifndef SATPRE_PIPELINE_H_
#define SATPRE_PIPELINE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satpre/calibration.h"
#include "satpre/denoise.h"
#include "satpre/lcc.h"
#include "satpre/media_io.h"
#include "satpre/rdsd.h"
#include "satpre/transform.h"

namespace satpre {

enum class DetectionMethod { kDsd, kRdsd };

struct DetectionConfig {
  DetectionMethod method = DetectionMethod::kRdsd;
  QpGrid grid;             // default 0..51
  GopIndexing gop;         // default length 30, middle frame
  DenoiserSpec denoiser;   // used when no denoised sequence is supplied
  std::vector<int> slope_offsets{kDefaultSlopeOffset};
  double lambda_scale = kDefaultLambdaScale;
  CalibrationTable calibration;  // empty -> default_table()
  EntropyModel entropy = EntropyModel::kRunLevelExpGolomb;
  std::optional<int> user_qp;    // must lie within grid when set
  int threads = 1;               // 0 = auto
};

struct GopDecision {
  int gop_index = 0;
  int sampled_frame_index = 0;
  int qp_star = 0;
  int effective_qp = 0;
  int block_count = 0;
  // Fraction of blocks whose decision fell back to the grid minimum /
  // criterion value (degenerate DSD, or RDSD without a usable slope).
  double degenerate_fraction = 0.0;
  double qp_mean = 0.0;
  double qp_std = 0.0;  // population standard deviation
};

// Mean of the per-block QPs, rounded half up, snapped onto the grid.
int frame_qp_star(std::span<const int> block_qps, const QpGrid& grid);

// Runs detection over every GOP's sampled frame. `z` supplies the
// denoised reference; pass nullptr to run config.denoiser on each
// sampled frame instead. Decisions come back in GOP order and are
// identical for any thread count.
std::vector<GopDecision> detect(const VideoSequence& u, const VideoSequence* z,
                                const DetectionConfig& config);

// One row of the saturation-curve report. The three distortions are
// mean squared errors per coefficient over all sampled-frame blocks:
// reconstruction vs input (i_mse), reconstruction vs denoised (d_mse),
// and input vs denoised (id_mse, QP-independent floor).
struct CurveReportRow {
  int qp = 0;
  int64_t rate_bits = 0;
  double i_mse = 0.0;
  double d_mse = 0.0;
  double id_mse = 0.0;
};

std::vector<CurveReportRow> emit_rd_report(const VideoSequence& u,
                                           const VideoSequence* z,
                                           const DetectionConfig& config);

// Inputs the command templates draw substitution values from.
struct InvocationContext {
  std::string input;
  std::string output_pattern;         // may use {gop} and {qp}
  int gop_length = 30;
  std::optional<int> total_frames;    // bounds the last {gop_len}
};

// Expands the template once per GOP decision. Placeholders: {input},
// {output}, {qp}, {gop}, {gop_start}, {gop_len}. Unknown or unclosed
// placeholders raise ConfigError naming the offender. Nothing is
// executed here.
std::vector<std::string> encoder_invocation_plan(
    std::span<const GopDecision> decisions, const std::string& command_template,
    const InvocationContext& context);

// Report formats. Floats carry 6 significant digits; both are
// byte-stable for identical inputs.
std::string format_decisions_csv(std::span<const GopDecision> decisions);
std::vector<GopDecision> parse_decisions_csv(std::string_view text);
std::string format_curves_csv(std::span<const CurveReportRow> rows);

// Stable one-line stdout summary for a GOP decision.
std::string decision_summary_line(const GopDecision& decision);

}  // namespace satpre

#endif  // SATPRE_PIPELINE_H_
