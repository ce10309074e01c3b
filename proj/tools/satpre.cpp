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

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "satpre/calibration.h"
#include "satpre/denoise.h"
#include "satpre/error.h"
#include "satpre/media_io.h"
#include "satpre/parallel.h"
#include "satpre/pipeline.h"

namespace {

using namespace satpre;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitEncoderError = 3;

struct InputFlags {
  std::string path;
  bool raw = false;
  int width = 0;
  int height = 0;
  std::string fps = "30:1";
  bool mono = false;
};

void add_input_flags(CLI::App* cmd, InputFlags* in) {
  cmd->add_option("--input", in->path, "Input video (Y4M, or raw planar with --raw)")
      ->required();
  cmd->add_flag("--raw", in->raw, "Treat inputs as headerless planar frames");
  cmd->add_option("--width", in->width, "Frame width for --raw inputs");
  cmd->add_option("--height", in->height, "Frame height for --raw inputs");
  cmd->add_option("--fps", in->fps, "Frame rate for --raw inputs, N or N:D");
  cmd->add_flag("--mono", in->mono, "Raw input is luma-only (4:0:0) instead of I420");
}

FrameRate parse_fps(const std::string& text) {
  FrameRate fr;
  size_t colon = text.find(':');
  try {
    fr.num = std::stoi(text.substr(0, colon));
    fr.den = colon == std::string::npos ? 1 : std::stoi(text.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw ConfigError("bad --fps value '" + text + "'");
  }
  if (fr.num <= 0 || fr.den <= 0) {
    throw ConfigError("bad --fps value '" + text + "'");
  }
  return fr;
}

VideoSequence load_sequence(const InputFlags& in) {
  std::vector<uint8_t> bytes = read_file_bytes(in.path);
  if (!in.raw) {
    return parse_y4m(bytes);
  }
  if (in.width <= 0 || in.height <= 0) {
    throw ConfigError("--raw requires --width and --height");
  }
  std::string warning;
  VideoSequence seq = read_raw_planar(
      bytes, in.width, in.height,
      in.mono ? Subsampling::k400 : Subsampling::k420, parse_fps(in.fps), &warning);
  if (!warning.empty()) {
    std::cerr << in.path << ": " << warning << "\n";
  }
  return seq;
}

// Second sequence sharing the primary input's format flags.
VideoSequence load_companion(const InputFlags& in, const std::string& path) {
  InputFlags companion = in;
  companion.path = path;
  return load_sequence(companion);
}

struct DetectionFlags {
  std::string denoised;
  std::string denoiser;
  std::string method = "rdsd";
  std::optional<int> user_qp;
  std::string calibration;
  int gop = 30;
  std::optional<int> gop_offset;
  std::string entropy = "exp-golomb";
  std::vector<int> c_set{kDefaultSlopeOffset};
  double r = kDefaultLambdaScale;
  int qp_min = 0;
  int qp_max = 51;
  int threads = 0;
};

void add_reference_flags(CLI::App* cmd, DetectionFlags* df) {
  cmd->add_option("--denoised", df->denoised,
                  "Externally denoised sequence (same format as --input)");
  cmd->add_option("--denoiser", df->denoiser,
                  "Built-in denoiser: gaussian:<sigma> or deblock:<strength>");
}

void add_grid_flags(CLI::App* cmd, DetectionFlags* df) {
  cmd->add_option("--gop", df->gop, "GOP length in frames")
      ->capture_default_str();
  cmd->add_option("--gop-offset", df->gop_offset,
                  "Sampled frame offset within each GOP (default: middle)");
  cmd->add_option("--entropy", df->entropy, "Rate model: exp-golomb or cavlc")
      ->capture_default_str();
  cmd->add_option("--qp-min", df->qp_min, "Smallest grid QP")->capture_default_str();
  cmd->add_option("--qp-max", df->qp_max, "Largest grid QP")->capture_default_str();
  cmd->add_option("--threads", df->threads,
                  "Worker threads, 0 = auto (env SATPRE_THREADS as fallback)")
      ->capture_default_str();
}

int env_threads_fallback() {
  const char* env = std::getenv("SATPRE_THREADS");
  if (env == nullptr) return 0;
  try {
    return std::stoi(env);
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("bad SATPRE_THREADS value '") + env + "'");
  }
}

EntropyModel parse_entropy(const std::string& name) {
  if (name == "exp-golomb") return EntropyModel::kRunLevelExpGolomb;
  if (name == "cavlc") return EntropyModel::kCavlcStyle;
  throw ConfigError("unknown --entropy '" + name + "' (exp-golomb or cavlc)");
}

DetectionConfig build_config(const DetectionFlags& df, bool threads_given) {
  DetectionConfig config;
  if (df.method == "dsd") {
    config.method = DetectionMethod::kDsd;
  } else if (df.method == "rdsd") {
    config.method = DetectionMethod::kRdsd;
  } else {
    throw ConfigError("unknown --method '" + df.method + "' (dsd or rdsd)");
  }
  config.grid = QpGrid(df.qp_min, df.qp_max);
  config.gop.gop_length = df.gop;
  config.gop.sampled_frame_offset = df.gop_offset;
  if (!df.denoiser.empty()) config.denoiser = DenoiserSpec::parse(df.denoiser);
  config.slope_offsets = df.c_set;
  config.lambda_scale = df.r;
  config.entropy = parse_entropy(df.entropy);
  config.user_qp = df.user_qp;
  config.threads = threads_given ? df.threads : env_threads_fallback();
  if (!df.calibration.empty()) {
    std::vector<uint8_t> bytes = read_file_bytes(df.calibration);
    config.calibration = parse_table(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return config;
}

void require_one_reference(const DetectionFlags& df) {
  if (df.denoised.empty() && df.denoiser.empty()) {
    throw ConfigError("need a denoised reference: pass --denoised or --denoiser");
  }
  if (!df.denoised.empty() && !df.denoiser.empty()) {
    throw ConfigError("--denoised and --denoiser are mutually exclusive");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  write_file_bytes(path,
                   std::span<const uint8_t>(
                       reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

std::string read_text_file(const std::string& path) {
  std::vector<uint8_t> bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

int run_detect(const InputFlags& in, const DetectionFlags& df,
               const std::string& report_path, bool threads_given) {
  require_one_reference(df);
  DetectionConfig config = build_config(df, threads_given);
  VideoSequence u = load_sequence(in);
  std::optional<VideoSequence> z;
  if (!df.denoised.empty()) z = load_companion(in, df.denoised);

  std::vector<GopDecision> decisions = detect(u, z ? &*z : nullptr, config);
  for (const GopDecision& d : decisions) {
    std::cout << decision_summary_line(d) << "\n";
  }
  if (!report_path.empty()) {
    write_text_file(report_path, format_decisions_csv(decisions));
  }
  return kExitOk;
}

int run_curves(const InputFlags& in, const DetectionFlags& df,
               const std::string& out_path, bool threads_given) {
  require_one_reference(df);
  DetectionConfig config = build_config(df, threads_given);
  VideoSequence u = load_sequence(in);
  std::optional<VideoSequence> z;
  if (!df.denoised.empty()) z = load_companion(in, df.denoised);

  std::vector<CurveReportRow> rows = emit_rd_report(u, z ? &*z : nullptr, config);
  for (const CurveReportRow& row : rows) {
    std::cout << "qp=" << row.qp << " rate_bits=" << row.rate_bits << "\n";
  }
  write_text_file(out_path, format_curves_csv(rows));
  return kExitOk;
}

int run_calibrate(const std::string& source_path, const std::string& target_path,
                  const std::string& out_path, int slope_offset, int min_support) {
  std::vector<RdRecord> source = parse_rd_csv(read_text_file(source_path));
  std::vector<RdRecord> target = parse_rd_csv(read_text_file(target_path));
  CalibrationReport report;
  CalibrationTable table =
      calibrate(source, target, slope_offset, min_support, &report);
  write_text_file(out_path, format_table(table));
  std::cout << "calibrated " << table.codec_s() << " -> " << table.codec_t() << ": "
            << table.entries().size() << " entries from " << report.blocks
            << " blocks";
  if (!report.skipped_qps.empty()) {
    std::cout << " (" << report.skipped_qps.size() << " qps below support)";
  }
  std::cout << "\n";
  return kExitOk;
}

int execute_plan(const std::vector<std::string>& commands, int jobs) {
  if (jobs <= 1) {
    for (size_t i = 0; i < commands.size(); ++i) {
      int rc = std::system(commands[i].c_str());
      if (rc != 0) {
        throw EncoderError("external encoder failed for gop " + std::to_string(i),
                           static_cast<int>(i));
      }
    }
    return kExitOk;
  }
  std::mutex mutex;
  int first_failed = -1;
  parallel_for(0, static_cast<int>(commands.size()), jobs, [&](int i) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (first_failed >= 0 && first_failed < i) return;  // stop past a failure
    }
    int rc = std::system(commands[i].c_str());
    if (rc != 0) {
      std::lock_guard<std::mutex> lock(mutex);
      if (first_failed < 0 || i < first_failed) first_failed = i;
    }
  });
  if (first_failed >= 0) {
    throw EncoderError(
        "external encoder failed for gop " + std::to_string(first_failed),
        first_failed);
  }
  return kExitOk;
}

int run_wrap(const std::string& decisions_path, const std::string& tmpl,
             const InvocationContext& context, bool run, int jobs) {
  std::vector<GopDecision> decisions =
      parse_decisions_csv(read_text_file(decisions_path));
  std::vector<std::string> commands =
      encoder_invocation_plan(decisions, tmpl, context);
  for (const std::string& cmd : commands) {
    std::cout << cmd << "\n";
  }
  if (run) {
    return execute_plan(commands, jobs);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satpre: pre-encoding distortion-saturation analysis for UGC video"};
  app.require_subcommand(1);

  InputFlags detect_in, curves_in;
  DetectionFlags detect_df, curves_df;
  std::string report_path, curves_out;

  CLI::App* detect_cmd = app.add_subcommand(
      "detect", "Per-GOP saturation QP detection (DSD or RDSD)");
  add_input_flags(detect_cmd, &detect_in);
  add_reference_flags(detect_cmd, &detect_df);
  detect_cmd->add_option("--method", detect_df.method, "Detector: dsd or rdsd")
      ->capture_default_str();
  detect_cmd->add_option("--user-qp", detect_df.user_qp,
                         "Target QP to clamp against (within the grid)");
  detect_cmd->add_option("--calibration", detect_df.calibration,
                         "Calibration table file (default: built-in table)");
  detect_cmd->add_option("--c-set", detect_df.c_set,
                         "Slope offsets for RDSD (repeatable)")
      ->delimiter(',')
      ->capture_default_str();
  detect_cmd->add_option("--r", detect_df.r, "Lambda scale factor")
      ->capture_default_str();
  add_grid_flags(detect_cmd, &detect_df);
  detect_cmd->add_option("--report", report_path, "Write decisions CSV here");

  CLI::App* curves_cmd = app.add_subcommand(
      "curves", "Rate and I/D/ID-MSE saturation curves over the QP grid");
  add_input_flags(curves_cmd, &curves_in);
  add_reference_flags(curves_cmd, &curves_df);
  add_grid_flags(curves_cmd, &curves_df);
  curves_cmd->add_option("--out", curves_out, "Write curves CSV here")->required();

  std::string source_rd, target_rd, table_out;
  int cal_c = kDefaultSlopeOffset;
  int cal_support = 30;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate", "Build a lambda calibration table from two RD corpora");
  cal_cmd->add_option("--source-rd", source_rd, "Source-codec corpus CSV")
      ->required();
  cal_cmd->add_option("--target-rd", target_rd, "Target-codec corpus CSV")
      ->required();
  cal_cmd->add_option("--out", table_out, "Write calibration table here")
      ->required();
  cal_cmd->add_option("--c", cal_c, "Slope offset")->capture_default_str();
  cal_cmd->add_option("--min-support", cal_support,
                      "Minimum blocks per qp entry")
      ->capture_default_str();

  std::string decisions_path, wrap_template;
  InvocationContext context;
  context.output_pattern = "gop{gop}.out";
  bool wrap_run = false;
  int wrap_jobs = 1;
  std::optional<int> wrap_frames;
  CLI::App* wrap_cmd = app.add_subcommand(
      "wrap", "Expand an encoder command template per GOP decision");
  wrap_cmd->add_option("--decisions", decisions_path, "Decisions CSV from detect")
      ->required();
  wrap_cmd
      ->add_option("--template", wrap_template,
                   "Command template with {input} {output} {qp} {gop} "
                   "{gop_start} {gop_len}")
      ->required();
  wrap_cmd->add_option("--input", context.input, "Value for {input}");
  wrap_cmd->add_option("--output", context.output_pattern,
                       "Pattern for {output}; may use {gop} and {qp}")
      ->capture_default_str();
  wrap_cmd->add_option("--gop", context.gop_length, "GOP length in frames")
      ->capture_default_str();
  wrap_cmd->add_option("--frames", wrap_frames,
                       "Total frame count (bounds the last {gop_len})");
  wrap_cmd->add_flag("--run", wrap_run, "Execute the commands");
  wrap_cmd->add_option("--run-jobs", wrap_jobs,
                       "Parallel encoder invocations with --run")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (detect_cmd->parsed()) {
      return run_detect(detect_in, detect_df, report_path,
                        detect_cmd->count("--threads") > 0);
    }
    if (curves_cmd->parsed()) {
      return run_curves(curves_in, curves_df, curves_out,
                        curves_cmd->count("--threads") > 0);
    }
    if (cal_cmd->parsed()) {
      return run_calibrate(source_rd, target_rd, table_out, cal_c, cal_support);
    }
    if (wrap_cmd->parsed()) {
      context.total_frames = wrap_frames;
      return run_wrap(decisions_path, wrap_template, context, wrap_run, wrap_jobs);
    }
  } catch (const EncoderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEncoderError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitConfigError;
}
