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

#include "satpre/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "satpre/dsd.h"
#include "satpre/error.h"
#include "satpre/parallel.h"

namespace satpre {

namespace {

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void validate_config(const DetectionConfig& config) {
  if (config.user_qp && !config.grid.contains(*config.user_qp)) {
    throw ConfigError("user qp " + std::to_string(*config.user_qp) +
                      " outside configured grid");
  }
  if (!(config.lambda_scale > 0.0)) {
    throw ConfigError("lambda scale r must be positive");
  }
  for (int c : config.slope_offsets) {
    if (c <= 0) {
      throw ConfigError("slope offsets must be positive, got " + std::to_string(c));
    }
  }
}

void validate_denoised_geometry(const VideoSequence& u, const VideoSequence& z) {
  if (u.width != z.width || u.height != z.height ||
      u.frame_count() != z.frame_count()) {
    throw InputError(
        "denoised sequence geometry mismatch: input " + std::to_string(u.width) +
        "x" + std::to_string(u.height) + "@" + std::to_string(u.frame_count()) +
        " frames, denoised " + std::to_string(z.width) + "x" +
        std::to_string(z.height) + "@" + std::to_string(z.frame_count()) +
        " frames");
  }
}

LumaPlane reference_plane(const VideoSequence* z, const LumaPlane& u_plane,
                          int frame_index, const DenoiserSpec& denoiser) {
  if (z != nullptr) return z->frames[frame_index];
  if (denoiser.kind == DenoiserSpec::Kind::kExternalFile) {
    throw ConfigError(
        "external-file denoiser selected but no denoised sequence given");
  }
  return denoise_plane(u_plane, denoiser);
}

template <typename Fn>
auto with_block_context(const MacroBlockCoeffs& block, Fn&& fn) {
  auto context = [&](const std::string& what) {
    return what + " (at block " + std::to_string(block.origin_x) + "," +
           std::to_string(block.origin_y) + ")";
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(context(e.what()));
  } catch (const InputError& e) {
    throw InputError(context(e.what()));
  }
}

}  // namespace

int frame_qp_star(std::span<const int> block_qps, const QpGrid& grid) {
  if (block_qps.empty()) {
    throw InputError("frame_qp_star: no block decisions");
  }
  double sum = 0.0;
  for (int qp : block_qps) sum += qp;
  double mean = sum / static_cast<double>(block_qps.size());
  int rounded = static_cast<int>(std::floor(mean + 0.5));
  return grid.snap(rounded);
}

std::vector<GopDecision> detect(const VideoSequence& u, const VideoSequence* z,
                                const DetectionConfig& config) {
  validate_config(config);
  if (z != nullptr) validate_denoised_geometry(u, *z);
  const CalibrationTable& table =
      config.calibration.empty() ? default_table() : config.calibration;

  std::vector<GopSample> samples = sample_gop_frames(u, config.gop);
  if (samples.empty()) {
    throw InputError("detect: input sequence has no frames");
  }
  std::vector<GopDecision> decisions;
  decisions.reserve(samples.size());

  for (const GopSample& sample : samples) {
    const LumaPlane& u_plane = u.frames[sample.frame_index];
    LumaPlane z_plane =
        reference_plane(z, u_plane, sample.frame_index, config.denoiser);

    std::vector<PixelBlock> u_blocks = partition_blocks(u_plane);
    std::vector<PixelBlock> z_blocks = partition_blocks(z_plane);
    int n = static_cast<int>(u_blocks.size());

    std::vector<int> block_qps(n);
    std::vector<uint8_t> fallback(n, 0);
    parallel_for(0, n, config.threads, [&](int i) {
      MacroBlockCoeffs cu = macroblock_coeffs(u_blocks[i]);
      MacroBlockCoeffs cz = macroblock_coeffs(z_blocks[i]);
      with_block_context(cu, [&] {
        if (config.method == DetectionMethod::kDsd) {
          SaturationDecision d = dsd_block_qp(cu, cz, config.grid);
          block_qps[i] = d.saturation_qp;
          fallback[i] = d.degenerate ? 1 : 0;
        } else {
          BlockQpResult r =
              rdsd_block_qp(cu, cz, config.grid, config.slope_offsets, table,
                            config.lambda_scale, config.entropy);
          block_qps[i] = r.qp_star;
          fallback[i] = r.fallback ? 1 : 0;
        }
        return 0;
      });
    });

    GopDecision d;
    d.gop_index = sample.gop_index;
    d.sampled_frame_index = sample.frame_index;
    d.block_count = n;
    d.qp_star = frame_qp_star(block_qps, config.grid);
    d.effective_qp =
        config.user_qp ? std::max(*config.user_qp, d.qp_star) : d.qp_star;
    int degenerate = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      degenerate += fallback[i];
      sum += block_qps[i];
    }
    d.degenerate_fraction = static_cast<double>(degenerate) / n;
    d.qp_mean = sum / n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      double diff = block_qps[i] - d.qp_mean;
      var += diff * diff;
    }
    d.qp_std = std::sqrt(var / n);
    decisions.push_back(d);
  }
  return decisions;
}

std::vector<CurveReportRow> emit_rd_report(const VideoSequence& u,
                                           const VideoSequence* z,
                                           const DetectionConfig& config) {
  validate_config(config);
  if (z != nullptr) validate_denoised_geometry(u, *z);

  std::vector<GopSample> samples = sample_gop_frames(u, config.gop);

  // Transform every sampled-frame block once, then sweep the grid.
  std::vector<MacroBlockCoeffs> cu, cz;
  for (const GopSample& sample : samples) {
    const LumaPlane& u_plane = u.frames[sample.frame_index];
    LumaPlane z_plane =
        reference_plane(z, u_plane, sample.frame_index, config.denoiser);
    std::vector<PixelBlock> u_blocks = partition_blocks(u_plane);
    std::vector<PixelBlock> z_blocks = partition_blocks(z_plane);
    for (size_t i = 0; i < u_blocks.size(); ++i) {
      cu.push_back(macroblock_coeffs(u_blocks[i]));
      cz.push_back(macroblock_coeffs(z_blocks[i]));
    }
  }
  if (cu.empty()) {
    throw InputError("emit_rd_report: no blocks sampled");
  }

  double id_sse = 0.0;
  for (size_t i = 0; i < cu.size(); ++i) {
    for (int k = 0; k < kCoeffsPerMb; ++k) {
      double d = cu[i].coeffs[k] - cz[i].coeffs[k];
      id_sse += d * d;
    }
  }
  double denom = static_cast<double>(cu.size()) * kCoeffsPerMb;

  const std::vector<int>& qps = config.grid.qps();
  std::vector<CurveReportRow> rows(qps.size());
  parallel_for(0, static_cast<int>(qps.size()), config.threads, [&](int qi) {
    CurveReportRow row;
    row.qp = qps[qi];
    for (size_t i = 0; i < cu.size(); ++i) {
      RDPoint p = rd_point(cu[i], cz[i], row.qp, config.grid, config.entropy);
      row.rate_bits += p.rate_bits;
      row.i_mse += p.dist_input;
      row.d_mse += p.dist_denoised;
    }
    row.i_mse /= denom;
    row.d_mse /= denom;
    row.id_mse = id_sse / denom;
    rows[qi] = row;
  });
  return rows;
}

namespace {

std::string expand_template(const std::string& tmpl,
                            const std::vector<std::pair<std::string, std::string>>&
                                substitutions) {
  std::string out;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    char ch = tmpl[pos];
    if (ch != '{') {
      out += ch;
      ++pos;
      continue;
    }
    size_t close = tmpl.find('}', pos);
    if (close == std::string::npos) {
      throw ConfigError("template: unclosed placeholder starting at '" +
                        tmpl.substr(pos) + "'");
    }
    std::string name = tmpl.substr(pos + 1, close - pos - 1);
    bool found = false;
    for (const auto& [key, value] : substitutions) {
      if (key == name) {
        out += value;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("template: unknown placeholder {" + name + "}");
    }
    pos = close + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> encoder_invocation_plan(
    std::span<const GopDecision> decisions, const std::string& command_template,
    const InvocationContext& context) {
  std::vector<std::string> commands;
  commands.reserve(decisions.size());
  for (const GopDecision& d : decisions) {
    int gop_start = d.gop_index * context.gop_length;
    int gop_len = context.gop_length;
    if (context.total_frames) {
      gop_len = std::min(gop_len, *context.total_frames - gop_start);
      if (gop_len <= 0) {
        throw ConfigError("template context: gop " + std::to_string(d.gop_index) +
                          " starts beyond the declared frame count");
      }
    }
    std::string qp = std::to_string(d.effective_qp);
    std::string gop = std::to_string(d.gop_index);
    std::string output = expand_template(
        context.output_pattern, {{"gop", gop}, {"qp", qp}, {"input", context.input}});
    commands.push_back(expand_template(
        command_template, {{"input", context.input},
                           {"output", output},
                           {"qp", qp},
                           {"gop", gop},
                           {"gop_start", std::to_string(gop_start)},
                           {"gop_len", std::to_string(gop_len)}}));
  }
  return commands;
}

std::string format_decisions_csv(std::span<const GopDecision> decisions) {
  std::string out =
      "gop,frame,qp_star,effective_qp,block_count,degenerate_fraction,qp_mean,"
      "qp_std\n";
  for (const GopDecision& d : decisions) {
    out += std::to_string(d.gop_index);
    out += ',';
    out += std::to_string(d.sampled_frame_index);
    out += ',';
    out += std::to_string(d.qp_star);
    out += ',';
    out += std::to_string(d.effective_qp);
    out += ',';
    out += std::to_string(d.block_count);
    out += ',';
    out += format_g6(d.degenerate_fraction);
    out += ',';
    out += format_g6(d.qp_mean);
    out += ',';
    out += format_g6(d.qp_std);
    out += '\n';
  }
  return out;
}

std::vector<GopDecision> parse_decisions_csv(std::string_view text) {
  std::vector<GopDecision> decisions;
  size_t pos = 0;
  size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line !=
          "gop,frame,qp_star,effective_qp,block_count,degenerate_fraction,"
          "qp_mean,qp_std") {
        throw InputError("decisions csv: missing or wrong header line");
      }
      header_seen = true;
      continue;
    }
    GopDecision d;
    int field = 0;
    size_t fpos = 0;
    std::string sline(line);
    while (field < 8) {
      size_t fend = sline.find(',', fpos);
      std::string token = sline.substr(
          fpos, fend == std::string::npos ? std::string::npos : fend - fpos);
      if (token.empty()) {
        throw InputError("decisions csv line " + std::to_string(line_no) +
                         ": empty field " + std::to_string(field + 1));
      }
      try {
        switch (field) {
          case 0: d.gop_index = std::stoi(token); break;
          case 1: d.sampled_frame_index = std::stoi(token); break;
          case 2: d.qp_star = std::stoi(token); break;
          case 3: d.effective_qp = std::stoi(token); break;
          case 4: d.block_count = std::stoi(token); break;
          case 5: d.degenerate_fraction = std::stod(token); break;
          case 6: d.qp_mean = std::stod(token); break;
          case 7: d.qp_std = std::stod(token); break;
        }
      } catch (const std::logic_error&) {
        throw InputError("decisions csv line " + std::to_string(line_no) +
                         ": bad value '" + token + "'");
      }
      ++field;
      if (fend == std::string::npos) break;
      fpos = fend + 1;
    }
    if (field != 8) {
      throw InputError("decisions csv line " + std::to_string(line_no) +
                       ": expected 8 fields");
    }
    decisions.push_back(d);
  }
  if (!header_seen) {
    throw InputError("decisions csv: empty input");
  }
  return decisions;
}

std::string format_curves_csv(std::span<const CurveReportRow> rows) {
  std::string out = "qp,rate_bits,i_mse,d_mse,id_mse\n";
  for (const CurveReportRow& row : rows) {
    out += std::to_string(row.qp);
    out += ',';
    out += std::to_string(row.rate_bits);
    out += ',';
    out += format_g6(row.i_mse);
    out += ',';
    out += format_g6(row.d_mse);
    out += ',';
    out += format_g6(row.id_mse);
    out += '\n';
  }
  return out;
}

std::string decision_summary_line(const GopDecision& d) {
  return "gop=" + std::to_string(d.gop_index) +
         " frame=" + std::to_string(d.sampled_frame_index) +
         " blocks=" + std::to_string(d.block_count) +
         " degenerate_fraction=" + format_g6(d.degenerate_fraction) +
         " qp_star=" + std::to_string(d.qp_star) +
         " effective_qp=" + std::to_string(d.effective_qp);
}

}  // namespace satpre
