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

// Release gate. Each check prints one [PASS]/[FAIL] line; run with a
// 1-based index argument to execute a single check, or with no
// arguments for the full battery. Exit status 0 iff everything passed.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "satpre/calibration.h"
#include "satpre/denoise.h"
#include "satpre/dsd.h"
#include "satpre/lcc.h"
#include "satpre/media_io.h"
#include "satpre/pipeline.h"
#include "satpre/rdsd.h"
#include "satpre/transform.h"
#include "testutil.h"

namespace {

using namespace satpre;
using satpre_test::Rng;

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. Round trip and energy conservation of the 4x4 transform.
bool check_transform(std::string& detail) {
  Rng rng(1001);
  std::uniform_real_distribution<double> ud(-255.0, 255.0);
  double worst_rt = 0.0, worst_energy = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    Block4 x;
    double energy_in = 0.0;
    for (double& v : x) {
      v = ud(rng);
      energy_in += v * v;
    }
    Coeff4x4 c = forward_dct4(x);
    Block4 back = inverse_dct4(c);
    double err = 0.0, energy_out = 0.0;
    for (int i = 0; i < 16; ++i) {
      err += (back[i] - x[i]) * (back[i] - x[i]);
      energy_out += c.c[i] * c.c[i];
    }
    worst_rt = std::max(worst_rt, std::sqrt(err / energy_in));
    worst_energy =
        std::max(worst_energy, std::abs(energy_out - energy_in) / energy_in);
  }
  detail = fmt("max relative round-trip %.3g, max energy drift %.3g", worst_rt,
               worst_energy);
  return worst_rt <= 1e-9 && worst_energy <= 1e-9;
}

// 2. Step and lambda maps at the reference points; lambda inverse.
bool check_mappings(std::string& detail) {
  const int probes[] = {4, 10, 12, 18, 22, 30};
  for (int qp : probes) {
    if (qp_to_step(qp) != std::exp2((qp - 4) / 6.0)) {
      detail = fmt("step mismatch at qp %d", qp);
      return false;
    }
    if (qp_to_lambda(qp) != kDefaultLambdaScale * std::exp2((qp - 12) / 3.0)) {
      detail = fmt("lambda mismatch at qp %d", qp);
      return false;
    }
  }
  if (qp_to_step(4) != 1.0 || qp_to_step(10) != 2.0 || qp_to_step(22) != 8.0 ||
      qp_to_lambda(12) != 0.85 || qp_to_lambda(18) != 3.4 ||
      qp_to_lambda(30) != 54.4) {
    detail = "anchor constants off";
    return false;
  }
  QpGrid grid;
  for (int qp : grid.qps()) {
    if (lambda_to_qp(qp_to_lambda(qp), grid) != qp) {
      detail = fmt("lambda round trip broken at qp %d", qp);
      return false;
    }
  }
  detail = "6 probe qps exact, lambda map inverts over the full grid";
  return true;
}

// 3. Monte-Carlo quantization error against the q^2/12 model.
bool check_quantizer_model(std::string& detail) {
  Rng rng(1003);
  double worst = 0.0;
  for (int qp : {0, 12, 24}) {
    double q = qp_to_step(qp);
    std::uniform_real_distribution<double> ud(-8.0 * q, 8.0 * q);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      double c = ud(rng);
      double recon = static_cast<double>(quantize_coeff(c, q)) * q;
      acc += (recon - c) * (recon - c);
    }
    double mse = acc / n;
    double expect = q * q / 12.0;
    worst = std::max(worst, std::abs(mse - expect) / expect);
  }
  detail = fmt("max relative deviation %.3g over steps at qp {0,12,24}", worst);
  return worst <= 0.02;
}

// 4. Closed-form saturation step vs exhaustive criterion scan.
bool check_dsd_oracle(std::string& detail) {
  Rng rng(1004);
  QpGrid grid;
  std::uniform_int_distribution<int> nd(1, kCoeffsPerMb);
  std::uniform_real_distribution<double> ld(-4.0, 6.0);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    SignificantSet sig;
    int n = nd(rng);
    for (int i = 0; i < n; ++i) sig.indices.push_back(i);
    double noise = std::pow(10.0, ld(rng));

    SaturationStep closed = saturation_step(sig, noise, grid);

    int best_qp = -1;
    for (int qp : grid.qps()) {
      if (expected_quant_error(grid.step(qp), n) <= noise) best_qp = qp;
    }
    bool exhaustive_degenerate = best_qp < 0;
    if (closed.degenerate != exhaustive_degenerate ||
        (!closed.degenerate && closed.saturation_qp != best_qp)) {
      ++mismatches;
    }
  }
  detail = fmt("%d mismatches over 10000 instances", mismatches);
  return mismatches == 0;
}

// 5. The criterion holds at qp* and fails one step coarser.
bool check_boundary(std::string& detail) {
  Rng rng(1005);
  QpGrid grid;
  std::uniform_real_distribution<double> sigma_d(3.0, 20.0);
  int tested = 0, failures = 0;
  while (tested < 500) {
    double sigma = sigma_d(rng);
    std::normal_distribution<double> gauss(0.0, sigma);
    PixelBlock clean = satpre_test::natural_block(rng);
    PixelBlock noisy = clean;
    for (auto& p : noisy.pixels)
      p = satpre_test::clamp255(p + static_cast<float>(gauss(rng)));
    MacroBlockCoeffs u = macroblock_coeffs(noisy);
    MacroBlockCoeffs z = macroblock_coeffs(clean);
    SaturationDecision d = dsd_block_qp(u, z, grid);
    if (d.degenerate) continue;
    ++tested;
    if (!check_criterion(u, z, d.saturation_qp, grid)) ++failures;
    if (d.saturation_qp < grid.max_qp() &&
        check_criterion(u, z, d.saturation_qp + 1, grid)) {
      ++failures;
    }
  }
  detail = fmt("%d boundary violations over 500 non-degenerate blocks", failures);
  return failures == 0;
}

// 6. Reconstruction at qp* sits closer to the input than to the
// reference on the significant set for nearly all blocks.
bool check_reconstruction_side(std::string& detail) {
  Rng rng(1006);
  QpGrid grid;
  std::uniform_real_distribution<double> sigma_d(3.0, 15.0);
  int tested = 0, closer = 0;
  while (tested < 1000) {
    double sigma = sigma_d(rng);
    std::normal_distribution<double> gauss(0.0, sigma);
    PixelBlock clean = satpre_test::natural_block(rng);
    PixelBlock noisy = clean;
    for (auto& p : noisy.pixels)
      p = satpre_test::clamp255(p + static_cast<float>(gauss(rng)));
    MacroBlockCoeffs u = macroblock_coeffs(noisy);
    MacroBlockCoeffs z = macroblock_coeffs(clean);
    SaturationDecision d = dsd_block_qp(u, z, grid);
    if (d.degenerate) continue;
    ++tested;
    SignificantSet sig = significant_indices(u, grid);
    LevelBlock levels = quantize(u, d.saturation_step);
    std::array<double, kCoeffsPerMb> recon = dequantize(levels);
    double to_u = 0.0, to_z = 0.0;
    for (int i : sig.indices) {
      to_u += (recon[i] - u.coeffs[i]) * (recon[i] - u.coeffs[i]);
      to_z += (recon[i] - z.coeffs[i]) * (recon[i] - z.coeffs[i]);
    }
    if (to_u <= to_z) ++closer;
  }
  detail = fmt("input-side reconstruction on %d/1000 blocks", closer);
  return closer >= 900;
}

// 7. Saturation shape of the distortion curves on an oracle clip.
bool check_saturation_witness(std::string& detail) {
  Rng rng(1007);
  std::vector<LumaPlane> clean_frames, noisy_frames;
  for (int f = 0; f < 90; ++f) {
    LumaPlane clean = satpre_test::natural_plane(rng, 640, 360);
    noisy_frames.push_back(satpre_test::add_noise(clean, rng, 10.0));
    clean_frames.push_back(std::move(clean));
  }
  VideoSequence u = satpre_test::plane_sequence(std::move(noisy_frames));
  VideoSequence z = satpre_test::plane_sequence(std::move(clean_frames));

  DetectionConfig config;
  config.grid = QpGrid(0, 12);
  config.threads = 0;
  std::vector<CurveReportRow> rows = emit_rd_report(u, &z, config);
  if (rows.size() != 13) {
    detail = "unexpected row count";
    return false;
  }
  double id = rows[0].id_mse;
  double d_min = rows[0].d_mse, d_max = rows[0].d_mse;
  for (const auto& row : rows) {
    d_min = std::min(d_min, row.d_mse);
    d_max = std::max(d_max, row.d_mse);
  }
  double i_frac = rows[0].i_mse / id;
  double d_gap = std::abs(rows[0].d_mse - id) / id;
  double flatness = (d_max - d_min) / d_min;
  detail = fmt("i_mse(0)/id = %.4f, |d_mse(0)-id|/id = %.4f, d spread %.4f",
               i_frac, d_gap, flatness);
  return i_frac < 0.01 && d_gap <= 0.05 && flatness < 0.10;
}

// 8. Detected frame qp tracks the injected noise level.
bool check_noise_response(std::string& detail) {
  const std::vector<double> sigmas = {2.0, 5.0, 10.0, 20.0};
  double worst = 1.0;
  for (DetectionMethod method : {DetectionMethod::kDsd, DetectionMethod::kRdsd}) {
    double total = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
      Rng rng(2000 + seed);
      LumaPlane clean = satpre_test::natural_plane(rng, 64, 64);
      std::vector<double> qps;
      for (double sigma : sigmas) {
        LumaPlane noisy = satpre_test::add_noise(clean, rng, sigma);
        VideoSequence u = satpre_test::plane_sequence({noisy});
        VideoSequence zz = satpre_test::plane_sequence({clean});
        DetectionConfig config;
        config.method = method;
        config.gop.gop_length = 1;
        std::vector<GopDecision> decisions = detect(u, &zz, config);
        qps.push_back(decisions.at(0).qp_star);
      }
      total += satpre_test::spearman(sigmas, qps);
    }
    worst = std::min(worst, total / 50.0);
  }
  detail = fmt("mean rank correlation %.4f (worse of dsd/rdsd) over 50 seeds",
               worst);
  return worst > 0.9;
}

// 9. Calibration: identity on itself, near-unity across models at high
// rate, and a log-linear rate model fit.
bool check_calibration(std::string& detail) {
  // identity
  std::vector<MacroBlockCoeffs> nat;
  {
    Rng rng(1009);
    for (int i = 0; i < 40; ++i)
      nat.push_back(macroblock_coeffs(satpre_test::natural_block(rng)));
  }
  std::vector<RdRecord> same = satpre_test::model_corpus(
      nat, "eg", EntropyModel::kRunLevelExpGolomb, 30);
  CalibrationTable self = calibrate(same, same, 5, 30);
  for (const auto& [qp, ratio] : self.entries()) {
    if (ratio != 1.0) {
      detail = fmt("self calibration ratio %.17g at qp %d", ratio, qp);
      return false;
    }
  }

  // cross-model, high-rate band
  std::vector<MacroBlockCoeffs> hot = satpre_test::high_energy_corpus(1010, 160);
  std::vector<RdRecord> src = satpre_test::model_corpus(
      hot, "eg", EntropyModel::kRunLevelExpGolomb, 45);
  std::vector<RdRecord> dst = satpre_test::model_corpus(
      hot, "cavlc", EntropyModel::kCavlcStyle, 45);
  CalibrationTable cross = calibrate(src, dst, 5, 30);
  double band_lo = 2.0, band_hi = 0.0;
  int band_entries = 0;
  for (const auto& [qp, ratio] : cross.entries()) {
    if (qp > 12) continue;
    ++band_entries;
    band_lo = std::min(band_lo, ratio);
    band_hi = std::max(band_hi, ratio);
  }
  if (band_entries == 0) {
    detail = "no cross-model entries at qp <= 12";
    return false;
  }
  if (band_lo < 0.8 || band_hi > 1.25) {
    detail = fmt("cross-model ratios [%.3f, %.3f] leave [0.8, 1.25]", band_lo,
                 band_hi);
    return false;
  }

  // log-domain rate fit
  std::vector<MacroBlockCoeffs> fit_blocks;
  {
    Rng rng(1011);
    for (int i = 0; i < 60; ++i)
      fit_blocks.push_back(macroblock_coeffs(satpre_test::natural_block(rng)));
  }
  QpGrid fit_grid(0, 16);
  std::vector<double> log_dist, rate;
  for (int qp : fit_grid.qps()) {
    double sse = 0.0;
    int64_t bits = 0;
    for (const auto& block : fit_blocks) {
      RDPoint p =
          rd_point(block, block, qp, fit_grid, EntropyModel::kRunLevelExpGolomb);
      sse += p.dist_input;
      bits += p.rate_bits;
    }
    log_dist.push_back(std::log(sse));
    rate.push_back(static_cast<double>(bits));
  }
  satpre_test::LinearFit fit = satpre_test::linear_fit(log_dist, rate);
  if (fit.r2 < 0.9) {
    detail = fmt("rate fit r2 = %.4f", fit.r2);
    return false;
  }
  detail = fmt("self = 1 exactly, cross band [%.3f, %.3f], rate fit r2 %.4f",
               band_lo, band_hi, fit.r2);
  return true;
}

// 10. Clamp semantics and run-to-run/thread-count determinism.
bool check_clamp_determinism(std::string& detail) {
  Rng rng(1012);
  std::uniform_int_distribution<int> frames_d(2, 4);
  std::uniform_int_distribution<int> gop_d(1, 3);
  std::uniform_int_distribution<int> user_d(0, 51);
  std::uniform_real_distribution<double> sigma_d(2.0, 14.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    int frames = frames_d(rng);
    std::vector<LumaPlane> clean, noisy;
    double sigma = sigma_d(rng);
    for (int f = 0; f < frames; ++f) {
      LumaPlane p = satpre_test::natural_plane(rng, 80, 48);
      noisy.push_back(satpre_test::add_noise(p, rng, sigma));
      clean.push_back(std::move(p));
    }
    VideoSequence u = satpre_test::plane_sequence(std::move(noisy));
    VideoSequence z = satpre_test::plane_sequence(std::move(clean));

    DetectionConfig config;
    config.method = coin(rng) ? DetectionMethod::kRdsd : DetectionMethod::kDsd;
    config.gop.gop_length = gop_d(rng);
    if (coin(rng)) config.user_qp = user_d(rng);

    config.threads = 1;
    std::vector<GopDecision> a = detect(u, &z, config);
    std::vector<GopDecision> b = detect(u, &z, config);
    config.threads = 4;
    std::vector<GopDecision> c = detect(u, &z, config);
    std::string csv_a = format_decisions_csv(a);
    if (csv_a != format_decisions_csv(b) || csv_a != format_decisions_csv(c)) {
      detail = fmt("nondeterministic decisions on trial %d", trial);
      return false;
    }
    for (const GopDecision& d : a) {
      int expect = config.user_qp ? std::max(*config.user_qp, d.qp_star)
                                  : d.qp_star;
      if (d.effective_qp != expect) {
        detail = fmt("clamp broken on trial %d gop %d", trial, d.gop_index);
        return false;
      }
    }
  }
  detail = "20 randomized configs: clamp exact, csv byte-stable across runs "
           "and thread counts";
  return true;
}

// 11. A clip that equals its reference saturates at the grid floor and
// never pushes the user's qp up.
bool check_clean_input(std::string& detail) {
  Rng rng(1013);
  std::vector<LumaPlane> frames;
  for (int f = 0; f < 3; ++f) {
    frames.push_back(satpre_test::natural_plane(rng, 64, 48));
  }
  VideoSequence u = satpre_test::plane_sequence(std::move(frames));
  for (DetectionMethod method : {DetectionMethod::kDsd, DetectionMethod::kRdsd}) {
    DetectionConfig config;
    config.method = method;
    config.gop.gop_length = 1;
    config.user_qp = 35;
    std::vector<GopDecision> decisions = detect(u, &u, config);
    if (decisions.size() != 3) {
      detail = "unexpected gop count";
      return false;
    }
    for (const GopDecision& d : decisions) {
      if (d.qp_star != config.grid.min_qp()) {
        detail = fmt("gop %d qp_star %d, want grid minimum", d.gop_index,
                     d.qp_star);
        return false;
      }
      if (d.effective_qp != 35) {
        detail = fmt("gop %d effective qp %d, user qp was raised", d.gop_index,
                     d.effective_qp);
        return false;
      }
    }
  }
  detail = "both methods: qp_star at grid minimum on all gops, user qp kept";
  return true;
}

struct Criterion {
  const char* name;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"transform round trip and energy", check_transform},
      {"step and lambda mappings", check_mappings},
      {"quantizer error model", check_quantizer_model},
      {"closed form vs exhaustive criterion", check_dsd_oracle},
      {"criterion boundary at qp*", check_boundary},
      {"reconstruction sides with the input", check_reconstruction_side},
      {"distortion saturation witness", check_saturation_witness},
      {"noise monotonicity", check_noise_response},
      {"lambda transfer identity and band", check_calibration},
      {"clamp contract and determinism", check_clamp_determinism},
      {"clean input sanity", check_clean_input},
  };

  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1..%d]\n", argv[0],
                   static_cast<int>(criteria.size()));
      return 2;
    }
  }

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, criteria[i].name,
                detail.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
