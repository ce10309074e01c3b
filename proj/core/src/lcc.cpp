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

#include "satpre/lcc.h"

#include <bit>
#include <cmath>
#include <cstdlib>

#include "satpre/error.h"

namespace satpre {

namespace {

// coeff_token code lengths indexed [vlc][4 * total_coeffs + trailing_ones].
// vlc 0..2 select on the neighbor context, vlc 3 is the 6-bit FLC.
constexpr int8_t kCoeffTokenLen[4][68] = {
    {1,  0,  0,  0,  6,  2,  0,  0,  8,  6,  3,  0,  9,  8,  7,  5,  10,
     9,  8,  6,  11, 10, 9,  7,  13, 11, 10, 8,  13, 13, 11, 9,  13, 13,
     13, 10, 14, 14, 13, 11, 14, 14, 14, 13, 15, 15, 14, 14, 15, 15, 15,
     14, 16, 15, 15, 15, 16, 16, 16, 15, 16, 16, 16, 16, 16, 16, 16, 16},
    {2,  0,  0,  0,  6,  2,  0,  0,  6,  5,  3,  0,  7,  6,  6,  4,  8,
     6,  6,  4,  8,  7,  7,  5,  9,  8,  8,  6,  11, 9,  9,  6,  11, 11,
     11, 7,  12, 11, 11, 9,  12, 12, 12, 11, 12, 12, 12, 11, 13, 13, 13,
     12, 13, 13, 13, 13, 13, 14, 14, 13, 14, 14, 14, 13, 14, 14, 14, 14},
    {4,  0,  0,  0,  6, 4,  0,  0,  6, 5,  4,  0,  6, 5,  5,  4,  7,
     5,  5,  4,  7,  5, 5,  5,  7,  6, 6,  6,  7,  6, 6,  6,  8,  7,
     7,  7,  8,  8,  8, 7,  9,  8,  8, 8,  9,  9,  9, 8,  9,  9,  9,
     9,  10, 9,  9,  9, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10},
    {6, 0, 0, 0, 6, 6, 0, 0, 6, 6, 6, 0, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6,
     6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6,
     6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6, 6},
};

// total_zeros code lengths indexed [total_coeffs - 1][total_zeros].
constexpr int8_t kTotalZerosLen[15][16] = {
    {1, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 9},
    {3, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 6, 6, 6, 6, 0},
    {4, 3, 3, 3, 4, 4, 3, 3, 4, 5, 5, 6, 5, 6, 0, 0},
    {5, 3, 4, 4, 3, 3, 3, 4, 3, 4, 5, 5, 5, 0, 0, 0},
    {4, 4, 4, 3, 3, 3, 3, 3, 4, 5, 4, 5, 0, 0, 0, 0},
    {6, 5, 3, 3, 3, 3, 3, 3, 4, 3, 6, 0, 0, 0, 0, 0},
    {6, 5, 3, 3, 3, 2, 3, 4, 3, 6, 0, 0, 0, 0, 0, 0},
    {6, 4, 5, 3, 2, 2, 3, 3, 6, 0, 0, 0, 0, 0, 0, 0},
    {6, 6, 4, 2, 2, 3, 2, 5, 0, 0, 0, 0, 0, 0, 0, 0},
    {5, 5, 3, 2, 2, 2, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {4, 4, 3, 3, 1, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {4, 4, 2, 1, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 3, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
};

// run_before code lengths indexed [min(zeros_left, 7) - 1][run].
constexpr int8_t kRunBeforeLen[7][15] = {
    {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 2, 3, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 2, 3, 3, 3, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {2, 3, 3, 3, 3, 3, 3, 0, 0, 0, 0, 0, 0, 0, 0},
    {3, 3, 3, 3, 3, 3, 3, 4, 5, 6, 7, 8, 9, 10, 11},
};

// Length of one level code at the current suffix length, including the
// escape forms. `code` is the mapped unsigned value.
int level_code_bits(int64_t code, int suffix_len) {
  int64_t pre = code >> suffix_len;
  if (pre < 14) return static_cast<int>(pre) + 1 + suffix_len;
  if (suffix_len == 0) {
    if (code < 30) return 19;
  } else if (pre == 14) {
    return 15 + suffix_len;
  }
  int64_t rem = code - (int64_t{15} << suffix_len);
  if (suffix_len == 0) rem -= 15;
  if (rem < (1 << 12)) return 28;
  rem -= 1 << 12;
  int prefix = 16;
  int size = 13;
  while (rem >= (int64_t{1} << size)) {
    rem -= int64_t{1} << size;
    ++size;
    ++prefix;
  }
  return prefix + 1 + size;
}

// Bits for one 4x4 sub-block under the CAVLC-style model. Returns the
// bit count and stores the nonzero-coefficient count for the context of
// later sub-blocks.
int cavlc_subblock_rate(const std::array<int32_t, 16>& raster_levels, int n_ctx,
                        int* total_coeffs_out) {
  std::array<int32_t, 16> s = zigzag_scan(raster_levels);
  int nz_pos[16];
  int tc = 0;
  for (int i = 0; i < 16; ++i) {
    if (s[i] != 0) nz_pos[tc++] = i;
  }
  *total_coeffs_out = tc;
  int vlc = n_ctx < 2 ? 0 : (n_ctx < 4 ? 1 : (n_ctx < 8 ? 2 : 3));
  if (tc == 0) return kCoeffTokenLen[vlc][0];

  int t1 = 0;
  for (int i = tc - 1; i >= 0 && t1 < 3 && std::abs(s[nz_pos[i]]) == 1; --i) ++t1;

  int bits = kCoeffTokenLen[vlc][4 * tc + t1];
  bits += t1;  // trailing-one signs

  int suffix_len = (tc > 10 && t1 < 3) ? 1 : 0;
  bool first = true;
  for (int j = tc - 1 - t1; j >= 0; --j) {
    int64_t lev = s[nz_pos[j]];
    int64_t code = 2 * (std::llabs(lev) - 1) + (lev < 0 ? 1 : 0);
    if (first && t1 < 3) code -= 2;
    first = false;
    bits += level_code_bits(code, suffix_len);
    if (suffix_len == 0) suffix_len = 1;
    if (std::llabs(lev) > (int64_t{3} << (suffix_len - 1)) && suffix_len < 6) {
      ++suffix_len;
    }
  }

  if (tc < 16) {
    int tz = nz_pos[tc - 1] + 1 - tc;
    bits += kTotalZerosLen[tc - 1][tz];
    int zeros_left = tz;
    for (int j = tc - 1; j > 0 && zeros_left > 0; --j) {
      int run = nz_pos[j] - nz_pos[j - 1] - 1;
      bits += kRunBeforeLen[std::min(zeros_left, 7) - 1][run];
      zeros_left -= run;
    }
  }
  return bits;
}

double sq(double x) { return x * x; }

}  // namespace

std::array<int32_t, 16> zigzag_scan(const std::array<int32_t, 16>& raster) {
  std::array<int32_t, 16> out;
  for (int i = 0; i < 16; ++i) out[i] = raster[kZigzag4x4[i]];
  return out;
}

std::array<int32_t, 16> zigzag_unscan(const std::array<int32_t, 16>& scanned) {
  std::array<int32_t, 16> out;
  for (int i = 0; i < 16; ++i) out[kZigzag4x4[i]] = scanned[i];
  return out;
}

int ue_golomb_bits(uint32_t k) {
  return 2 * std::bit_width(static_cast<uint64_t>(k) + 1) - 1;
}

int se_golomb_bits(int32_t v) {
  int64_t k = v > 0 ? 2 * int64_t{v} - 1 : -2 * int64_t{v};
  return 2 * std::bit_width(static_cast<uint64_t>(k) + 1) - 1;
}

int subblock_rate(const std::array<int32_t, 16>& raster_levels) {
  std::array<int32_t, 16> s = zigzag_scan(raster_levels);
  int nz_pos[16];
  int count = 0;
  for (int i = 0; i < 16; ++i) {
    if (s[i] != 0) nz_pos[count++] = i;
  }
  int bits = 1;  // coded flag
  if (count == 0) return bits;
  bits += ue_golomb_bits(static_cast<uint32_t>(count - 1));
  for (int j = count - 1; j >= 0; --j) {
    int run = nz_pos[j] - (j > 0 ? nz_pos[j - 1] : -1) - 1;
    bits += se_golomb_bits(s[nz_pos[j]]);
    bits += ue_golomb_bits(static_cast<uint32_t>(run));
  }
  return bits;
}

int64_t block_rate(const LevelBlock& levels, EntropyModel model) {
  int64_t bits = 0;
  if (model == EntropyModel::kRunLevelExpGolomb) {
    for (int sb = 0; sb < kSubBlocksPerMb; ++sb) {
      std::array<int32_t, 16> sub;
      for (int i = 0; i < 16; ++i) sub[i] = levels.levels[16 * sb + i];
      bits += subblock_rate(sub);
    }
    return bits;
  }
  // CAVLC-style: sub-blocks coded raster order; the context of each is
  // the mean of the left and top neighbor counts inside this macroblock.
  int counts[kSubBlocksPerMb] = {};
  for (int sb = 0; sb < kSubBlocksPerMb; ++sb) {
    int row = sb / 4, col = sb % 4;
    int n_ctx;
    if (col > 0 && row > 0) {
      n_ctx = (counts[sb - 1] + counts[sb - 4] + 1) >> 1;
    } else if (col > 0) {
      n_ctx = counts[sb - 1];
    } else if (row > 0) {
      n_ctx = counts[sb - 4];
    } else {
      n_ctx = 0;
    }
    std::array<int32_t, 16> sub;
    for (int i = 0; i < 16; ++i) sub[i] = levels.levels[16 * sb + i];
    bits += cavlc_subblock_rate(sub, n_ctx, &counts[sb]);
  }
  return bits;
}

RDPoint rd_point(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z, int qp,
                 const QpGrid& grid, EntropyModel model) {
  if (u.origin_x != z.origin_x || u.origin_y != z.origin_y) {
    throw InputError("rd_point: input and denoised blocks at different origins (" +
                     std::to_string(u.origin_x) + "," + std::to_string(u.origin_y) +
                     ") vs (" + std::to_string(z.origin_x) + "," +
                     std::to_string(z.origin_y) + ")");
  }
  double step = grid.step(qp);
  LevelBlock lev = quantize(u, step);
  RDPoint point;
  point.qp = qp;
  point.rate_bits = block_rate(lev, model);
  for (int i = 0; i < kCoeffsPerMb; ++i) {
    double recon = lev.levels[i] * step;
    point.dist_input += sq(recon - u.coeffs[i]);
    point.dist_denoised += sq(recon - z.coeffs[i]);
  }
  return point;
}

std::vector<RDPoint> rd_curve(const MacroBlockCoeffs& u,
                              const MacroBlockCoeffs& z, const QpGrid& grid,
                              EntropyModel model) {
  std::vector<RDPoint> curve;
  curve.reserve(grid.qps().size());
  for (int qp : grid.qps()) {
    curve.push_back(rd_point(u, z, qp, grid, model));
  }
  return curve;
}

}  // namespace satpre
