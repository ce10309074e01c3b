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

#ifndef SATPRE_LCC_H_
#define SATPRE_LCC_H_

#include <array>
#include <cstdint>
#include <vector>

#include "satpre/transform.h"

namespace satpre {

// Scan position -> raster index within a 4x4 tile.
inline constexpr std::array<int, 16> kZigzag4x4 = {0, 1, 4, 8,  5,  2, 3,  6,
                                                  9, 12, 13, 10, 7, 11, 14, 15};

std::array<int32_t, 16> zigzag_scan(const std::array<int32_t, 16>& raster);
std::array<int32_t, 16> zigzag_unscan(const std::array<int32_t, 16>& scanned);

// Bit lengths of unsigned / signed exp-Golomb codes.
int ue_golomb_bits(uint32_t k);
int se_golomb_bits(int32_t v);

// Rate models. Neither emits bits; both only count what a real coder
// would write, which is all the detector needs.
//
// kRunLevelExpGolomb: per sub-block, a 1-bit coded flag; for coded
// blocks ue(count-1), then per nonzero coefficient in reverse scan
// order se(level) and ue(zero-run preceding it in scan order).
//
// kCavlcStyle: H.264 4x4 residual syntax lengths (coeff_token with the
// context derived from already-coded sub-blocks of the same macroblock,
// trailing-one signs, adaptive level codes, total_zeros, run_before).
enum class EntropyModel { kRunLevelExpGolomb, kCavlcStyle };

// Bits for one 4x4 sub-block of levels (raster order) under the default
// model. The CAVLC variant is context-dependent and only exposed at
// macroblock granularity.
int subblock_rate(const std::array<int32_t, 16>& raster_levels);

// Total bits for one macroblock of levels.
int64_t block_rate(const LevelBlock& levels, EntropyModel model);

// One rate/distortion sample of a block at a given QP.
struct RDPoint {
  int qp = 0;
  int64_t rate_bits = 0;
  double dist_input = 0.0;     // ||recon - u||^2
  double dist_denoised = 0.0;  // ||recon - z||^2
};

// Quantizes u at the grid step for qp and measures rate plus both
// distortions. u and z must come from the same block position.
RDPoint rd_point(const MacroBlockCoeffs& u, const MacroBlockCoeffs& z, int qp,
                 const QpGrid& grid, EntropyModel model);

// rd_point at every QP of the grid, ascending.
std::vector<RDPoint> rd_curve(const MacroBlockCoeffs& u,
                              const MacroBlockCoeffs& z, const QpGrid& grid,
                              EntropyModel model);

}  // namespace satpre

#endif  // SATPRE_LCC_H_
