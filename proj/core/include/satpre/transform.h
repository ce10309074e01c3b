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

#ifndef SATPRE_TRANSFORM_H_
#define SATPRE_TRANSFORM_H_

#include <array>
#include <cstdint>
#include <vector>

#include "satpre/media_io.h"

namespace satpre {

inline constexpr int kSubBlockSize = 4;
inline constexpr int kSubBlocksPerMb = 16;   // 4x4 grid of 4x4 sub-blocks
inline constexpr int kCoeffsPerMb = 256;

inline constexpr double kDefaultLambdaScale = 0.85;  // r in the lambda map

// Row-major 4x4 tile of spatial samples.
using Block4 = std::array<double, 16>;

// Row-major 4x4 tile of transform coefficients.
struct Coeff4x4 {
  std::array<double, 16> c{};
};

// Orthonormal (matrix-form) 4x4 DCT. Energy-preserving: the inverse is
// the transpose, so inverse_dct4(forward_dct4(b)) == b up to rounding.
Coeff4x4 forward_dct4(const Block4& block);
Block4 inverse_dct4(const Coeff4x4& coeffs);

// All sixteen 4x4 sub-blocks of one macroblock, transformed. Sub-blocks
// are stored raster order, coefficients row-major inside each.
struct MacroBlockCoeffs {
  int origin_x = 0;
  int origin_y = 0;
  bool padded = false;
  std::array<double, kCoeffsPerMb> coeffs{};
};

MacroBlockCoeffs macroblock_coeffs(const PixelBlock& block);

// qp -> quantization step, 2^((qp - 4) / 6). Pure map, no range check;
// QpGrid::step() is the checked variant.
double qp_to_step(int qp);

// qp -> Lagrange multiplier, r * 2^((qp - 12) / 3).
double qp_to_lambda(int qp, double r = kDefaultLambdaScale);

// Ordered set of integer QPs the detector may choose from.
class QpGrid {
 public:
  QpGrid() : QpGrid(0, 51) {}
  QpGrid(int min_qp, int max_qp);                // inclusive contiguous range
  explicit QpGrid(std::vector<int> qps);         // strictly increasing

  const std::vector<int>& qps() const { return qps_; }
  int min_qp() const { return qps_.front(); }
  int max_qp() const { return qps_.back(); }
  bool contains(int qp) const;
  double step(int qp) const;                     // throws ConfigError off-grid
  double min_step() const { return qp_to_step(min_qp()); }

  // Nearest grid member to `qp`; ties between two members go up.
  int snap(int qp) const;

 private:
  std::vector<int> qps_;
};

// Inverse of qp_to_lambda: round(12 + 3 * log2(lambda / r)), half up,
// snapped onto the grid.
int lambda_to_qp(double lambda, const QpGrid& grid,
                 double r = kDefaultLambdaScale);

// Quantized levels for one macroblock, raster sub-block order with
// row-major coefficients, matching MacroBlockCoeffs layout.
struct LevelBlock {
  std::array<int32_t, kCoeffsPerMb> levels{};
  double step = 0.0;
};

// Scalar uniform quantizer, round half away from zero.
int32_t quantize_coeff(double coeff, double step);

LevelBlock quantize(const MacroBlockCoeffs& coeffs, double step);
std::array<double, kCoeffsPerMb> dequantize(const LevelBlock& levels);

// High-rate model of total squared quantization error over n coefficients.
double expected_quant_error(double step, int n_coeffs);

}  // namespace satpre

#endif  // SATPRE_TRANSFORM_H_
